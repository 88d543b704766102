#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "tensor.hpp"

namespace dsu {

// DSUT tensor file: magic "DSUT", version u32, dtype u8 (0=f32, 1=f64),
// ndim u32, dims u64 each, row-major little-endian payload.
// All checkpoint and codebook tensors use this container.

inline constexpr uint32_t kDsutVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("dsut: truncated file");
    return v;
}

}  // namespace detail

template <typename S>
void save_tensor(const std::string& path, const Tensor<S>& t) {
    static_assert(std::is_same_v<S, float> || std::is_same_v<S, double>);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dsut: cannot open for write: " + path);
    os.write("DSUT", 4);
    detail::write_pod<uint32_t>(os, kDsutVersion);
    detail::write_pod<uint8_t>(os, std::is_same_v<S, float> ? 0 : 1);
    detail::write_pod<uint32_t>(os, static_cast<uint32_t>(t.dims.size()));
    for (size_t d : t.dims) detail::write_pod<uint64_t>(os, static_cast<uint64_t>(d));
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * sizeof(S)));
    if (!os) throw std::runtime_error("dsut: write failed: " + path);
}

template <typename S>
Tensor<S> load_tensor(const std::string& path) {
    static_assert(std::is_same_v<S, float> || std::is_same_v<S, double>);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("dsut: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DSUT", 4) != 0)
        throw std::runtime_error("dsut: bad magic in " + path);
    const auto version = detail::read_pod<uint32_t>(is);
    if (version != kDsutVersion)
        throw std::runtime_error("dsut: unsupported version in " + path);
    const auto dtype = detail::read_pod<uint8_t>(is);
    const uint8_t want = std::is_same_v<S, float> ? 0 : 1;
    if (dtype != want)
        throw std::runtime_error("dsut: dtype mismatch in " + path + " (have " +
                                 std::to_string(int(dtype)) + ", want " +
                                 std::to_string(int(want)) + ")");
    const auto ndim = detail::read_pod<uint32_t>(is);
    if (ndim == 0 || ndim > 8) throw std::runtime_error("dsut: bad ndim in " + path);
    std::vector<size_t> dims(ndim);
    for (auto& d : dims) d = static_cast<size_t>(detail::read_pod<uint64_t>(is));
    Tensor<S> t(dims);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(S)));
    if (!is) throw std::runtime_error("dsut: truncated payload in " + path);
    return t;
}

}  // namespace dsu
