#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace dsu {

// Time-restricted attention window: frame i may attend to [i-past, i+future],
// clamped to the sequence. The center frame is always part of the window
// (c = 1). kUnbounded on both sides reproduces full attention.
struct WindowConfig {
    static constexpr int64_t kUnbounded = -1;
    static constexpr int64_t kCenter = 1;

    int64_t past = kUnbounded;    // l
    int64_t future = kUnbounded;  // r

    bool past_unbounded() const { return past < 0; }
    bool future_unbounded() const { return future < 0; }
    bool full() const { return past_unbounded() && future_unbounded(); }

    static WindowConfig full_attention() { return {kUnbounded, kUnbounded}; }
    static WindowConfig symmetric(int64_t k) { return {k, k}; }

    // Accepts "l,c,r" with c = 1, "full", or "inf" for either side.
    static WindowConfig parse(const std::string& s) {
        if (s == "full") return full_attention();
        std::istringstream is(s);
        std::string part;
        std::string parts[3];
        int n = 0;
        while (std::getline(is, part, ',') && n < 3) parts[n++] = part;
        if (n != 3) throw std::invalid_argument("window: expected l,c,r or 'full': " + s);
        auto side = [](const std::string& p) -> int64_t {
            if (p == "inf" || p == "full" || p == "unbounded") return kUnbounded;
            const long long v = std::stoll(p);
            if (v < 0) throw std::invalid_argument("window: negative extent");
            return v;
        };
        if (parts[1] != "1") throw std::invalid_argument("window: center must be 1");
        return {side(parts[0]), side(parts[2])};
    }

    std::string str() const {
        auto side = [](int64_t v) { return v < 0 ? std::string("inf") : std::to_string(v); };
        return side(past) + ",1," + side(future);
    }

    // Allowed column span for row i of a length-T sequence.
    void span(size_t i, size_t t_len, size_t* start, size_t* width) const {
        const size_t lo =
            past_unbounded() ? 0
                             : (static_cast<int64_t>(i) > past ? i - static_cast<size_t>(past) : 0);
        size_t hi = t_len - 1;
        if (!future_unbounded()) {
            const size_t cand = i + static_cast<size_t>(future);
            hi = cand < t_len - 1 ? cand : t_len - 1;
        }
        *start = lo;
        *width = hi - lo + 1;
    }
};

inline bool operator==(const WindowConfig& a, const WindowConfig& b) {
    return a.past == b.past && a.future == b.future;
}

// mask[i][j] is true iff max(0, i-l) <= j <= min(T-1, i+r).
inline BoolTensor build_mask(size_t t_len, const WindowConfig& w) {
    if (t_len == 0) throw std::invalid_argument("build_mask: T must be >= 1");
    BoolTensor mask({t_len, t_len});
    for (size_t i = 0; i < t_len; ++i) {
        size_t start = 0, width = 0;
        w.span(i, t_len, &start, &width);
        for (size_t j = start; j < start + width; ++j) mask.at(i, j) = 1;
    }
    return mask;
}

// (l+r)*n + c input frames can influence one output frame; nullopt when a
// side is unbounded.
inline std::optional<int64_t> receptive_field(const WindowConfig& w, int64_t n_layers) {
    if (w.past_unbounded() || w.future_unbounded()) return std::nullopt;
    return (w.past + w.future) * n_layers + WindowConfig::kCenter;
}

// r*n + c future frames must arrive before a frame's output is final.
inline std::optional<int64_t> theoretical_latency(const WindowConfig& w, int64_t n_layers) {
    if (w.future_unbounded()) return std::nullopt;
    return w.future * n_layers + WindowConfig::kCenter;
}

}  // namespace dsu
