#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsu {

// Dense row-major tensor. Scalar is float for runs, double for gradient
// checking; both carry the same layout.
template <typename S>
struct Tensor {
    std::vector<size_t> dims;
    std::vector<S> data;

    Tensor() = default;

    explicit Tensor(std::vector<size_t> d) : dims(std::move(d)) {
        data.assign(count(dims), S(0));
    }

    Tensor(std::vector<size_t> d, std::vector<S> v) : dims(std::move(d)), data(std::move(v)) {
        if (count(dims) != data.size())
            throw std::invalid_argument("tensor: dims do not match payload size");
    }

    static size_t count(const std::vector<size_t>& d) {
        size_t n = 1;
        for (size_t e : d) {
            if (e == 0) throw std::invalid_argument("tensor: zero extent");
            n *= e;
        }
        return n;
    }

    size_t size() const { return data.size(); }
    size_t ndim() const { return dims.size(); }

    // 2-D accessors; most of the pipeline works on [rows x cols] matrices.
    size_t rows() const { return dims.at(0); }
    size_t cols() const { return dims.size() < 2 ? 1 : dims[1]; }

    S& at(size_t i, size_t j) { return data[i * cols() + j]; }
    S at(size_t i, size_t j) const { return data[i * cols() + j]; }

    S* row_ptr(size_t i) { return data.data() + i * cols(); }
    const S* row_ptr(size_t i) const { return data.data() + i * cols(); }

    void fill(S v) { std::fill(data.begin(), data.end(), v); }

    bool same_dims(const Tensor& o) const { return dims == o.dims; }

    std::string shape_str() const {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
        os << "]";
        return os.str();
    }
};

// NaN/Inf anywhere is a hard error: abort the run with a diagnostic rather
// than let a poisoned value propagate into checkpoints or metrics.
template <typename S>
void check_finite(const Tensor<S>& t, const char* where) {
    for (S v : t.data) {
        if (!std::isfinite(static_cast<double>(v))) {
            throw std::runtime_error(std::string("non-finite value in ") + where + " " +
                                     t.shape_str());
        }
    }
}

template <typename S>
void check_finite(const S* p, size_t n, const char* where) {
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(static_cast<double>(p[i])))
            throw std::runtime_error(std::string("non-finite value in ") + where);
    }
}

// Parameter tensor: value plus accumulated gradient of identical dims, and
// AdamW moment state. grad is all-zero after reset_grad().
template <typename S>
struct Param {
    Tensor<S> value;
    Tensor<S> grad;
    Tensor<S> adam_m;
    Tensor<S> adam_v;

    Param() = default;
    explicit Param(std::vector<size_t> d)
        : value(d), grad(d), adam_m(d), adam_v(std::move(d)) {}

    void reset_grad() { grad.fill(S(0)); }
    size_t size() const { return value.size(); }
};

}  // namespace dsu
