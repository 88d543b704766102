#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "flops.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace dsu {

template <typename S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using EVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Boolean tensor for attention masks; same layout conventions as Tensor.
struct BoolTensor {
    std::vector<size_t> dims;
    std::vector<uint8_t> data;

    BoolTensor() = default;
    explicit BoolTensor(std::vector<size_t> d) : dims(std::move(d)) {
        size_t n = 1;
        for (size_t e : dims) n *= e;
        data.assign(n, 0);
    }
    size_t rows() const { return dims.at(0); }
    size_t cols() const { return dims.size() < 2 ? 1 : dims[1]; }
    uint8_t& at(size_t i, size_t j) { return data[i * cols() + j]; }
    uint8_t at(size_t i, size_t j) const { return data[i * cols() + j]; }
};

// ---------------------------------------------------------------------------
// Per-row primitives. The streaming runtime and the offline encoder both go
// through these, so a frame computed incrementally is bit-identical to the
// same frame computed offline.
// ---------------------------------------------------------------------------

// y = W x + b with W [out x in] row-major.
template <typename S>
inline void linear_row(const S* w, const S* b, const S* x, S* y, size_t in, size_t out) {
    Eigen::Map<const EMat<S>> wm(w, static_cast<Eigen::Index>(out),
                                 static_cast<Eigen::Index>(in));
    Eigen::Map<const EVec<S>> xv(x, static_cast<Eigen::Index>(in));
    Eigen::Map<EVec<S>> yv(y, static_cast<Eigen::Index>(out));
    yv.noalias() = wm * xv;
    if (b) yv += Eigen::Map<const EVec<S>>(b, static_cast<Eigen::Index>(out));
    count_flops(2ull * in * out);
}

// out[j] = dot(rows_j, q) for j in [0, w); rows is [w x n] row-major.
template <typename S>
inline void span_row_dots(const S* rows, const S* q, S* out, size_t w, size_t n) {
    Eigen::Map<const EMat<S>> rm(rows, static_cast<Eigen::Index>(w),
                                 static_cast<Eigen::Index>(n));
    Eigen::Map<const EVec<S>> qv(q, static_cast<Eigen::Index>(n));
    Eigen::Map<EVec<S>> ov(out, static_cast<Eigen::Index>(w));
    ov.noalias() = rm * qv;
    count_flops(2ull * w * n);
}

// y = sum_j coef[j] * rows_j; accumulation order over j is fixed.
template <typename S>
inline void span_weighted_rows(const S* rows, const S* coef, S* y, size_t w, size_t n) {
    Eigen::Map<EVec<S>> yv(y, static_cast<Eigen::Index>(n));
    yv.setZero();
    for (size_t j = 0; j < w; ++j) {
        Eigen::Map<const EVec<S>> rv(rows + j * n, static_cast<Eigen::Index>(n));
        yv += coef[j] * rv;
    }
    count_flops(2ull * w * n);
}

// In-place softmax over a contiguous row, computed with max subtraction.
template <typename S>
inline void softmax_row(S* x, size_t n) {
    S m = x[0];
    for (size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    S sum = S(0);
    for (size_t i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - m);
        sum += x[i];
    }
    const S inv = S(1) / sum;
    for (size_t i = 0; i < n; ++i) x[i] *= inv;
}

template <typename S>
inline S gelu_value(S x) {
    return S(0.5) * x * (S(1) + std::erf(x * S(0.7071067811865475)));
}

template <typename S>
inline S gelu_derivative(S x) {
    const S cdf = S(0.5) * (S(1) + std::erf(x * S(0.7071067811865475)));
    const S pdf = S(0.3989422804014327) * std::exp(S(-0.5) * x * x);
    return cdf + x * pdf;
}

// Row-wise layer norm; mean/variance accumulated in double. Writes the
// normalized row to xhat (used by the backward pass) when non-null.
template <typename S>
inline void layernorm_row(const S* x, const S* gain, const S* bias, S* y, size_t d, S eps,
                          S* xhat = nullptr, S* inv_std = nullptr) {
    double mean = 0.0;
    for (size_t i = 0; i < d; ++i) mean += static_cast<double>(x[i]);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (size_t i = 0; i < d; ++i) {
        const double c = static_cast<double>(x[i]) - mean;
        var += c * c;
    }
    var /= static_cast<double>(d);
    const S istd = S(1.0 / std::sqrt(var + static_cast<double>(eps)));
    for (size_t i = 0; i < d; ++i) {
        const S xh = (x[i] - S(mean)) * istd;
        if (xhat) xhat[i] = xh;
        y[i] = xh * gain[i] + bias[i];
    }
    if (inv_std) *inv_std = istd;
}

template <typename S>
inline size_t argmax_row(const S* x, size_t n) {
    size_t best = 0;
    for (size_t i = 1; i < n; ++i)
        if (x[i] > x[best]) best = i;  // ties keep the lowest index
    return best;
}

// ---------------------------------------------------------------------------
// Free-standing tensor ops.
// ---------------------------------------------------------------------------

template <typename S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
    if (a.ndim() != 2 || b.ndim() != 2)
        throw std::invalid_argument("matmul: expects 2-D tensors");
    if (a.dims[1] != b.dims[0])
        throw std::invalid_argument("matmul: inner dims disagree " + a.shape_str() + " x " +
                                    b.shape_str());
    const size_t m = a.dims[0], k = a.dims[1], n = b.dims[1];
    Tensor<S> c({m, n});
    Eigen::Map<const EMat<S>> am(a.data.data(), m, k);
    Eigen::Map<const EMat<S>> bm(b.data.data(), k, n);
    Eigen::Map<EMat<S>> cm(c.data.data(), m, n);
    cm.noalias() = am * bm;
    count_flops(2ull * m * k * n);
    check_finite(c, "matmul");
    return c;
}

// Masked softmax over the last dimension. Masked entries are exactly zero;
// a fully masked row is an error.
template <typename S>
Tensor<S> softmax_masked(const Tensor<S>& x, const BoolTensor& mask) {
    if (x.dims != mask.dims) throw std::invalid_argument("softmax_masked: shape mismatch");
    const size_t n = x.dims.back();
    const size_t rows = x.size() / n;
    Tensor<S> y(x.dims);
    for (size_t r = 0; r < rows; ++r) {
        const S* xr = x.data.data() + r * n;
        const uint8_t* mr = mask.data.data() + r * n;
        S* yr = y.data.data() + r * n;
        S m = S(0);
        bool any = false;
        for (size_t i = 0; i < n; ++i) {
            if (!mr[i]) continue;
            m = any ? std::max(m, xr[i]) : xr[i];
            any = true;
        }
        if (!any) throw std::runtime_error("softmax_masked: fully masked row");
        S sum = S(0);
        for (size_t i = 0; i < n; ++i) {
            yr[i] = mr[i] ? std::exp(xr[i] - m) : S(0);
            sum += yr[i];
        }
        const S inv = S(1) / sum;
        for (size_t i = 0; i < n; ++i) yr[i] *= inv;
    }
    check_finite(y, "softmax_masked");
    return y;
}

template <typename S>
Tensor<S> layernorm(const Tensor<S>& x, const Tensor<S>& gain, const Tensor<S>& bias,
                    S eps = S(1e-5)) {
    const size_t d = x.dims.back();
    if (gain.size() != d || bias.size() != d)
        throw std::invalid_argument("layernorm: gain/bias dim mismatch");
    const size_t rows = x.size() / d;
    Tensor<S> y(x.dims);
    for (size_t r = 0; r < rows; ++r)
        layernorm_row(x.data.data() + r * d, gain.data.data(), bias.data.data(),
                      y.data.data() + r * d, d, eps);
    check_finite(y, "layernorm");
    return y;
}

// ---------------------------------------------------------------------------
// Layers: forward caches what the hand-wired backward needs; backward
// accumulates (+=) into Param::grad and returns the input gradient.
// ---------------------------------------------------------------------------

template <typename S>
struct Linear {
    Param<S> w;  // [out, in]
    Param<S> b;  // [out]
    FlopCat cat = FlopCat::other;

    Tensor<S> x_cache;
    bool has_cache = false;

    void init(size_t in, size_t out, Rng& rng) {
        w = Param<S>({out, in});
        b = Param<S>({out});
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (auto& v : w.value.data) v = S(rng.uniform(-bound, bound));
    }

    size_t in() const { return w.value.dims[1]; }
    size_t out() const { return w.value.dims[0]; }

    void forward_row(const S* x, S* y) const {
        CatScope cs(cat);
        linear_row(w.value.data.data(), b.value.data.data(), x, y, in(), out());
    }

    Tensor<S> forward(const Tensor<S>& x) {
        if (x.cols() != in()) throw std::invalid_argument("linear: input dim mismatch");
        Tensor<S> y({x.rows(), out()});
        for (size_t t = 0; t < x.rows(); ++t) forward_row(x.row_ptr(t), y.row_ptr(t));
        x_cache = x;
        has_cache = true;
        check_finite(y, "linear");
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) {
        if (!has_cache) throw std::runtime_error("linear: backward before forward");
        const size_t t = dy.rows(), o = out(), i = in();
        Tensor<S> dx({t, i});
        Eigen::Map<const EMat<S>> dym(dy.data.data(), t, o);
        Eigen::Map<const EMat<S>> wm(w.value.data.data(), o, i);
        Eigen::Map<const EMat<S>> xm(x_cache.data.data(), t, i);
        Eigen::Map<EMat<S>> dxm(dx.data.data(), t, i);
        Eigen::Map<EMat<S>> dwm(w.grad.data.data(), o, i);
        dxm.noalias() = dym * wm;
        dwm.noalias() += dym.transpose() * xm;
        Eigen::Map<EVec<S>> dbv(b.grad.data.data(), o);
        dbv += dym.colwise().sum().transpose();
        count_flops(4ull * t * o * i);
        return dx;
    }

    void collect(std::vector<Param<S>*>& ps) {
        ps.push_back(&w);
        ps.push_back(&b);
    }
};

// 1-D convolution over [frames x channels] rows, valid padding. Weights are
// stored [C_out x K*C_in] so a frame is one gemv over the gathered patch.
template <typename S>
struct Conv1d {
    size_t c_in = 0, c_out = 0, kernel = 0, stride = 1;
    Param<S> w;  // [c_out, kernel*c_in]
    Param<S> b;  // [c_out]

    Tensor<S> x_cache;
    bool has_cache = false;

    void init(size_t cin, size_t cout, size_t k, size_t s, Rng& rng) {
        c_in = cin;
        c_out = cout;
        kernel = k;
        stride = s;
        w = Param<S>({cout, k * cin});
        b = Param<S>({cout});
        const double bound = 1.0 / std::sqrt(static_cast<double>(k * cin));
        for (auto& v : w.value.data) v = S(rng.uniform(-bound, bound));
    }

    size_t out_len(size_t l_in) const { return l_in < kernel ? 0 : (l_in - kernel) / stride + 1; }

    // Gathers the patch for output frame t from contiguous input rows.
    void gather_patch(const Tensor<S>& x, size_t t, S* patch) const {
        const size_t start = t * stride;
        for (size_t k = 0; k < kernel; ++k)
            std::copy_n(x.row_ptr(start + k), c_in, patch + k * c_in);
    }

    void forward_frame(const S* patch, S* y) const {
        CatScope cs(FlopCat::conv);
        linear_row(w.value.data.data(), b.value.data.data(), patch, y, kernel * c_in, c_out);
    }

    Tensor<S> forward(const Tensor<S>& x) {
        if (x.cols() != c_in) throw std::invalid_argument("conv1d: channel mismatch");
        const size_t lo = out_len(x.rows());
        if (lo == 0) throw std::runtime_error("conv1d: input shorter than one output frame");
        Tensor<S> y({lo, c_out});
        std::vector<S> patch(kernel * c_in);
        for (size_t t = 0; t < lo; ++t) {
            gather_patch(x, t, patch.data());
            forward_frame(patch.data(), y.row_ptr(t));
        }
        x_cache = x;
        has_cache = true;
        check_finite(y, "conv1d");
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) {
        if (!has_cache) throw std::runtime_error("conv1d: backward before forward");
        const size_t lo = dy.rows(), kc = kernel * c_in;
        // Rebuild the patch matrix, then dW and dP are two gemms.
        Tensor<S> patches({lo, kc});
        for (size_t t = 0; t < lo; ++t) gather_patch(x_cache, t, patches.row_ptr(t));
        Eigen::Map<const EMat<S>> dym(dy.data.data(), lo, c_out);
        Eigen::Map<const EMat<S>> pm(patches.data.data(), lo, kc);
        Eigen::Map<EMat<S>> dwm(w.grad.data.data(), c_out, kc);
        dwm.noalias() += dym.transpose() * pm;
        Tensor<S> dpatches({lo, kc});
        Eigen::Map<EMat<S>> dpm(dpatches.data.data(), lo, kc);
        Eigen::Map<const EMat<S>> wm(w.value.data.data(), c_out, kc);
        dpm.noalias() = dym * wm;
        Eigen::Map<EVec<S>> dbv(b.grad.data.data(), c_out);
        dbv += dym.colwise().sum().transpose();
        count_flops(4ull * lo * c_out * kc);
        Tensor<S> dx({x_cache.rows(), c_in});
        for (size_t t = 0; t < lo; ++t) {
            const size_t start = t * stride;
            for (size_t k = 0; k < kernel; ++k) {
                S* dst = dx.row_ptr(start + k);
                const S* src = dpatches.row_ptr(t) + k * c_in;
                for (size_t c = 0; c < c_in; ++c) dst[c] += src[c];
            }
        }
        return dx;
    }

    void collect(std::vector<Param<S>*>& ps) {
        ps.push_back(&w);
        ps.push_back(&b);
    }
};

// Depthwise causal conv used as the positional encoding. Output frame t
// taps input frames t-K+1..t; indices before the start replicate frame 0,
// so a constant input stays constant and no future frame is needed.
template <typename S>
struct DepthwiseCausalConv {
    size_t channels = 0, kernel = 0;
    Param<S> w;  // [channels, kernel], w[c][j] taps frame t-K+1+j
    Param<S> b;  // [channels]

    Tensor<S> x_cache;
    bool has_cache = false;

    void init(size_t c, size_t k, Rng& rng) {
        channels = c;
        kernel = k;
        w = Param<S>({c, k});
        b = Param<S>({c});
        const double bound = 1.0 / std::sqrt(static_cast<double>(k));
        for (auto& v : w.value.data) v = S(rng.uniform(-bound, bound));
    }

    // taps[j] points at the row for input index clamp(t-K+1+j, 0).
    void forward_frame(const S* const* taps, S* y) const {
        for (size_t c = 0; c < channels; ++c) {
            S acc = b.value.data[c];
            const S* wc = w.value.row_ptr(c);
            for (size_t j = 0; j < kernel; ++j) acc += wc[j] * taps[j][c];
            y[c] = acc;
        }
        count_flops(FlopCat::conv, 2ull * channels * kernel);
    }

    Tensor<S> forward(const Tensor<S>& x) {
        if (x.cols() != channels) throw std::invalid_argument("posconv: channel mismatch");
        const size_t t_len = x.rows();
        Tensor<S> y({t_len, channels});
        std::vector<const S*> taps(kernel);
        for (size_t t = 0; t < t_len; ++t) {
            for (size_t j = 0; j < kernel; ++j) {
                const long idx = static_cast<long>(t) - static_cast<long>(kernel) + 1 +
                                 static_cast<long>(j);
                taps[j] = x.row_ptr(idx < 0 ? 0 : static_cast<size_t>(idx));
            }
            forward_frame(taps.data(), y.row_ptr(t));
        }
        x_cache = x;
        has_cache = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) {
        if (!has_cache) throw std::runtime_error("posconv: backward before forward");
        const size_t t_len = dy.rows();
        Tensor<S> dx({t_len, channels});
        for (size_t t = 0; t < t_len; ++t) {
            const S* dyr = dy.row_ptr(t);
            for (size_t j = 0; j < kernel; ++j) {
                const long raw = static_cast<long>(t) - static_cast<long>(kernel) + 1 +
                                 static_cast<long>(j);
                const size_t idx = raw < 0 ? 0 : static_cast<size_t>(raw);
                const S* xr = x_cache.row_ptr(idx);
                S* dxr = dx.row_ptr(idx);
                for (size_t c = 0; c < channels; ++c) {
                    w.grad.at(c, j) += dyr[c] * xr[c];
                    dxr[c] += dyr[c] * w.value.at(c, j);
                }
            }
            for (size_t c = 0; c < channels; ++c) b.grad.data[c] += dyr[c];
        }
        return dx;
    }

    void collect(std::vector<Param<S>*>& ps) {
        ps.push_back(&w);
        ps.push_back(&b);
    }
};

template <typename S>
struct LayerNormLayer {
    Param<S> gain;
    Param<S> bias;
    S eps = S(1e-5);

    Tensor<S> xhat_cache;
    std::vector<S> inv_std_cache;
    bool has_cache = false;

    void init(size_t d) {
        gain = Param<S>({d});
        bias = Param<S>({d});
        gain.value.fill(S(1));
    }

    size_t dim() const { return gain.value.size(); }

    void forward_row(const S* x, S* y, S* xhat = nullptr, S* inv_std = nullptr) const {
        layernorm_row(x, gain.value.data.data(), bias.value.data.data(), y, dim(), eps, xhat,
                      inv_std);
    }

    Tensor<S> forward(const Tensor<S>& x) {
        const size_t d = dim(), rows = x.rows();
        if (x.cols() != d) throw std::invalid_argument("layernorm: dim mismatch");
        Tensor<S> y({rows, d});
        xhat_cache = Tensor<S>({rows, d});
        inv_std_cache.assign(rows, S(0));
        for (size_t r = 0; r < rows; ++r)
            forward_row(x.row_ptr(r), y.row_ptr(r), xhat_cache.row_ptr(r), &inv_std_cache[r]);
        has_cache = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) {
        if (!has_cache) throw std::runtime_error("layernorm: backward before forward");
        const size_t d = dim(), rows = dy.rows();
        Tensor<S> dx({rows, d});
        for (size_t r = 0; r < rows; ++r) {
            const S* dyr = dy.row_ptr(r);
            const S* xh = xhat_cache.row_ptr(r);
            S* dxr = dx.row_ptr(r);
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (size_t i = 0; i < d; ++i) {
                const double dxh = static_cast<double>(dyr[i]) * gain.value.data[i];
                sum_dxhat += dxh;
                sum_dxhat_xhat += dxh * xh[i];
                gain.grad.data[i] += dyr[i] * xh[i];
                bias.grad.data[i] += dyr[i];
            }
            const double inv_d = 1.0 / static_cast<double>(d);
            for (size_t i = 0; i < d; ++i) {
                const double dxh = static_cast<double>(dyr[i]) * gain.value.data[i];
                dxr[i] = S(inv_std_cache[r] *
                           (dxh - inv_d * sum_dxhat - xh[i] * inv_d * sum_dxhat_xhat));
            }
        }
        return dx;
    }

    void collect(std::vector<Param<S>*>& ps) {
        ps.push_back(&gain);
        ps.push_back(&bias);
    }
};

// Elementwise GELU with cached input.
template <typename S>
struct Gelu {
    Tensor<S> x_cache;
    bool has_cache = false;

    void forward_row(const S* x, S* y, size_t n) const {
        for (size_t i = 0; i < n; ++i) y[i] = gelu_value(x[i]);
    }

    Tensor<S> forward(const Tensor<S>& x) {
        Tensor<S> y(x.dims);
        forward_row(x.data.data(), y.data.data(), x.size());
        x_cache = x;
        has_cache = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) {
        if (!has_cache) throw std::runtime_error("gelu: backward before forward");
        Tensor<S> dx(dy.dims);
        for (size_t i = 0; i < dy.size(); ++i)
            dx.data[i] = dy.data[i] * gelu_derivative(x_cache.data[i]);
        return dx;
    }
};

// Mean frame-level cross entropy. Returns the summed loss divided by `norm`
// (the batch frame budget); dlogits carries the same normalization.
template <typename S>
S cross_entropy_backward(const Tensor<S>& logits, const std::vector<int32_t>& targets,
                         double norm, Tensor<S>* dlogits) {
    const size_t t_len = logits.rows(), v = logits.cols();
    if (targets.size() != t_len)
        throw std::invalid_argument("cross_entropy: target length mismatch");
    if (dlogits) *dlogits = Tensor<S>({t_len, v});
    double loss = 0.0;
    std::vector<S> p(v);
    for (size_t t = 0; t < t_len; ++t) {
        const S* z = logits.row_ptr(t);
        const int32_t tgt = targets[t];
        if (tgt < 0 || static_cast<size_t>(tgt) >= v)
            throw std::invalid_argument("cross_entropy: target id out of range");
        S m = z[0];
        for (size_t i = 1; i < v; ++i) m = std::max(m, z[i]);
        double sum = 0.0;
        for (size_t i = 0; i < v; ++i) {
            p[i] = std::exp(z[i] - m);
            sum += static_cast<double>(p[i]);
        }
        loss += std::log(sum) + static_cast<double>(m) - static_cast<double>(z[tgt]);
        if (dlogits) {
            S* dz = dlogits->row_ptr(t);
            const S inv = S(1.0 / sum);
            for (size_t i = 0; i < v; ++i) dz[i] = p[i] * inv / S(norm);
            dz[tgt] -= S(1.0 / norm);
        }
    }
    if (!std::isfinite(loss)) throw std::runtime_error("cross_entropy: non-finite loss");
    return S(loss / norm);
}

template <typename S>
S cross_entropy(const Tensor<S>& logits, const std::vector<int32_t>& targets) {
    return cross_entropy_backward<S>(logits, targets, static_cast<double>(targets.size()),
                                     nullptr);
}

// One decoupled-weight-decay Adam step on a parameter.
struct AdamConfig {
    double lr = 1e-4;
    double weight_decay = 1e-6;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename S>
void adamw_step(Param<S>& p, const AdamConfig& cfg, int64_t t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (size_t i = 0; i < p.value.size(); ++i) {
        const double g = static_cast<double>(p.grad.data[i]);
        double m = static_cast<double>(p.adam_m.data[i]);
        double v = static_cast<double>(p.adam_v.data[i]);
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        p.adam_m.data[i] = S(m);
        p.adam_v.data[i] = S(v);
        double val = static_cast<double>(p.value.data[i]);
        val -= cfg.lr * cfg.weight_decay * val;
        val -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
        if (!std::isfinite(val)) throw std::runtime_error("adamw: non-finite parameter");
        p.value.data[i] = S(val);
    }
}

// Softmax-normalized scalar weight vector (the learnable layer weights).
template <typename S>
std::vector<S> softmax_weights(const Tensor<S>& logits) {
    std::vector<S> w(logits.data.begin(), logits.data.end());
    softmax_row(w.data(), w.size());
    return w;
}

// Backward through softmax for a scalar weight vector: given dL/dw returns
// dL/dlogits.
template <typename S>
std::vector<S> softmax_weights_backward(const std::vector<S>& w, const std::vector<S>& dw) {
    double dot = 0.0;
    for (size_t i = 0; i < w.size(); ++i) dot += static_cast<double>(w[i]) * dw[i];
    std::vector<S> dl(w.size());
    for (size_t i = 0; i < w.size(); ++i) dl[i] = S(w[i] * (dw[i] - S(dot)));
    return dl;
}

}  // namespace dsu
