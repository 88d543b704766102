#pragma once

#include <array>
#include <cstdint>

namespace dsu {

// Runtime FLOP instrumentation. Kernels report 2*m*k*n (or the conv
// equivalent) into the category currently in scope; the analytical cost
// model is checked against these counts in tests. Elementwise work
// (softmax, norms, activations) is not counted, matching the model.
enum class FlopCat : int {
    conv = 0,
    proj,
    ffn,
    attn_score,
    attn_ctx,
    head,
    other,
    kCount,
};

struct FlopCounter {
    std::array<uint64_t, static_cast<size_t>(FlopCat::kCount)> by_cat{};

    uint64_t total() const {
        uint64_t s = 0;
        for (uint64_t v : by_cat) s += v;
        return s;
    }
    uint64_t get(FlopCat c) const { return by_cat[static_cast<size_t>(c)]; }
    void reset() { by_cat.fill(0); }
};

namespace detail {
inline thread_local FlopCounter* g_counter = nullptr;
inline thread_local FlopCat g_cat = FlopCat::other;
}  // namespace detail

inline void count_flops(uint64_t n) {
    if (detail::g_counter)
        detail::g_counter->by_cat[static_cast<size_t>(detail::g_cat)] += n;
}

inline void count_flops(FlopCat c, uint64_t n) {
    if (detail::g_counter) detail::g_counter->by_cat[static_cast<size_t>(c)] += n;
}

// Installs a counter for the current thread for the scope's lifetime.
class FlopScope {
public:
    explicit FlopScope(FlopCounter& c) : prev_(detail::g_counter) { detail::g_counter = &c; }
    ~FlopScope() { detail::g_counter = prev_; }
    FlopScope(const FlopScope&) = delete;
    FlopScope& operator=(const FlopScope&) = delete;

private:
    FlopCounter* prev_;
};

// Selects the category new counts land in.
class CatScope {
public:
    explicit CatScope(FlopCat c) : prev_(detail::g_cat) { detail::g_cat = c; }
    ~CatScope() { detail::g_cat = prev_; }
    CatScope(const CatScope&) = delete;
    CatScope& operator=(const CatScope&) = delete;

private:
    FlopCat prev_;
};

}  // namespace dsu
