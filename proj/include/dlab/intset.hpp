#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dlab/bipartite_graph.hpp"
#include "dlab/errors.hpp"
#include "dlab/rational.hpp"

namespace dlab {

/// Largest admissible element magnitude (exclusive). Keeping elements below
/// 2^62 means any pairwise sum fits in int64 and any pairwise product fits in
/// 128 bits, so every operation can check the bound before narrowing.
inline constexpr std::int64_t kMaxMagnitude = std::int64_t{1} << 62;

namespace detail {

inline void check_magnitude(std::int64_t v, const char* what) {
    if (v >= kMaxMagnitude || v <= -kMaxMagnitude)
        throw ArithmeticOverflow(std::string(what) + ": value " + std::to_string(v) +
                                 " exceeds magnitude bound 2^62");
}

inline std::int64_t checked_sum(std::int64_t a, std::int64_t b) {
    const std::int64_t s = a + b;  // |a|,|b| < 2^62, no int64 wrap possible
    if (s >= kMaxMagnitude || s <= -kMaxMagnitude)
        throw ArithmeticOverflow("sum " + std::to_string(a) + " + " + std::to_string(b) +
                                 " exceeds magnitude bound 2^62");
    return s;
}

inline std::int64_t checked_diff(std::int64_t a, std::int64_t b) {
    const std::int64_t d = a - b;
    if (d >= kMaxMagnitude || d <= -kMaxMagnitude)
        throw ArithmeticOverflow("difference " + std::to_string(a) + " - " + std::to_string(b) +
                                 " exceeds magnitude bound 2^62");
    return d;
}

inline std::int64_t checked_prod(std::int64_t a, std::int64_t b) {
    const int128 p = int128(a) * int128(b);
    if (p >= int128(kMaxMagnitude) || p <= -int128(kMaxMagnitude))
        throw ArithmeticOverflow("product " + std::to_string(a) + " * " + std::to_string(b) +
                                 " exceeds magnitude bound 2^62");
    return static_cast<std::int64_t>(p);
}

}  // namespace detail

/// Finite set of signed integers, stored strictly increasing. Values are
/// immutable after construction; all set operations return fresh sets.
class IntSet {
  public:
    IntSet() = default;

    /// Sorts, deduplicates and bound-checks the input.
    explicit IntSet(std::vector<std::int64_t> values) : elems_(std::move(values)) {
        std::sort(elems_.begin(), elems_.end());
        elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
        for (std::int64_t v : elems_) detail::check_magnitude(v, "IntSet element");
    }

    IntSet(std::initializer_list<std::int64_t> values)
        : IntSet(std::vector<std::int64_t>(values)) {}

    /// The integer interval [lo, hi]; empty when lo > hi.
    static IntSet interval(std::int64_t lo, std::int64_t hi) {
        IntSet s;
        if (lo > hi) return s;
        detail::check_magnitude(lo, "interval endpoint");
        detail::check_magnitude(hi, "interval endpoint");
        s.elems_.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t v = lo; v <= hi; ++v) s.elems_.push_back(v);
        return s;
    }

    /// Adopts a vector that is already strictly increasing and bound-checked.
    static IntSet from_sorted_unique(std::vector<std::int64_t> values) {
        IntSet s;
        s.elems_ = std::move(values);
        return s;
    }

    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    std::int64_t operator[](std::size_t i) const { return elems_[i]; }
    const std::vector<std::int64_t>& values() const { return elems_; }
    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

    std::int64_t min() const { return elems_.front(); }
    std::int64_t max() const { return elems_.back(); }

    bool contains(std::int64_t v) const {
        return std::binary_search(elems_.begin(), elems_.end(), v);
    }

    /// Index of a value, or -1 when absent.
    std::int64_t index_of(std::int64_t v) const {
        const auto it = std::lower_bound(elems_.begin(), elems_.end(), v);
        if (it == elems_.end() || *it != v) return -1;
        return it - elems_.begin();
    }

    friend bool operator==(const IntSet& a, const IntSet& b) { return a.elems_ == b.elems_; }
    friend bool operator!=(const IntSet& a, const IntSet& b) { return !(a == b); }

  private:
    std::vector<std::int64_t> elems_;
};

/// Polynomial-growth thresholds: a set qualifies when every |element| is
/// below c1 * |set|^c2.
struct GrowthParams {
    double c1 = 1.0;
    double c2 = 2.0;
};

/// {a + b : a in u, b in w}. Empty when either input is empty.
inline IntSet sumset(const IntSet& u, const IntSet& w) {
    std::vector<std::int64_t> out;
    out.reserve(u.size() * w.size());
    for (std::int64_t a : u)
        for (std::int64_t b : w) out.push_back(detail::checked_sum(a, b));
    return IntSet(std::move(out));
}

/// {a - b : a in u, b in w}.
inline IntSet difference_set(const IntSet& u, const IntSet& w) {
    std::vector<std::int64_t> out;
    out.reserve(u.size() * w.size());
    for (std::int64_t a : u)
        for (std::int64_t b : w) out.push_back(detail::checked_diff(a, b));
    return IntSet(std::move(out));
}

/// {a * b : a in u, b in w}.
inline IntSet product_set(const IntSet& u, const IntSet& w) {
    std::vector<std::int64_t> out;
    out.reserve(u.size() * w.size());
    for (std::int64_t a : u)
        for (std::int64_t b : w) out.push_back(detail::checked_prod(a, b));
    return IntSet(std::move(out));
}

/// m-fold iterated sumset of u; the 0-fold sumset is {0}.
inline IntSet iterated_sumset(const IntSet& u, std::int64_t m) {
    if (m < 0) throw std::invalid_argument("iterated_sumset: negative fold count");
    IntSet acc{0};
    for (std::int64_t i = 0; i < m; ++i) acc = sumset(acc, u);
    return acc;
}

/// mU - kU computed by repeated sumsets. Requires m + k >= 1.
inline IntSet iterated_sum_difference(const IntSet& u, std::int64_t m, std::int64_t k) {
    if (m < 0 || k < 0) throw std::invalid_argument("iterated_sum_difference: negative fold count");
    if (m + k < 1) throw std::invalid_argument("iterated_sum_difference: m + k must be >= 1");
    if (k == 0) return iterated_sumset(u, m);
    return difference_set(iterated_sumset(u, m), iterated_sumset(u, k));
}

/// Sumset restricted to the edges of a bipartite graph on (u, w):
/// { u[i] + w[j] : (i, j) in E(g) }.
inline IntSet restricted_sumset(const IntSet& u, const IntSet& w, const BipartiteGraph& g) {
    if (g.left_order() != static_cast<std::int64_t>(u.size()) ||
        g.right_order() != static_cast<std::int64_t>(w.size()))
        throw MalformedGraph("restricted_sumset: graph orders (" +
                             std::to_string(g.left_order()) + "," +
                             std::to_string(g.right_order()) + ") do not match set sizes (" +
                             std::to_string(u.size()) + "," + std::to_string(w.size()) + ")");
    std::vector<std::int64_t> out;
    out.reserve(g.edges().size());
    for (const auto& [i, j] : g.edges())
        out.push_back(detail::checked_sum(u[static_cast<std::size_t>(i)],
                                          w[static_cast<std::size_t>(j)]));
    return IntSet(std::move(out));
}

/// Product set restricted to the edges of a bipartite graph on (u, w).
inline IntSet restricted_product_set(const IntSet& u, const IntSet& w, const BipartiteGraph& g) {
    if (g.left_order() != static_cast<std::int64_t>(u.size()) ||
        g.right_order() != static_cast<std::int64_t>(w.size()))
        throw MalformedGraph("restricted_product_set: graph orders do not match set sizes");
    std::vector<std::int64_t> out;
    out.reserve(g.edges().size());
    for (const auto& [i, j] : g.edges())
        out.push_back(detail::checked_prod(u[static_cast<std::size_t>(i)],
                                           w[static_cast<std::size_t>(j)]));
    return IntSet(std::move(out));
}

enum class OpKind { add, mul };

/// |u∘u| / |u| as an exact rational. For multiplicative doubling the set must
/// not contain 0.
inline Rational doubling_ratio(const IntSet& u, OpKind kind) {
    if (u.empty()) throw std::invalid_argument("doubling_ratio: empty set");
    if (kind == OpKind::mul && u.contains(0))
        throw std::invalid_argument("doubling_ratio: multiplicative doubling undefined with 0");
    const IntSet uu = kind == OpKind::add ? sumset(u, u) : product_set(u, u);
    return Rational(static_cast<std::int64_t>(uu.size()), static_cast<std::int64_t>(u.size()));
}

/// True iff max |element| < c1 * |b|^c2.
inline bool check_polynomial_growth(const IntSet& b, const GrowthParams& params) {
    if (b.empty()) throw std::invalid_argument("check_polynomial_growth: empty set");
    if (params.c1 <= 0 || params.c2 <= 0)
        throw std::invalid_argument("check_polynomial_growth: thresholds must be positive");
    const std::int64_t lo = b.min() < 0 ? -b.min() : b.min();
    const std::int64_t hi = b.max() < 0 ? -b.max() : b.max();
    const std::int64_t mag = std::max(lo, hi);
    const long double bound =
        static_cast<long double>(params.c1) *
        std::pow(static_cast<long double>(b.size()), static_cast<long double>(params.c2));
    return static_cast<long double>(mag) < bound;
}

}  // namespace dlab
