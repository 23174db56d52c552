#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/intset.hpp"

namespace dlab {

/// Multiplicity map of a pairwise operation: for every attainable value, the
/// number of ordered pairs producing it. Entries are sorted by value and the
/// counts always sum to |u|·|w|.
struct RepCounts {
    std::vector<std::pair<std::int64_t, std::int64_t>> entries;

    std::int64_t count_of(std::int64_t value) const {
        const auto it = std::lower_bound(
            entries.begin(), entries.end(), value,
            [](const auto& e, std::int64_t v) { return e.first < v; });
        if (it == entries.end() || it->first != value) return 0;
        return it->second;
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& e : entries) t += e.second;
        return t;
    }
};

enum class EnergyAlgo { automatic, naive, convolution };

namespace detail {

/// Number-theoretic transform modulo 998244353 (primitive root 3). The prime
/// supports power-of-two lengths up to 2^23, and representation counts are
/// far below the modulus at every admissible input size, so the lifted
/// convolution coefficients are exact integers, not just residues.
namespace ntt {

inline constexpr std::uint64_t kMod = 998244353;
inline constexpr std::uint64_t kRoot = 3;
inline constexpr std::size_t kMaxLength = std::size_t{1} << 23;

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t acc = 1;
    base %= kMod;
    while (exp) {
        if (exp & 1) acc = acc * base % kMod;
        base = base * base % kMod;
        exp >>= 1;
    }
    return acc;
}

inline void transform(std::vector<std::uint64_t>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::uint64_t w = pow_mod(kRoot, (kMod - 1) / len);
        if (inverse) w = pow_mod(w, kMod - 2);
        for (std::size_t i = 0; i < n; i += len) {
            std::uint64_t cur = 1;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::uint64_t even = a[i + k];
                const std::uint64_t odd = a[i + k + len / 2] * cur % kMod;
                a[i + k] = even + odd < kMod ? even + odd : even + odd - kMod;
                a[i + k + len / 2] = even >= odd ? even - odd : even + kMod - odd;
                cur = cur * w % kMod;
            }
        }
    }
    if (inverse) {
        const std::uint64_t inv_n = pow_mod(n % kMod, kMod - 2);
        for (auto& x : a) x = x * inv_n % kMod;
    }
}

/// Self-convolution of a 0/1 indicator vector.
inline std::vector<std::uint64_t> square(const std::vector<std::uint64_t>& f) {
    std::size_t n = 1;
    while (n < 2 * f.size()) n <<= 1;
    if (n > kMaxLength) throw TooLarge("convolution length exceeds transform limit");
    std::vector<std::uint64_t> a(f);
    a.resize(n, 0);
    transform(a, false);
    for (auto& x : a) x = x * x % kMod;
    transform(a, true);
    a.resize(2 * f.size() - 1);
    return a;
}

}  // namespace ntt

inline std::int64_t sum_of_squares(const std::vector<std::pair<std::int64_t, std::int64_t>>& m) {
    int128 acc = 0;
    for (const auto& e : m) acc += int128(e.second) * e.second;
    if (acc > int128(std::numeric_limits<std::int64_t>::max()))
        throw ArithmeticOverflow("energy exceeds the 64-bit result range");
    return static_cast<std::int64_t>(acc);
}

inline RepCounts rep_counts_hashed(const IntSet& u, const IntSet& w, OpKind kind) {
    std::unordered_map<std::int64_t, std::int64_t> m;
    m.reserve(std::min<std::size_t>(u.size() * w.size(), std::size_t{1} << 22));
    for (std::int64_t a : u)
        for (std::int64_t b : w)
            ++m[kind == OpKind::add ? detail::checked_sum(a, b) : detail::checked_prod(a, b)];
    RepCounts rc;
    rc.entries.assign(m.begin(), m.end());
    std::sort(rc.entries.begin(), rc.entries.end());
    return rc;
}

/// Additive energy via indicator self-convolution over the value range.
inline std::int64_t energy_convolution(const IntSet& u) {
    if (u.empty()) return 0;
    const std::uint64_t range = static_cast<std::uint64_t>(u.max() - u.min());
    if (range + 1 > ntt::kMaxLength / 2)
        throw TooLarge("energy: value range too wide for the convolution path");
    std::vector<std::uint64_t> f(static_cast<std::size_t>(range) + 1, 0);
    for (std::int64_t v : u) f[static_cast<std::size_t>(v - u.min())] = 1;
    // Tiny ranges are cheaper without transforms.
    std::vector<std::uint64_t> conv;
    if (f.size() <= 64) {
        conv.assign(2 * f.size() - 1, 0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!f[i]) continue;
            for (std::size_t j = 0; j < f.size(); ++j)
                if (f[j]) ++conv[i + j];
        }
    } else {
        conv = ntt::square(f);
    }
    int128 acc = 0;
    for (std::uint64_t r : conv) acc += int128(r) * r;
    if (acc > int128(std::numeric_limits<std::int64_t>::max()))
        throw ArithmeticOverflow("energy exceeds the 64-bit result range");
    return static_cast<std::int64_t>(acc);
}

}  // namespace detail

/// Exact multiplicity map of {a∘b : a in u, b in w}.
inline RepCounts representation_counts(const IntSet& u, const IntSet& w, OpKind kind) {
    return detail::rep_counts_hashed(u, w, kind);
}

/// Energy of u under the given operation: the number of quadruples
/// (a1, a2, a3, a4) with a1∘a2 = a3∘a4, i.e. the sum of squared
/// representation counts.
///
/// The automatic policy takes the convolution path when the operation is
/// additive and the value range is at most 64·|u|² (and within the transform
/// length limit); otherwise it enumerates pairs into a hash map. All paths
/// agree exactly.
inline std::int64_t energy(const IntSet& u, OpKind kind,
                           EnergyAlgo algo = EnergyAlgo::automatic) {
    if (algo == EnergyAlgo::convolution && kind != OpKind::mul) {
        return detail::energy_convolution(u);
    }
    if (algo == EnergyAlgo::convolution)
        throw std::invalid_argument("energy: convolution applies to the additive kind only");
    if (algo == EnergyAlgo::automatic && kind == OpKind::add && !u.empty()) {
        const uint128 range = uint128(int128(u.max()) - int128(u.min()));
        const uint128 n = u.size();
        if (range <= 64 * n * n && range + 1 <= detail::ntt::kMaxLength / 2)
            return detail::energy_convolution(u);
    }
    return detail::sum_of_squares(detail::rep_counts_hashed(u, u, kind).entries);
}

/// Quadruple-counting oracle: compares every ordered pair of pairs directly.
/// Guarded at |u| <= 512.
inline std::int64_t energy_bruteforce(const IntSet& u, OpKind kind) {
    if (u.size() > 512)
        throw std::invalid_argument("energy_bruteforce: set larger than the 512-element guard");
    const auto& v = u.values();
    const std::size_t n = v.size();
    std::vector<std::int64_t> pair_values;
    pair_values.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            pair_values.push_back(kind == OpKind::add ? detail::checked_sum(v[a], v[b])
                                                      : detail::checked_prod(v[a], v[b]));
    std::int64_t count = 0;
    for (std::int64_t x : pair_values)
        for (std::int64_t y : pair_values)
            if (x == y) ++count;
    return count;
}

}  // namespace dlab
