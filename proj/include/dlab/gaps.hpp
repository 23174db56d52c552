#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/intset.hpp"

namespace dlab {

/// Generalized arithmetic progression
///   { base + d_1 x_1 + ... + d_k x_k : 0 <= x_i <= L_i }.
/// Side i contributes L_i + 1 lattice points; the progression is proper when
/// all nominal points evaluate to distinct integers.
struct Gap {
    std::int64_t base = 0;
    std::vector<std::int64_t> diffs;  // nonzero
    std::vector<std::int64_t> lens;   // nonnegative

    Gap(std::int64_t base_, std::vector<std::int64_t> diffs_, std::vector<std::int64_t> lens_)
        : base(base_), diffs(std::move(diffs_)), lens(std::move(lens_)) {
        if (diffs.empty()) throw std::invalid_argument("Gap: rank must be at least 1");
        if (diffs.size() != lens.size())
            throw std::invalid_argument("Gap: differences and side lengths must align");
        for (std::int64_t d : diffs)
            if (d == 0) throw std::invalid_argument("Gap: zero difference");
        for (std::int64_t l : lens)
            if (l < 0) throw std::invalid_argument("Gap: negative side length");
        detail::check_magnitude(base, "Gap base");
        for (std::int64_t d : diffs) detail::check_magnitude(d, "Gap difference");
    }

    std::size_t rank() const { return diffs.size(); }

    /// Saturates just above the 64-bit range; anything that large only ever
    /// meets a guard comparison.
    int128 nominal_size_wide() const {
        const int128 cap = int128(INT64_MAX) + 1;
        int128 n = 1;
        for (std::int64_t l : lens) {
            n *= int128(l) + 1;
            if (n >= cap) return cap;
        }
        return n;
    }

    /// Product of (L_i + 1); the element count when proper.
    std::int64_t nominal_size() const {
        const int128 n = nominal_size_wide();
        if (n > int128(INT64_MAX)) throw TooLarge("Gap: nominal size exceeds 64-bit range");
        return static_cast<std::int64_t>(n);
    }

    /// Product of the L_i.
    std::int64_t volume() const {
        int128 v = 1;
        for (std::int64_t l : lens) {
            if (l != 0 && v > (int128(INT64_MAX) + 1) / l)
                throw TooLarge("Gap: volume exceeds 64-bit range");
            v *= int128(l);
            if (v > int128(INT64_MAX)) throw TooLarge("Gap: volume exceeds 64-bit range");
        }
        return static_cast<std::int64_t>(v);
    }
};

inline constexpr std::int64_t kGapEnumerationGuard = 100000000;  // 10^8 points

namespace detail {

inline void check_enumeration_guard(const Gap& p) {
    if (p.nominal_size_wide() > int128(kGapEnumerationGuard))
        throw TooLarge("Gap enumeration guard exceeded (nominal size > 10^8)");
}

inline int128 floor_div(int128 a, int128 b) {
    int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline int128 ceil_div(int128 a, int128 b) {
    int128 q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

/// Extended Euclid on int64 inputs; returns (g, u, v) with a·u + b·v = g > 0.
inline std::tuple<int128, int128, int128> ext_gcd(int128 a, int128 b) {
    int128 old_r = a, r = b;
    int128 old_u = 1, u = 0;
    int128 old_v = 0, v = 1;
    while (r != 0) {
        const int128 q = old_r / r;
        std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
        std::tie(old_u, u) = std::make_tuple(u, old_u - q * u);
        std::tie(old_v, v) = std::make_tuple(v, old_v - q * v);
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_u = -old_u;
        old_v = -old_v;
    }
    return {old_r, old_u, old_v};
}

/// Enumerates raw (unsorted, undeduplicated) values of a Gap.
inline std::vector<std::int64_t> enumerate_gap_values(const Gap& p) {
    check_enumeration_guard(p);
    const std::size_t k = p.rank();
    std::vector<std::int64_t> coord(k, 0);
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(p.nominal_size()));
    int128 value = p.base;
    for (;;) {
        if (value >= int128(kMaxMagnitude) || value <= -int128(kMaxMagnitude))
            throw ArithmeticOverflow("Gap element exceeds magnitude bound 2^62");
        out.push_back(static_cast<std::int64_t>(value));
        std::size_t i = 0;
        while (i < k && coord[i] == p.lens[i]) {
            value -= int128(p.diffs[i]) * p.lens[i];
            coord[i] = 0;
            ++i;
        }
        if (i == k) break;
        ++coord[i];
        value += p.diffs[i];
    }
    return out;
}

}  // namespace detail

/// All attained values as a set (deduplicated).
inline IntSet gap_elements(const Gap& p) {
    return IntSet(detail::enumerate_gap_values(p));
}

/// True iff the element count equals the nominal point count. Rank-1
/// progressions are proper by construction (nonzero difference).
inline bool is_proper(const Gap& p) {
    if (p.rank() == 1) return true;
    detail::check_enumeration_guard(p);
    return static_cast<int128>(gap_elements(p).size()) == p.nominal_size_wide();
}

struct LongestSide {
    std::size_t index = 0;        // 0-based side index
    std::int64_t side_points = 0; // L_index + 1
    std::int64_t diff = 0;        // d_index
};

/// Side with the most points; ties resolve to the smallest index.
inline LongestSide longest_side(const Gap& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.rank(); ++i)
        if (p.lens[i] > p.lens[best]) best = i;
    return {best, p.lens[best] + 1, p.diffs[best]};
}

namespace detail {

/// Box-constrained solvability of d1·x1 + d2·x2 = t with 0<=x1<=L1, 0<=x2<=L2.
inline bool rank2_representable(std::int64_t d1, std::int64_t L1, std::int64_t d2,
                                std::int64_t L2, int128 t) {
    const auto [g, u, v] = ext_gcd(d1, d2);
    if (t % g != 0) return false;
    const int128 scale = t / g;
    const int128 x1p = u * scale;
    const int128 x2p = v * scale;
    const int128 s1 = int128(d2) / g;  // x1 = x1p + s1·k
    const int128 s2 = int128(d1) / g;  // x2 = x2p - s2·k
    // Each box side yields an interval of admissible k.
    int128 klo = -(int128(1) << 126);
    int128 khi = (int128(1) << 126);
    auto intersect = [&](int128 step, int128 lo, int128 hi) {
        // lo <= step·k <= hi
        if (step > 0) {
            klo = std::max(klo, ceil_div(lo, step));
            khi = std::min(khi, floor_div(hi, step));
        } else if (step < 0) {
            klo = std::max(klo, ceil_div(hi, step));
            khi = std::min(khi, floor_div(lo, step));
        } else if (lo > 0 || hi < 0) {
            khi = klo - 1;
        }
    };
    intersect(s1, -x1p, int128(L1) - x1p);
    intersect(-s2, -x2p, int128(L2) - x2p);
    return klo <= khi;
}

}  // namespace detail

/// Membership test. Rank 1 and 2 use modular arithmetic on the coordinates;
/// higher ranks fall back to enumeration under the guard.
inline bool membership(const Gap& p, std::int64_t x) {
    const int128 t = int128(x) - p.base;
    if (p.rank() == 1) {
        const std::int64_t d = p.diffs[0];
        if (t % d != 0) return false;
        const int128 q = t / d;
        return q >= 0 && q <= p.lens[0];
    }
    if (p.rank() == 2)
        return detail::rank2_representable(p.diffs[0], p.lens[0], p.diffs[1], p.lens[1], t);
    return gap_elements(p).contains(x);
}

/// Minimal rank-1 progression containing u: base = min, difference = gcd of
/// consecutive gaps (1 for singletons), length spanning to max.
inline Gap cover_with_ap(const IntSet& u) {
    if (u.empty()) throw std::invalid_argument("cover_with_ap: empty set");
    if (u.size() == 1) return Gap(u.min(), {1}, {0});
    std::int64_t g = 0;
    for (std::size_t i = 1; i < u.size(); ++i) g = std::gcd(g, u[i] - u[i - 1]);
    return Gap(u.min(), {g}, {(u.max() - u.min()) / g});
}

namespace detail {

// Per-candidate work caps for the rank-2 cover search; the search is
// best-effort by contract, so candidates that would be expensive to evaluate
// are skipped rather than ground through.
inline constexpr std::int64_t kCoverMaxSidePoints = 4096;
inline constexpr std::int64_t kCoverMaxNominal = 1000000;

/// Smallest-nominal proper rank-2 cover of u with the given differences, if
/// one fits inside the work caps.
inline std::optional<Gap> try_rank2_cover(const IntSet& u, std::int64_t d1, std::int64_t d2) {
    const std::int64_t base = u.min();
    const std::int64_t range = u.max() - base;
    const std::int64_t l1_cap = std::min(range / d1, kCoverMaxSidePoints - 1);
    const auto [g128, uu, vv] = ext_gcd(d1, d2);
    const std::int64_t g = static_cast<std::int64_t>(g128);
    const std::int64_t step2 = d1 / g;  // spacing of valid x2 per target
    const std::int64_t step1 = d2 / g;  // matching decrease of x1
    // For each element precompute its representation chain anchor: the
    // (x1, x2) with minimal x2 >= 0.
    struct Anchor {
        std::int64_t x1_at_min_x2;
        std::int64_t min_x2;
    };
    std::vector<Anchor> anchors;
    anchors.reserve(u.size());
    for (std::int64_t x : u) {
        const std::int64_t t = x - base;
        if (t % g != 0) return std::nullopt;
        // minimal x2 >= 0 with d2·x2 <= t and d1 | (t - d2·x2)
        bool found = false;
        for (std::int64_t x2 = 0;
             x2 < std::min(step2, kCoverMaxSidePoints) && int128(d2) * x2 <= t; ++x2) {
            const std::int64_t rem = t - d2 * x2;
            if (rem % d1 == 0) {
                anchors.push_back({rem / d1, x2});
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    std::optional<Gap> best;
    int128 best_nominal = int128(kCoverMaxNominal) + 1;
    for (std::int64_t L1 = 0; L1 <= l1_cap; ++L1) {
        if (int128(L1) + 1 >= best_nominal) break;
        std::int64_t need_l2 = 0;
        bool feasible = true;
        for (const Anchor& a : anchors) {
            std::int64_t x1 = a.x1_at_min_x2;
            std::int64_t x2 = a.min_x2;
            if (x1 > L1) {
                const std::int64_t k = (x1 - L1 + step1 - 1) / step1;
                x1 -= k * step1;
                x2 += k * step2;
                if (x1 < 0) {
                    feasible = false;
                    break;
                }
            }
            need_l2 = std::max(need_l2, x2);
        }
        if (!feasible) continue;
        const int128 nominal = (int128(L1) + 1) * (int128(need_l2) + 1);
        if (nominal >= best_nominal) continue;
        const Gap candidate(base, {d1, d2}, {L1, need_l2});
        if (candidate.nominal_size_wide() > int128(kCoverMaxNominal)) continue;
        if (!is_proper(candidate)) continue;
        best = candidate;
        best_nominal = nominal;
    }
    return best;
}

}  // namespace detail

/// Best-effort proper rank-2 cover. Candidate difference pairs are drawn from
/// the pairwise differences of u in deterministic order (increasing value;
/// pairs lexicographic), at most `budget` pairs are tried, and the
/// smallest-nominal-size proper cover found is returned.
inline std::optional<Gap> cover_with_gap_rank2(const IntSet& u, std::int64_t budget) {
    if (budget <= 0) throw std::invalid_argument("cover_with_gap_rank2: budget must be positive");
    if (u.size() < 2)
        throw std::invalid_argument("cover_with_gap_rank2: need at least two elements");
    std::vector<std::int64_t> diffs;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j)
            diffs.push_back(detail::checked_diff(u[j], u[i]));
    std::sort(diffs.begin(), diffs.end());
    diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

    std::optional<Gap> best;
    int128 best_nominal = 0;
    std::int64_t tried = 0;
    for (std::size_t i = 0; i < diffs.size() && tried < budget; ++i) {
        for (std::size_t j = i + 1; j < diffs.size() && tried < budget; ++j) {
            ++tried;
            const auto cand = detail::try_rank2_cover(u, diffs[i], diffs[j]);
            if (!cand) continue;
            const int128 nominal = cand->nominal_size_wide();
            if (!best || nominal < best_nominal) {
                best = cand;
                best_nominal = nominal;
            }
        }
    }
    return best;
}

/// Parses the textual form "base;d1:L1,d2:L2,...".
inline Gap parse_gap(const std::string& text) {
    const auto bad = [&](const std::string& token) {
        throw ParseError("Gap descriptor: cannot parse token '" + token + "' in \"" + text + "\"");
    };
    const auto to_int = [&](const std::string& token) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(token, &pos);
            if (pos != token.size()) bad(token);
            return static_cast<std::int64_t>(v);
        } catch (const ParseError&) {
            throw;
        } catch (...) {
            bad(token);
        }
        return std::int64_t{0};
    };
    const std::size_t semi = text.find(';');
    if (semi == std::string::npos) throw ParseError("Gap descriptor: missing ';' in \"" + text + "\"");
    const std::int64_t base = to_int(text.substr(0, semi));
    std::vector<std::int64_t> diffs;
    std::vector<std::int64_t> lens;
    std::size_t pos = semi + 1;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string part = text.substr(pos, comma - pos);
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) bad(part);
        diffs.push_back(to_int(part.substr(0, colon)));
        lens.push_back(to_int(part.substr(colon + 1)));
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return Gap(base, std::move(diffs), std::move(lens));
}

inline std::string format_gap(const Gap& p) {
    std::string s = std::to_string(p.base) + ";";
    for (std::size_t i = 0; i < p.rank(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.diffs[i]) + ":" + std::to_string(p.lens[i]);
    }
    return s;
}

}  // namespace dlab
