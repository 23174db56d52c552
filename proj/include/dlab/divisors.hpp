#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/gaps.hpp"
#include "dlab/intset.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rng.hpp"

namespace dlab {

/// One prime power p^a <= N of the allowed prime universe.
struct PrimePowerEntry {
    std::int64_t prime;
    std::int32_t exponent;
    std::int64_t value;
};

/// The restricted prime-power universe: every p^a <= bound with p outside the
/// excluded set. Entries are sorted by value (ties by prime); the allowed
/// primes and the exclusions are kept alongside for membership queries.
struct PrimePowerTable {
    std::int64_t bound = 0;
    std::vector<PrimePowerEntry> entries;    // sorted by (value, prime)
    std::vector<std::int64_t> primes;        // allowed primes, ascending
    std::vector<std::int64_t> excluded;      // excluded primes, ascending

    bool is_allowed_prime(std::int64_t p) const {
        return std::binary_search(primes.begin(), primes.end(), p);
    }

    /// Number of powers of p admitted at level `level` (p, p², ... <= level).
    std::int32_t power_count(std::int64_t p, std::int64_t level) const {
        std::int32_t c = 0;
        int128 v = p;
        while (v <= level) {
            ++c;
            v *= p;
        }
        return c;
    }
};

inline constexpr std::int64_t kSieveBoundGuard = 1000000000;  // 10^9

/// Sieves all prime powers p^a <= n_bound with p not excluded.
inline PrimePowerTable sieve_prime_powers(std::int64_t n_bound,
                                          const std::vector<std::int64_t>& excluded = {}) {
    if (n_bound < 2 || n_bound > kSieveBoundGuard)
        throw std::invalid_argument("sieve_prime_powers: bound must lie in [2, 10^9]");
    std::vector<bool> composite(static_cast<std::size_t>(n_bound) + 1, false);
    PrimePowerTable table;
    table.bound = n_bound;
    table.excluded = excluded;
    std::sort(table.excluded.begin(), table.excluded.end());
    table.excluded.erase(std::unique(table.excluded.begin(), table.excluded.end()),
                         table.excluded.end());
    for (std::int64_t i = 2; i <= n_bound; ++i) {
        if (composite[static_cast<std::size_t>(i)]) continue;
        if (i <= n_bound / i)
            for (std::int64_t j = i * i; j <= n_bound; j += i)
                composite[static_cast<std::size_t>(j)] = true;
        if (std::binary_search(table.excluded.begin(), table.excluded.end(), i)) continue;
        table.primes.push_back(i);
        std::int32_t exp = 1;
        int128 v = i;
        while (v <= n_bound) {
            table.entries.push_back({i, exp, static_cast<std::int64_t>(v)});
            v *= i;
            ++exp;
        }
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const PrimePowerEntry& a, const PrimePowerEntry& b) {
                  return std::tie(a.value, a.prime) < std::tie(b.value, b.prime);
              });
    return table;
}

/// Filters the table to primes coprime to every listed difference and reports
/// how many table primes were newly excluded.
struct RestrictedPrimesResult {
    PrimePowerTable table;
    std::int64_t newly_excluded = 0;
};

inline RestrictedPrimesResult restricted_primes(const std::vector<std::int64_t>& diffs,
                                                const PrimePowerTable& table) {
    for (std::int64_t d : diffs)
        if (d == 0) throw std::invalid_argument("restricted_primes: zero difference");
    RestrictedPrimesResult res;
    res.table.bound = table.bound;
    res.table.excluded = table.excluded;
    for (std::int64_t p : table.primes) {
        bool divides = false;
        for (std::int64_t d : diffs)
            if (d % p == 0) {
                divides = true;
                break;
            }
        if (divides) {
            res.table.excluded.push_back(p);
            ++res.newly_excluded;
        } else {
            res.table.primes.push_back(p);
        }
    }
    std::sort(res.table.excluded.begin(), res.table.excluded.end());
    for (const PrimePowerEntry& e : table.entries)
        if (std::binary_search(res.table.primes.begin(), res.table.primes.end(), e.prime))
            res.table.entries.push_back(e);
    return res;
}

/// Table truncated to prime powers at most `level` (primes list unchanged).
inline PrimePowerTable truncate_table(const PrimePowerTable& table, std::int64_t level) {
    PrimePowerTable out;
    out.bound = std::min(table.bound, level);
    out.primes = table.primes;
    out.excluded = table.excluded;
    for (const PrimePowerEntry& e : table.entries)
        if (e.value <= level) out.entries.push_back(e);
    // Drop primes above the level so the prime list matches the entries.
    out.primes.erase(std::remove_if(out.primes.begin(), out.primes.end(),
                                    [&](std::int64_t p) { return p > level; }),
                     out.primes.end());
    return out;
}

/// Number of table prime powers dividing x. Counts entries, so a prime p with
/// p^e | x contributes min(e, #powers of p in the table).
inline std::int64_t omega_restricted(std::int64_t x, const PrimePowerTable& table) {
    if (x <= 0) throw std::invalid_argument("omega_restricted: argument must be positive");
    std::int64_t count = 0;
    std::int64_t rest = x;
    // Divide out excluded primes first so the leftover test below stays valid.
    for (std::int64_t p : table.excluded) {
        if (p > rest) break;
        while (rest % p == 0) rest /= p;
    }
    for (std::int64_t p : table.primes) {
        if (p > table.bound) break;
        if (int128(p) * p > rest) break;
        if (rest % p) continue;
        std::int32_t e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        count += std::min(e, table.power_count(p, table.bound));
    }
    if (rest > 1 && rest <= table.bound && table.is_allowed_prime(rest)) ++count;
    return count;
}

/// Sum of 1/p^a over the table in increasing-value order.
inline double mertens_sum(const PrimePowerTable& table) {
    double s = 0.0;
    for (const PrimePowerEntry& e : table.entries) s += 1.0 / static_cast<double>(e.value);
    return s;
}

namespace detail {

inline std::int64_t mod_norm(int128 a, std::int64_t m) {
    int128 r = a % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

/// Inverse of a modulo m for gcd(a, m) = 1.
inline std::int64_t mod_inv(std::int64_t a, std::int64_t m) {
    const auto [g, u, v] = ext_gcd(mod_norm(a, m), m);
    return mod_norm(u, m);
}

/// Fiber decomposition of a Gap along its longest side: for each assignment
/// of the remaining coordinates, the elements form an arithmetic progression
/// base_c + D·t, t in [0, L].
struct FiberView {
    std::int64_t stride_diff = 0;   // D, the longest side's difference
    std::int64_t side_len = 0;      // L
    std::vector<int128> bases;      // one per fiber

    static FiberView build(const Gap& p) {
        const LongestSide ls = longest_side(p);
        FiberView fv;
        fv.stride_diff = ls.diff;
        fv.side_len = p.lens[ls.index];
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < p.rank(); ++i)
            if (i != ls.index) others.push_back(i);
        std::vector<std::int64_t> coord(others.size(), 0);
        int128 c = p.base;
        fv.bases.reserve(static_cast<std::size_t>(p.nominal_size() / (fv.side_len + 1)));
        for (;;) {
            fv.bases.push_back(c);
            std::size_t i = 0;
            while (i < others.size() && coord[i] == p.lens[others[i]]) {
                c -= int128(p.diffs[others[i]]) * p.lens[others[i]];
                coord[i] = 0;
                ++i;
            }
            if (i == others.size()) break;
            ++coord[i];
            c += p.diffs[others[i]];
        }
        return fv;
    }
};

/// Count of t in [0, len] with t ≡ t0 (mod step).
inline std::int64_t count_residues(std::int64_t t0, std::int64_t step, std::int64_t len) {
    if (t0 > len) return 0;
    return (len - t0) / step + 1;
}

}  // namespace detail

/// Exact count of Gap elements divisible by p^a, together with the fiber
/// bound check |count - |P|/p^a| <= |P| / I_1 where I_1 is the longest side's
/// point count. Requires a proper Gap and gcd(p, D_1) = 1 for the longest
/// side's difference D_1: then each fiber of I_1 consecutive steps carries
/// within one of I_1/p^a multiples.
struct GapDivisorCount {
    std::int64_t count = 0;
    bool bound_ok = false;
};

inline GapDivisorCount prime_power_count_in_gap(const Gap& p1, std::int64_t p,
                                                std::int32_t exponent) {
    if (p < 2 || exponent < 1)
        throw std::invalid_argument("prime_power_count_in_gap: need p >= 2 and exponent >= 1");
    detail::check_enumeration_guard(p1);
    if (!is_proper(p1))
        throw std::invalid_argument("prime_power_count_in_gap: Gap must be proper");
    const LongestSide ls = longest_side(p1);
    if (std::gcd(ls.diff < 0 ? -ls.diff : ls.diff, p) != 1)
        throw std::invalid_argument(
            "prime_power_count_in_gap: p shares a factor with the longest side's difference");
    int128 value = 1;
    for (std::int32_t i = 0; i < exponent; ++i) {
        value *= p;
        if (value > int128(kMaxMagnitude)) break;
    }
    const std::int64_t n = p1.nominal_size();
    GapDivisorCount out;
    if (value > int128(kMaxMagnitude)) {
        // Beyond the element magnitude bound only 0 is divisible.
        out.count = membership(p1, 0) ? 1 : 0;
    } else {
        const std::int64_t v = static_cast<std::int64_t>(value);
        const detail::FiberView fv = detail::FiberView::build(p1);
        const std::int64_t d_inv = detail::mod_inv(fv.stride_diff, v);
        for (const int128 c : fv.bases) {
            // c + D·t ≡ 0 (mod v)  =>  t ≡ -c·D⁻¹ (mod v)
            const std::int64_t t0 =
                detail::mod_norm(int128(detail::mod_norm(-c, v)) * d_inv, v);
            out.count += detail::count_residues(t0, v, fv.side_len);
        }
    }
    // |count·v - n| · I_1 <= n·v
    const int128 diff = int128(out.count) * value - n;
    const int128 lhs = (diff < 0 ? -diff : diff) * ls.side_points;
    out.bound_ok = lhs <= int128(n) * value;
    return out;
}

/// Distribution summary of omega over all elements of a proper Gap, with the
/// concentration band log log n ± (log log n)^(2/3).
struct OmegaStats {
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::map<std::int64_t, std::int64_t> histogram;
    double band_center = 0.0;
    double band_halfwidth = 0.0;
    double outside_fraction = 0.0;
    std::int64_t sum_omega = 0;     // exact Σ omega(x)
    std::int64_t sum_omega_sq = 0;  // exact Σ omega(x)²
};

/// Exact per-element omega histogram over a proper Gap, computed by solving
/// the divisibility congruence of every table entry fiber by fiber instead of
/// factoring each element.
inline OmegaStats omega_stats_over_gap(const Gap& p1, const PrimePowerTable& table) {
    detail::check_enumeration_guard(p1);
    if (!is_proper(p1))
        throw std::invalid_argument("omega_stats_over_gap: Gap must be proper");
    const std::int64_t n = p1.nominal_size();
    if (n < 16) throw std::invalid_argument("omega_stats_over_gap: need at least 16 elements");
    // Minimum attained value; every element must be positive.
    int128 min_value = p1.base;
    for (std::size_t i = 0; i < p1.rank(); ++i)
        if (p1.diffs[i] < 0) min_value += int128(p1.diffs[i]) * p1.lens[i];
    if (min_value <= 0)
        throw std::invalid_argument("omega_stats_over_gap: all elements must be positive");

    const detail::FiberView fv = detail::FiberView::build(p1);
    const std::int64_t fibers = static_cast<std::int64_t>(fv.bases.size());
    const std::int64_t width = fv.side_len + 1;

    // One counter array per worker; cap the total at ~256 MB.
    std::size_t workers =
        std::max<std::size_t>(1, std::min(thread_count(), table.entries.size() / 512 + 1));
    workers = std::min(workers, std::max<std::size_t>(
                                    1, (std::size_t{1} << 28) / static_cast<std::size_t>(n)));
    std::vector<std::vector<std::uint8_t>> partial(
        workers, std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
    const std::size_t total_entries = table.entries.size();
    const std::size_t chunk = (total_entries + workers - 1) / std::max<std::size_t>(workers, 1);
    std::vector<std::thread> pool;
    for (std::size_t wk = 0; wk < workers; ++wk) {
        const std::size_t lo = wk * chunk;
        const std::size_t hi = std::min(total_entries, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, wk, lo, hi] {
            std::vector<std::uint8_t>& counts = partial[wk];
            for (std::size_t idx = lo; idx < hi; ++idx) {
                const std::int64_t v = table.entries[idx].value;
                const std::int64_t d = fv.stride_diff;
                const std::int64_t g = std::gcd(d < 0 ? -d : d, v);
                const std::int64_t step = v / g;
                for (std::int64_t f = 0; f < fibers; ++f) {
                    const int128 c = fv.bases[static_cast<std::size_t>(f)];
                    // c + d·t ≡ 0 (mod v), solvable iff g | c
                    if (detail::mod_norm(c, g) != 0) continue;
                    const std::int64_t rhs = detail::mod_norm(-c / g, step);
                    const std::int64_t t0 = detail::mod_norm(
                        int128(rhs) * detail::mod_inv(d / g, step), step);
                    for (std::int64_t t = t0; t <= fv.side_len; t += step)
                        ++counts[static_cast<std::size_t>(f * width + t)];
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    OmegaStats stats;
    stats.n = n;
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t omega = 0;
        for (std::size_t wk = 0; wk < workers; ++wk)
            omega += partial[wk][static_cast<std::size_t>(i)];
        ++stats.histogram[omega];
        stats.sum_omega += omega;
        stats.sum_omega_sq += omega * omega;
    }
    const double dn = static_cast<double>(n);
    stats.mean = static_cast<double>(stats.sum_omega) / dn;
    stats.variance = static_cast<double>(stats.sum_omega_sq) / dn - stats.mean * stats.mean;
    stats.band_center = std::log(std::log(dn));
    stats.band_halfwidth = std::pow(stats.band_center, 2.0 / 3.0);
    std::int64_t outside = 0;
    for (const auto& [omega, cnt] : stats.histogram) {
        const double o = static_cast<double>(omega);
        if (o < stats.band_center - stats.band_halfwidth ||
            o > stats.band_center + stats.band_halfwidth)
            outside += cnt;
    }
    stats.outside_fraction = static_cast<double>(outside) / dn;
    return stats;
}

/// Result of the two-level superadditivity experiment on (p1, p2, p3).
struct TensionReport {
    std::int64_t n = 0;  // |p3|, the gap whose concentration band is probed
    double delta = 0.0;
    std::int64_t level_half = 0;  // floor(n^(delta/2))
    std::int64_t level_full = 0;  // floor(n^delta)
    std::int64_t sample = 0;
    std::int64_t seed = 0;
    double mean_pair_sum = 0.0;
    double mean_p3 = 0.0;
    double gap = 0.0;
    std::int64_t violations = 0;
    std::int64_t excluded_primes = 0;
};

namespace detail {

/// Prime factorization of x restricted to table primes, exponents capped at
/// the table's power count. Excluded primes are divided out first so the
/// prime leftover test stays valid.
inline std::vector<std::pair<std::int64_t, std::int32_t>> factor_over_table(
    std::int64_t x, const PrimePowerTable& table) {
    std::vector<std::pair<std::int64_t, std::int32_t>> out;
    std::int64_t rest = x;
    for (std::int64_t p : table.excluded) {
        if (p > rest) break;
        while (rest % p == 0) rest /= p;
    }
    for (std::int64_t p : table.primes) {
        if (int128(p) * p > rest) break;
        if (rest % p) continue;
        std::int32_t e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (rest > 1 && rest <= table.bound && table.is_allowed_prime(rest)) out.emplace_back(rest, 1);
    return out;
}

inline std::int64_t omega_from_factors(
    const std::vector<std::pair<std::int64_t, std::int32_t>>& factors,
    const PrimePowerTable& table, std::int64_t level) {
    std::int64_t total = 0;
    for (const auto& [p, e] : factors)
        total += std::min<std::int64_t>(e, table.power_count(p, level));
    return total;
}

}  // namespace detail

/// Samples pairs (x, y) from p1 × p2 and compares the sampled mean of
/// omega_{P, n^(delta/2)}(x) + omega_{P, n^(delta/2)}(y) against the exact
/// mean of omega_{P, n^delta} over p3, where n = |p3| and P excludes the
/// primes dividing any difference of the three Gaps. Each sampled pair is
/// also checked for superadditivity at the two levels; the count of
/// violations is reported and is zero whenever the implementation is correct.
inline TensionReport omega_tension(const Gap& p1, const Gap& p2, const Gap& p3, double delta,
                                   std::int64_t sample, std::int64_t seed) {
    if (!(delta > 0.0) || delta > 1.0)
        throw std::invalid_argument("omega_tension: delta must lie in (0, 1]");
    if (sample < 1) throw std::invalid_argument("omega_tension: sample must be positive");
    for (const Gap* g : {&p1, &p2, &p3})
        if (!is_proper(*g)) throw std::invalid_argument("omega_tension: Gaps must be proper");

    TensionReport rep;
    rep.n = p3.nominal_size();
    rep.delta = delta;
    rep.sample = sample;
    rep.seed = seed;
    const double dn = static_cast<double>(rep.n);
    rep.level_full = static_cast<std::int64_t>(std::floor(std::pow(dn, delta)));
    rep.level_half = static_cast<std::int64_t>(std::floor(std::pow(dn, delta / 2.0)));
    // Keep the halved level at most sqrt of the full level so per-prime
    // superadditivity of the capped exponents is guaranteed.
    while (int128(rep.level_half) * rep.level_half > int128(rep.level_full)) --rep.level_half;
    if (rep.level_half < 2 || rep.level_full < 2)
        throw std::invalid_argument("omega_tension: levels collapse below 2; raise n or delta");

    std::vector<std::int64_t> diffs;
    for (const Gap* g : {&p1, &p2, &p3})
        diffs.insert(diffs.end(), g->diffs.begin(), g->diffs.end());
    const PrimePowerTable full = sieve_prime_powers(rep.level_full, {});
    RestrictedPrimesResult restricted = restricted_primes(diffs, full);
    const PrimePowerTable& table_full = restricted.table;
    rep.excluded_primes = restricted.newly_excluded;

    const IntSet e1 = gap_elements(p1);
    const IntSet e2 = gap_elements(p2);
    if (e1.min() <= 0 || e2.min() <= 0)
        throw std::invalid_argument("omega_tension: sampled Gaps must be positive");

    SplitMix64 rng(static_cast<std::uint64_t>(seed));
    double pair_sum_total = 0.0;
    for (std::int64_t s = 0; s < sample; ++s) {
        const std::int64_t x = e1[static_cast<std::size_t>(rng.next_below(e1.size()))];
        const std::int64_t y = e2[static_cast<std::size_t>(rng.next_below(e2.size()))];
        const auto fx = detail::factor_over_table(x, table_full);
        const auto fy = detail::factor_over_table(y, table_full);
        const std::int64_t ox = detail::omega_from_factors(fx, table_full, rep.level_half);
        const std::int64_t oy = detail::omega_from_factors(fy, table_full, rep.level_half);
        // omega of the product at the full level from merged capped exponents
        std::int64_t oxy = 0;
        std::size_t i = 0, j = 0;
        while (i < fx.size() || j < fy.size()) {
            std::int64_t p;
            std::int64_t e = 0;
            if (j >= fy.size() || (i < fx.size() && fx[i].first < fy[j].first)) {
                p = fx[i].first;
                e = fx[i].second;
                ++i;
            } else if (i >= fx.size() || fy[j].first < fx[i].first) {
                p = fy[j].first;
                e = fy[j].second;
                ++j;
            } else {
                p = fx[i].first;
                e = static_cast<std::int64_t>(fx[i].second) + fy[j].second;
                ++i;
                ++j;
            }
            oxy += std::min<std::int64_t>(e, table_full.power_count(p, rep.level_full));
        }
        if (ox + oy > oxy) ++rep.violations;
        pair_sum_total += static_cast<double>(ox + oy);
    }
    rep.mean_pair_sum = pair_sum_total / static_cast<double>(sample);

    const OmegaStats stats = omega_stats_over_gap(p3, table_full);
    rep.mean_p3 = stats.mean;
    rep.gap = rep.mean_pair_sum - rep.mean_p3;
    return rep;
}

}  // namespace dlab
