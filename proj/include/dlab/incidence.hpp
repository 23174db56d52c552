#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dlab/bipartite_graph.hpp"
#include "dlab/errors.hpp"
#include "dlab/intset.hpp"

namespace dlab {

/// Exact point-line incidence instance: integer points (x, y) and integer
/// lines y = slope·x + intercept, both deduplicated.
struct IncidenceInstance {
    std::vector<std::pair<std::int64_t, std::int64_t>> points;  // sorted, unique
    std::vector<std::pair<std::int64_t, std::int64_t>> lines;   // (slope, intercept), sorted, unique
    std::int64_t line_multiplicity = 0;  // generating tuples before dedup

    std::int64_t point_count() const { return static_cast<std::int64_t>(points.size()); }
    std::int64_t line_count() const { return static_cast<std::int64_t>(lines.size()); }
};

inline constexpr std::int64_t kIncidencePointGuard = 100000000;  // 10^8 points

/// Builds the incidence instance whose lines are y = (b1[i]+b1[j])·x + a_k
/// over the edges (i, j) of g and the elements a_k of a, and whose points are
/// b × (a+a+a). After dedup the line count is |b1 ⊕_g b1| · |a|; the
/// pre-dedup tuple count |E(g)|·|a| is kept as metadata.
inline IncidenceInstance st_instance(const IntSet& b1, const BipartiteGraph& g, const IntSet& a,
                                     const IntSet& b) {
    if (g.left_order() != static_cast<std::int64_t>(b1.size()) ||
        g.right_order() != static_cast<std::int64_t>(b1.size()))
        throw MalformedGraph("st_instance: graph orders do not match the slope set");
    IncidenceInstance inst;
    const IntSet slopes = restricted_sumset(b1, b1, g);
    inst.line_multiplicity = g.edge_count() * static_cast<std::int64_t>(a.size());
    inst.lines.reserve(slopes.size() * a.size());
    for (std::int64_t s : slopes)
        for (std::int64_t t : a) inst.lines.emplace_back(s, t);
    std::sort(inst.lines.begin(), inst.lines.end());

    const IntSet triple = iterated_sumset(a, 3);
    const int128 n_points = int128(b.size()) * triple.size();
    if (n_points > int128(kIncidencePointGuard))
        throw TooLarge("st_instance: point count exceeds the 10^8 guard");
    inst.points.reserve(static_cast<std::size_t>(n_points));
    for (std::int64_t x : b)
        for (std::int64_t y : triple) inst.points.emplace_back(x, y);
    std::sort(inst.points.begin(), inst.points.end());
    return inst;
}

/// Exact incidence count. Points are indexed by x-coordinate; each line is
/// evaluated at every occupied x with 128-bit arithmetic, so out-of-range
/// ordinates simply never match.
inline std::int64_t count_incidences(const IncidenceInstance& inst) {
    std::unordered_map<std::int64_t, std::unordered_set<std::int64_t>> by_x;
    for (const auto& [x, y] : inst.points) by_x[x].insert(y);
    std::vector<std::int64_t> xs;
    xs.reserve(by_x.size());
    for (const auto& kv : by_x) xs.push_back(kv.first);
    std::sort(xs.begin(), xs.end());

    std::int64_t total = 0;
    for (const auto& [slope, intercept] : inst.lines) {
        for (std::int64_t x : xs) {
            const int128 y = int128(slope) * x + intercept;
            if (y < -int128(kMaxMagnitude) || y > int128(kMaxMagnitude)) continue;
            const auto it = by_x.find(x);
            if (it->second.count(static_cast<std::int64_t>(y))) ++total;
        }
    }
    return total;
}

/// True iff incidences <= c·((points·lines)^(2/3) + points + lines).
inline bool st_bound_check(std::int64_t m_points, std::int64_t n_lines, std::int64_t incidences,
                           double c) {
    if (m_points < 0 || n_lines < 0 || incidences < 0)
        throw std::invalid_argument("st_bound_check: counts must be nonnegative");
    const long double mn = static_cast<long double>(m_points) * static_cast<long double>(n_lines);
    const long double bound =
        static_cast<long double>(c) *
        (std::pow(mn, 2.0L / 3.0L) + static_cast<long double>(m_points) +
         static_cast<long double>(n_lines));
    return static_cast<long double>(incidences) <= bound;
}

/// Checks the structural lower bound of the incidence construction: for every
/// edge (i, j) of the pair graph and every intercept a_k, the line
/// y = (b1[i]+b1[j])x + a_k passes through at least codegree(i, j) instance
/// points, namely one for each common containment neighbor. `containment` is
/// the graph on (b, b) whose common neighborhoods certify the incidences.
inline bool verify_line_lower_bounds(const IncidenceInstance& inst, const IntSet& b1,
                                     const BipartiteGraph& pair_graph, const IntSet& a,
                                     const IntSet& b, const BipartiteGraph& containment) {
    std::unordered_map<std::int64_t, std::unordered_set<std::int64_t>> by_x;
    for (const auto& [x, y] : inst.points) by_x[x].insert(y);
    for (const auto& [i, j] : pair_graph.edges()) {
        const std::int64_t bi = b1[static_cast<std::size_t>(i)];
        const std::int64_t bj = b1[static_cast<std::size_t>(j)];
        const std::int64_t ii = b.index_of(bi);
        const std::int64_t jj = b.index_of(bj);
        if (ii < 0 || jj < 0) return false;
        const auto common = containment.common_neighbors(ii, jj);
        const std::int64_t slope = detail::checked_sum(bi, bj);
        for (std::int64_t t : a) {
            std::int64_t hits = 0;
            for (std::int32_t r : common) {
                const std::int64_t x = b[static_cast<std::size_t>(r)];
                const int128 y = int128(slope) * x + t;
                const auto it = by_x.find(x);
                if (it == by_x.end()) continue;
                if (y >= -int128(kMaxMagnitude) && y <= int128(kMaxMagnitude) &&
                    it->second.count(static_cast<std::int64_t>(y)))
                    ++hits;
            }
            if (hits < static_cast<std::int64_t>(common.size())) return false;
        }
    }
    return true;
}

}  // namespace dlab
