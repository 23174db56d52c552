#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dlab/bipartite_graph.hpp"
#include "dlab/errors.hpp"
#include "dlab/intset.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rational.hpp"

namespace dlab {

/// Bipartite graph on (b, b) with an edge (i, j) whenever b[i] <= b[j] and
/// b[i]*b[j] lies in a. Since b is stored increasing, the value condition is
/// simply i <= j.
inline BipartiteGraph containment_graph_multi(const IntSet& a, const IntSet& b) {
    const std::int64_t n = static_cast<std::int64_t>(b.size());
    std::vector<BipartiteGraph::Edge> edges;
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i; j < n; ++j)
            if (a.contains(detail::checked_prod(b[static_cast<std::size_t>(i)],
                                                b[static_cast<std::size_t>(j)])))
                edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    return BipartiteGraph(n, n, std::move(edges));
}

/// Keeps, for every product value, only the lexicographically first edge.
/// The surviving edge count equals |a ∩ b.b|.
inline BipartiteGraph deduplicate(const BipartiteGraph& gm, const IntSet& a, const IntSet& b) {
    if (gm.left_order() != static_cast<std::int64_t>(b.size()) ||
        gm.right_order() != static_cast<std::int64_t>(b.size()))
        throw MalformedGraph("deduplicate: graph orders do not match the ground set");
    std::unordered_set<std::int64_t> seen;
    seen.reserve(gm.edges().size());
    std::vector<BipartiteGraph::Edge> kept;
    for (const auto& [i, j] : gm.edges()) {  // edges are sorted lexicographically
        const std::int64_t prod = detail::checked_prod(b[static_cast<std::size_t>(i)],
                                                       b[static_cast<std::size_t>(j)]);
        if (!a.contains(prod)) continue;
        if (seen.insert(prod).second)
            kept.emplace_back(i, j);
    }
    return BipartiteGraph(gm.left_order(), gm.right_order(), std::move(kept));
}

/// |N(i) ∩ N(j)| for left vertices; forwards to the graph's bitset rows.
inline std::int64_t codegree(const BipartiteGraph& g, std::int64_t i, std::int64_t j) {
    return g.codegree(i, j);
}

/// Graph on (subset, subset) whose edges are the ordered pairs (including the
/// diagonal) with codegree at least `threshold` in g.
inline BipartiteGraph codegree_pair_graph(const BipartiteGraph& g,
                                          const std::vector<std::int32_t>& left_ids,
                                          const Rational& threshold) {
    const std::int64_t m = static_cast<std::int64_t>(left_ids.size());
    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<BipartiteGraph::Edge>> partial(
        static_cast<std::size_t>(m));
    parallel_chunks(static_cast<std::size_t>(m), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t x = lo; x < hi; ++x) {
            auto& row = partial[x];
            for (std::size_t y = 0; y < left_ids.size(); ++y) {
                if (Rational(g.codegree(left_ids[x], left_ids[y])) >= threshold)
                    row.emplace_back(static_cast<std::int32_t>(x), static_cast<std::int32_t>(y));
            }
        }
    });
    for (auto& row : partial) edges.insert(edges.end(), row.begin(), row.end());
    return BipartiteGraph(m, m, std::move(edges));
}

/// Outcome of pair refinement: a left subset such that all but an eps
/// fraction of its ordered vertex pairs share at least `threshold` right
/// neighbors. All claims are re-verified exhaustively before returning.
struct PairRefineResult {
    std::vector<std::int32_t> subset;  // left indices, ascending
    Rational alpha;                    // density of the input graph
    Rational eps;
    Rational threshold;       // codegree requirement eps·alpha²·right/2
    Rational size_floor;      // alpha·left/2
    std::int64_t bad_pairs = 0;  // ordered pairs below threshold, diagonal included
    std::int64_t total_pairs = 0;
};

namespace detail {

struct BadPairTable {
    // bad[x] = bitset over candidate positions marking y with (x, y) bad
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::int64_t> participation;  // ordered bad pairs involving x
    std::int64_t total_ordered = 0;

    static BadPairTable build(const BipartiteGraph& g, const std::vector<std::int32_t>& ids,
                              const Rational& threshold) {
        const std::size_t m = ids.size();
        const std::size_t words = (m + 63) / 64;
        BadPairTable t;
        t.rows.assign(m, std::vector<std::uint64_t>(words, 0));
        t.participation.assign(m, 0);
        for (std::size_t x = 0; x < m; ++x) {
            for (std::size_t y = x; y < m; ++y) {
                if (Rational(g.codegree(ids[x], ids[y])) >= threshold) continue;
                t.rows[x][y / 64] |= std::uint64_t{1} << (y % 64);
                t.rows[y][x / 64] |= std::uint64_t{1} << (x % 64);
                if (x == y) {
                    t.participation[x] += 1;
                    t.total_ordered += 1;
                } else {
                    t.participation[x] += 2;
                    t.participation[y] += 2;
                    t.total_ordered += 2;
                }
            }
        }
        return t;
    }

    void remove(std::size_t x, std::vector<bool>& alive) {
        alive[x] = false;
        for (std::size_t w = 0; w < rows[x].size(); ++w) {
            std::uint64_t word = rows[x][w];
            while (word) {
                const std::size_t y = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                word &= word - 1;
                if (!alive[y]) continue;
                if (y == x) continue;
                rows[y][x / 64] &= ~(std::uint64_t{1} << (x % 64));
                participation[y] -= 2;
                total_ordered -= 2;
            }
        }
        if (rows[x][x / 64] & (std::uint64_t{1} << (x % 64))) total_ordered -= 1;
        participation[x] = 0;
    }
};

inline bool bad_fraction_ok(std::int64_t bad, std::int64_t subset_size, const Rational& eps) {
    // bad <= eps * subset_size^2
    return int128(bad) * eps.den() <= int128(eps.num()) * subset_size * subset_size;
}

}  // namespace detail

/// Pair refinement on a bipartite graph of density alpha > 0: finds a left
/// subset S with |S| >= alpha·|L|/2 such that at least (1-eps)|S|² of the
/// ordered pairs of S share at least eps·alpha²·|R|/2 right neighbors.
///
/// The search is the averaging argument made constructive: candidate subsets
/// are right-vertex neighborhoods N(w) in decreasing degree order, and inside
/// a candidate the vertex participating in the most bad pairs is deleted
/// until the bad fraction drops to eps or the size floor is breached. The
/// first candidate to survive wins, which keeps the output deterministic.
inline PairRefineResult gowers_pair_refine(const BipartiteGraph& g, const Rational& eps) {
    if (eps <= Rational(0) || eps >= Rational(1))
        throw std::invalid_argument("gowers_pair_refine: eps must lie in (0,1)");
    const std::int64_t L = g.left_order();
    const std::int64_t R = g.right_order();
    const std::int64_t E = g.edge_count();
    if (L == 0 || R == 0 || E == 0)
        throw std::invalid_argument("gowers_pair_refine: graph density must be positive");
    const Rational alpha(E, L * R);
    const Rational size_floor = alpha * Rational(L, 2);
    const Rational threshold = eps * alpha * alpha * Rational(R, 2);

    const BipartiteGraph gt = g.transposed();
    std::vector<std::int32_t> order(static_cast<std::size_t>(R));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return gt.degree(a) > gt.degree(b);
    });

    for (std::int32_t w : order) {
        std::vector<std::int32_t> ids = gt.neighbors(w);
        if (Rational(static_cast<std::int64_t>(ids.size())) < size_floor) continue;
        detail::BadPairTable table = detail::BadPairTable::build(g, ids, threshold);
        std::vector<bool> alive(ids.size(), true);
        std::int64_t live = static_cast<std::int64_t>(ids.size());
        for (;;) {
            if (detail::bad_fraction_ok(table.total_ordered, live, eps)) {
                std::vector<std::int32_t> subset;
                for (std::size_t x = 0; x < ids.size(); ++x)
                    if (alive[x]) subset.push_back(ids[x]);
                // Exhaustive recheck of every claim on the final subset.
                std::int64_t bad = 0;
                for (std::int32_t v1 : subset)
                    for (std::int32_t v2 : subset)
                        if (Rational(g.codegree(v1, v2)) < threshold) ++bad;
                const std::int64_t sz = static_cast<std::int64_t>(subset.size());
                if (Rational(sz) < size_floor || !detail::bad_fraction_ok(bad, sz, eps))
                    throw CertificateViolation(
                        "gowers_pair_refine: final subset failed its recheck");
                PairRefineResult res;
                res.subset = std::move(subset);
                res.alpha = alpha;
                res.eps = eps;
                res.threshold = threshold;
                res.size_floor = size_floor;
                res.bad_pairs = bad;
                res.total_pairs = sz * sz;
                return res;
            }
            // Drop the vertex in the most bad pairs (ties: smallest index).
            std::size_t worst = ids.size();
            std::int64_t worst_count = -1;
            for (std::size_t x = 0; x < ids.size(); ++x)
                if (alive[x] && table.participation[x] > worst_count) {
                    worst = x;
                    worst_count = table.participation[x];
                }
            if (worst == ids.size()) break;
            if (Rational(live - 1) < size_floor) break;  // floor would be breached
            table.remove(worst, alive);
            --live;
        }
    }
    throw RefinementFailed(
        "gowers_pair_refine: no qualifying subset found; one exists for every positive-density "
        "input, so this signals an implementation or precondition failure");
}

/// Outcome of dense-graph extraction: left vertices of near-full degree,
/// whose sumset is controlled by the restricted sumset along the graph.
struct DenseBsgResult {
    IntSet subset;            // values drawn from u
    Rational eps;             // 1 - density(g)
    std::int64_t restricted_sumset_size = 0;
    std::int64_t subset_sumset_size = 0;
};

/// Dense-graph extraction on g ⊆ (u, w) with missing-edge fraction
/// eps = 1 - density < 1/4: returns u' = {left vertices of degree at least
/// (1-sqrt(eps))|w|}, after verifying |u'| >= (1-sqrt(eps))|u| and
/// |u'+u'| <= |u ⊕_g w|² / ((1-2·sqrt(eps))|u|) by direct computation.
/// Comparisons against sqrt(eps) are done squared, in exact integers.
inline DenseBsgResult dense_bsg_extract(const BipartiteGraph& g, const IntSet& u,
                                        const IntSet& w) {
    const std::int64_t L = static_cast<std::int64_t>(u.size());
    const std::int64_t R = static_cast<std::int64_t>(w.size());
    if (g.left_order() != L || g.right_order() != R)
        throw MalformedGraph("dense_bsg_extract: graph orders do not match set sizes");
    if (L == 0 || R == 0)
        throw std::invalid_argument("dense_bsg_extract: empty color class");
    const std::int64_t cells = L * R;
    const std::int64_t missing = cells - g.edge_count();
    if (4 * missing >= cells)
        throw GraphNotDenseEnough("dense_bsg_extract: missing-edge fraction " +
                                  Rational(missing, cells).to_string() + " is not below 1/4");

    // degree(i) >= (1-sqrt(eps))R  <=>  (R - degree(i))² · L·R <= missing · R²
    //                              <=>  (R - degree(i))² · L <= missing · R
    std::vector<std::int64_t> chosen;
    for (std::int64_t i = 0; i < L; ++i) {
        const std::int64_t miss_i = R - g.degree(i);
        if (int128(miss_i) * miss_i * L <= int128(missing) * R)
            chosen.push_back(u[static_cast<std::size_t>(i)]);
    }
    IntSet subset = IntSet(std::move(chosen));

    // |u'| >= (1-sqrt(eps))|u|  <=>  (L - |u'|)² · R <= missing · L
    const std::int64_t dropped = L - static_cast<std::int64_t>(subset.size());
    if (int128(dropped) * dropped * R > int128(missing) * L)
        throw CertificateViolation("dense_bsg_extract: size bound failed its recheck");

    const IntSet restricted = restricted_sumset(u, w, g);
    const IntSet doubled = sumset(subset, subset);
    // |u'+u'|·(1-2·sqrt(eps))·L <= S²  with eps = missing/(L·R):
    // a := |u'+u'|·L - S²; holds iff a <= 0 or a²·L·R <= 4·missing·(|u'+u'|·L)²
    const int128 lhs = int128(static_cast<std::int64_t>(doubled.size())) * L;
    const int128 s2 = int128(static_cast<std::int64_t>(restricted.size())) *
                      static_cast<std::int64_t>(restricted.size());
    const int128 a = lhs - s2;
    if (a > 0 && a * a * cells > 4 * int128(missing) * lhs * lhs)
        throw CertificateViolation("dense_bsg_extract: sumset bound failed its recheck");

    DenseBsgResult res;
    res.subset = std::move(subset);
    res.eps = Rational(missing, cells);
    res.restricted_sumset_size = static_cast<std::int64_t>(restricted.size());
    res.subset_sumset_size = static_cast<std::int64_t>(doubled.size());
    return res;
}

/// Epsilon policy for the small-doubling pipeline. The automatic policy uses
/// max(alpha^8 / 2^30, 10^-6): the first term is the constant the refinement
/// chain is stated with, the second keeps thresholds nondegenerate at small
/// scale (alpha <= 1 makes the first term at most 2^-30, so the floor is
/// what desk-size runs actually see).
struct EpsPolicy {
    bool automatic = true;
    Rational explicit_eps = Rational(1, 4);

    static EpsPolicy auto_policy() { return EpsPolicy{}; }
    static EpsPolicy explicit_policy(const Rational& eps) { return EpsPolicy{false, eps}; }
};

struct StageRecord {
    std::string name;
    std::vector<std::int64_t> left_values;
    std::vector<std::int64_t> right_values;
    std::int64_t edge_count = 0;
    Rational density;
    Rational threshold;
    Rational bad_pair_fraction;  // refinement stages; 0 elsewhere
    bool passed = false;
};

struct CertificateRecord {
    std::string claim;
    bool passed = false;
};

/// Full output of the small-doubling pipeline. Construction re-verifies every
/// certificate; an object of this type cannot exist with a failed one.
struct PipelineResult {
    std::vector<StageRecord> stages;
    IntSet final_v;
    IntSet final_w;
    Rational doubling_v;
    Rational doubling_w;
    std::int64_t restricted_edge_count = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> final_edges;  // value pairs
    std::vector<CertificateRecord> certificates;
    Rational eps_used;
    Rational alpha;
};

namespace detail {

inline std::vector<std::int64_t> values_at(const IntSet& b, const std::vector<std::int32_t>& ids) {
    std::vector<std::int64_t> out;
    out.reserve(ids.size());
    for (std::int32_t i : ids) out.push_back(b[static_cast<std::size_t>(i)]);
    return out;
}

inline void certify(PipelineResult& result, const std::string& claim, bool ok) {
    result.certificates.push_back({claim, ok});
    if (!ok)
        throw CertificateViolation("pipeline certificate failed: " + claim);
}

}  // namespace detail

/// Runs the refinement chain that turns a dense containment graph of (a, b)
/// into two dense subsets V, W of b with measured small doubling and a still
/// dense restricted graph between them.
///
/// Stage order: edge deletion below degree alpha·n/2, pair refinement on the
/// left (with zero-degree cleanup), rich-vertex selection on the right at
/// alpha²·n/32, pair refinement on the right, dense-graph extraction on both
/// sides, final edge accounting. Every stage's inequality is re-verified in
/// exact arithmetic before the result is returned.
inline PipelineResult small_doubling_pipeline(const IntSet& a, const IntSet& b,
                                              const EpsPolicy& policy = EpsPolicy::auto_policy()) {
    const std::int64_t n = static_cast<std::int64_t>(b.size());
    if (n < 2) throw PipelineFailed("density_gate", "ground set has fewer than two elements");

    const BipartiteGraph gm = containment_graph_multi(a, b);
    const BipartiteGraph g0 = deduplicate(gm, a, b);
    const std::int64_t e0 = g0.edge_count();
    if (e0 == 0) throw PipelineFailed("density_gate", "containment graph has no edges");

    PipelineResult result;
    result.alpha = Rational(e0, n * n);

    // alpha^8/2^30 <= 2^-30 < 10^-6 for any alpha <= 1, so the automatic
    // policy resolves to the floor; it stays exact as a rational.
    Rational eps = policy.automatic ? Rational(1, 1000000) : policy.explicit_eps;
    if (eps <= Rational(0) || eps >= Rational(1, 4))
        throw std::invalid_argument(
            "small_doubling_pipeline: eps must lie in (0,1/4) for the extraction stages");
    result.eps_used = eps;

    std::vector<std::int32_t> all_right(static_cast<std::size_t>(n));
    std::iota(all_right.begin(), all_right.end(), 0);

    // Stage 1: delete all edges leaving left vertices of degree < alpha·n/2.
    const Rational degree_floor = result.alpha * Rational(n, 2);
    std::vector<BipartiteGraph::Edge> surviving;
    for (const auto& e : g0.edges())
        if (Rational(g0.degree(e.first)) >= degree_floor) surviving.push_back(e);
    const BipartiteGraph g1(n, n, std::move(surviving));
    const std::int64_t e1 = g1.edge_count();
    {
        StageRecord st;
        st.name = "low_degree_deletion";
        std::vector<std::int32_t> kept_left;
        for (std::int32_t i = 0; i < n; ++i)
            if (g1.degree(i) > 0) kept_left.push_back(i);
        st.left_values = detail::values_at(b, kept_left);
        st.right_values = b.values();
        st.edge_count = e1;
        st.density = Rational(e1, n * n);
        st.threshold = degree_floor;
        st.passed = true;
        result.stages.push_back(std::move(st));
    }
    detail::certify(result, "at least half of the edges survive low-degree deletion",
                    2 * e1 >= e0);
    if (e1 == 0) throw PipelineFailed("low_degree_deletion", "no edges survived");
    const Rational alpha1(e1, n * n);

    // Stage 2: pair refinement on the left, then removal of isolated picks.
    PairRefineResult left_refine;
    try {
        left_refine = gowers_pair_refine(g1, eps);
    } catch (const RefinementFailed& ex) {
        throw PipelineFailed("pair_refine_left", ex.what());
    }
    std::vector<std::int32_t> b1_ids;
    for (std::int32_t v : left_refine.subset)
        if (g1.degree(v) > 0) b1_ids.push_back(v);
    if (b1_ids.empty()) throw PipelineFailed("pair_refine_left", "refined subset is isolated");
    {
        std::int64_t bad = 0;
        for (std::int32_t v1 : b1_ids)
            for (std::int32_t v2 : b1_ids)
                if (Rational(g1.codegree(v1, v2)) < left_refine.threshold) ++bad;
        const std::int64_t sz = static_cast<std::int64_t>(b1_ids.size());
        StageRecord st;
        st.name = "pair_refine_left";
        st.left_values = detail::values_at(b, b1_ids);
        st.right_values = b.values();
        st.edge_count = e1;
        st.density = alpha1;
        st.threshold = left_refine.threshold;
        st.bad_pair_fraction = Rational(bad, sz * sz);
        st.passed = true;
        result.stages.push_back(std::move(st));
        detail::certify(result, "left refinement keeps at least alpha'·n/4 vertices",
                        Rational(4 * sz) >= alpha1 * Rational(n));
        detail::certify(result, "left refinement bad-pair fraction is at most eps",
                        detail::bad_fraction_ok(bad, sz, eps));
        bool degrees_ok = true;
        for (std::int32_t v : b1_ids)
            if (Rational(g1.degree(v)) < degree_floor) degrees_ok = false;
        detail::certify(result, "every refined left vertex kept degree at least alpha·n/2",
                        degrees_ok);
    }

    // Stage 3: rich-vertex selection on the right at alpha²·n/32.
    const Rational rich_floor = result.alpha * result.alpha * Rational(n, 32);
    std::vector<std::int32_t> b2_ids;
    std::int64_t edges_from_b1 = 0;
    {
        const BipartiteGraph g1t = g1.transposed();
        std::vector<bool> in_b1(static_cast<std::size_t>(n), false);
        for (std::int32_t v : b1_ids) in_b1[static_cast<std::size_t>(v)] = true;
        for (std::int32_t j = 0; j < n; ++j) {
            std::int64_t deg = 0;
            for (std::int32_t i : g1t.neighbors(j))
                if (in_b1[static_cast<std::size_t>(i)]) ++deg;
            edges_from_b1 += deg;
            if (deg > 0 && Rational(deg) >= rich_floor) b2_ids.push_back(j);
        }
    }
    if (b2_ids.empty()) throw PipelineFailed("rich_right_selection", "no rich right vertices");
    const BipartiteGraph g2 = g1.induced(b1_ids, b2_ids);
    const std::int64_t n1 = static_cast<std::int64_t>(b1_ids.size());
    const std::int64_t n2 = static_cast<std::int64_t>(b2_ids.size());
    const Rational alpha2(g2.edge_count(), n1 * n2);
    {
        StageRecord st;
        st.name = "rich_right_selection";
        st.left_values = detail::values_at(b, b1_ids);
        st.right_values = detail::values_at(b, b2_ids);
        st.edge_count = g2.edge_count();
        st.density = alpha2;
        st.threshold = rich_floor;
        st.passed = true;
        result.stages.push_back(std::move(st));
        // E(B1', B2-all) >= alpha²n²/16  <=>  16·E·n² >= e0²
        detail::certify(result, "edges incident to the refined left set number at least alpha²n²/16",
                        int128(16) * edges_from_b1 * n * n >= int128(e0) * e0);
        detail::certify(result, "at least alpha²n/32 right vertices are rich",
                        int128(32) * n2 * n * n * n >= int128(e0) * e0);
        // restricted density alpha'' >= alpha²/32
        detail::certify(result, "restricted density is at least alpha²/32",
                        int128(32) * g2.edge_count() * n * n * n * n >=
                            int128(e0) * e0 * n1 * n2);
    }

    // Stage 4: pair refinement on the right of the restricted graph.
    PairRefineResult right_refine;
    const BipartiteGraph g2t = g2.transposed();
    try {
        right_refine = gowers_pair_refine(g2t, eps);
    } catch (const RefinementFailed& ex) {
        throw PipelineFailed("pair_refine_right", ex.what());
    }
    const std::vector<std::int32_t> b2pp_pos = right_refine.subset;  // positions within b2_ids
    std::vector<std::int32_t> b2pp_ids;
    for (std::int32_t p : b2pp_pos) b2pp_ids.push_back(b2_ids[static_cast<std::size_t>(p)]);
    {
        std::int64_t bad = 0;
        for (std::int32_t v1 : b2pp_pos)
            for (std::int32_t v2 : b2pp_pos)
                if (Rational(g2t.codegree(v1, v2)) < right_refine.threshold) ++bad;
        const std::int64_t sz = static_cast<std::int64_t>(b2pp_pos.size());
        StageRecord st;
        st.name = "pair_refine_right";
        st.left_values = detail::values_at(b, b1_ids);
        st.right_values = detail::values_at(b, b2pp_ids);
        st.edge_count = g2t.edge_count();
        st.density = alpha2;
        st.threshold = right_refine.threshold;
        st.bad_pair_fraction = Rational(bad, sz * sz);
        st.passed = true;
        result.stages.push_back(std::move(st));
        detail::certify(result, "right refinement keeps at least alpha''·|B2'|/2 vertices",
                        Rational(2 * sz) >= alpha2 * Rational(n2));
        detail::certify(result, "right refinement bad-pair fraction is at most eps",
                        detail::bad_fraction_ok(bad, sz, eps));
    }

    // Stage 5/6: dense-graph extraction from the qualifying-pair graphs.
    const IntSet b1_values = IntSet(detail::values_at(b, b1_ids));
    const IntSet b2pp_values = IntSet(detail::values_at(b, b2pp_ids));
    const BipartiteGraph h1 = codegree_pair_graph(g1, b1_ids, left_refine.threshold);
    const BipartiteGraph h2 = codegree_pair_graph(g2t, b2pp_pos, right_refine.threshold);
    DenseBsgResult left_bsg, right_bsg;
    try {
        left_bsg = dense_bsg_extract(h1, b1_values, b1_values);
    } catch (const GraphNotDenseEnough& ex) {
        throw PipelineFailed("dense_bsg_left", ex.what());
    }
    try {
        right_bsg = dense_bsg_extract(h2, b2pp_values, b2pp_values);
    } catch (const GraphNotDenseEnough& ex) {
        throw PipelineFailed("dense_bsg_right", ex.what());
    }
    for (const char* side : {"left", "right"}) {
        const DenseBsgResult& bsg = side[0] == 'l' ? left_bsg : right_bsg;
        const IntSet& ground = side[0] == 'l' ? b1_values : b2pp_values;
        StageRecord st;
        st.name = std::string("dense_bsg_") + side;
        st.left_values = bsg.subset.values();
        st.right_values = ground.values();
        st.edge_count = side[0] == 'l' ? h1.edge_count() : h2.edge_count();
        st.density = side[0] == 'l' ? h1.density() : h2.density();
        st.threshold = bsg.eps;
        st.passed = true;
        result.stages.push_back(std::move(st));
        const std::int64_t ground_size = static_cast<std::int64_t>(ground.size());
        const std::int64_t kept = static_cast<std::int64_t>(bsg.subset.size());
        const std::int64_t dropped = ground_size - kept;
        const bool size_ok = int128(dropped) * dropped * bsg.eps.den() <=
                             int128(bsg.eps.num()) * ground_size * ground_size;
        const int128 lhs = int128(bsg.subset_sumset_size) * ground_size;
        const int128 s2 = int128(bsg.restricted_sumset_size) * bsg.restricted_sumset_size;
        const int128 gap = lhs - s2;
        const bool sumset_ok =
            gap <= 0 ||
            gap * gap * bsg.eps.den() <= 4 * int128(bsg.eps.num()) * lhs * lhs;
        detail::certify(result,
                        std::string("dense-graph extraction (") + side +
                            ") keeps a (1-sqrt(eps)) share of vertices",
                        size_ok);
        detail::certify(result,
                        std::string("dense-graph extraction (") + side +
                            ") sumset is bounded by the restricted-sumset square",
                        sumset_ok);
    }

    // Stage 7: final accounting on (V, W).
    result.final_v = left_bsg.subset;
    result.final_w = right_bsg.subset;
    result.doubling_v = doubling_ratio(result.final_v, OpKind::add);
    result.doubling_w = doubling_ratio(result.final_w, OpKind::add);
    std::vector<std::int32_t> v_ids, w_ids;
    for (std::int64_t x : result.final_v) v_ids.push_back(static_cast<std::int32_t>(b.index_of(x)));
    for (std::int64_t x : result.final_w) w_ids.push_back(static_cast<std::int32_t>(b.index_of(x)));
    std::int64_t e_final = 0;
    for (std::int32_t i : v_ids)
        for (std::int32_t j : w_ids)
            if (g1.has_edge(i, j)) {
                ++e_final;
                result.final_edges.emplace_back(b[static_cast<std::size_t>(i)],
                                                b[static_cast<std::size_t>(j)]);
            }
    result.restricted_edge_count = e_final;
    // E(V, W) >= E(B1', B2'') - (eps + 2·sqrt(eps))·|B1'|·|B2''|, checked as
    // a·den - eps_num·P <= 2·sqrt(eps)·P·den with both sides squared.
    std::int64_t e3 = 0;
    for (std::int32_t i : b1_ids)
        for (std::int32_t j : b2pp_ids)
            if (g1.has_edge(i, j)) ++e3;
    {
        const std::int64_t removed = e3 - e_final;
        const int128 pairs = int128(n1) * static_cast<std::int64_t>(b2pp_ids.size());
        const int128 lhs = int128(removed) * eps.den() - int128(eps.num()) * pairs;
        const bool ok = lhs <= 0 || lhs * lhs <= 4 * int128(eps.num()) * eps.den() * pairs * pairs;
        detail::certify(result,
                        "final restricted edge count loses at most (eps+2·sqrt(eps))·|B1'|·|B2''|",
                        ok);
    }
    {
        StageRecord st;
        st.name = "final_accounting";
        st.left_values = result.final_v.values();
        st.right_values = result.final_w.values();
        st.edge_count = e_final;
        const std::int64_t cells =
            static_cast<std::int64_t>(result.final_v.size()) *
            static_cast<std::int64_t>(result.final_w.size());
        st.density = cells ? Rational(e_final, cells) : Rational(0);
        st.passed = true;
        result.stages.push_back(std::move(st));
    }
    return result;
}

}  // namespace dlab
