#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dlab/divisors.hpp"
#include "dlab/energy.hpp"
#include "dlab/errors.hpp"
#include "dlab/gaps.hpp"
#include "dlab/graphs.hpp"
#include "dlab/incidence.hpp"
#include "dlab/intset.hpp"
#include "dlab/rational.hpp"
#include "dlab/version.hpp"

namespace dlab {

/// Parameters shared by the experiment runners. A fixed seed makes every
/// runner fully deterministic, including output bytes.
struct ExperimentConfig {
    std::vector<std::int64_t> n_list;
    double k_threshold = 2.0;
    double delta = 1.0;
    std::int64_t sample = 10000;
    std::int64_t seed = 1;
    GrowthParams growth;
    std::optional<Gap> gap1;
    std::optional<Gap> gap2;
    std::optional<Gap> gap3;
    std::optional<Rational> eps;  // explicit pipeline epsilon
    std::int64_t cover_budget = 64;
};

using Cell = std::variant<std::int64_t, double, std::string>;

/// Tabular experiment output plus provenance. Rows follow grid order; a
/// report rerun from the same config is byte-identical.
struct Report {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::vector<std::string> notes;  // emitted as comment lines in CSV
    nlohmann::json details;          // structured payload, JSON output only
    bool gate_passed = true;
    std::string gate_description;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string cell_to_string(const Cell& c) {
    if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    return std::get<std::string>(c);
}

inline void add_provenance(Report& rep, const ExperimentConfig& cfg) {
    rep.provenance.emplace_back("version", kVersion);
    rep.provenance.emplace_back("seed", std::to_string(cfg.seed));
    std::string grid;
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (i) grid += ",";
        grid += std::to_string(cfg.n_list[i]);
    }
    rep.provenance.emplace_back("n_list", grid);
    rep.provenance.emplace_back("k", format_double(cfg.k_threshold));
    rep.provenance.emplace_back("delta", format_double(cfg.delta));
    rep.provenance.emplace_back("sample", std::to_string(cfg.sample));
    if (cfg.gap1) rep.provenance.emplace_back("gap1", format_gap(*cfg.gap1));
    if (cfg.gap2) rep.provenance.emplace_back("gap2", format_gap(*cfg.gap2));
    if (cfg.gap3) rep.provenance.emplace_back("gap3", format_gap(*cfg.gap3));
    if (cfg.eps) rep.provenance.emplace_back("eps", cfg.eps->to_string());
}

}  // namespace detail

/// CSV form: '#' provenance/comment lines, a mandatory header row, '.' as the
/// decimal separator, LF line endings.
inline void write_csv(std::ostream& out, const Report& rep) {
    out << "# experiment=" << rep.experiment << "\n";
    for (const auto& [k, v] : rep.provenance) out << "# " << k << "=" << v << "\n";
    for (const std::string& n : rep.notes) out << "# " << n << "\n";
    out << "# gate=" << (rep.gate_passed ? "pass" : "fail");
    if (!rep.gate_description.empty()) out << " (" << rep.gate_description << ")";
    out << "\n";
    for (std::size_t i = 0; i < rep.columns.size(); ++i) {
        if (i) out << ",";
        out << rep.columns[i];
    }
    out << "\n";
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << detail::cell_to_string(row[i]);
        }
        out << "\n";
    }
}

inline nlohmann::json report_to_json(const Report& rep) {
    nlohmann::json j;
    j["experiment"] = rep.experiment;
    nlohmann::json prov = nlohmann::json::object();
    for (const auto& [k, v] : rep.provenance) prov[k] = v;
    j["provenance"] = prov;
    j["columns"] = rep.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const Cell& c : row) {
            if (std::holds_alternative<std::int64_t>(c))
                jr.push_back(std::get<std::int64_t>(c));
            else if (std::holds_alternative<double>(c))
                jr.push_back(std::get<double>(c));
            else
                jr.push_back(std::get<std::string>(c));
        }
        rows.push_back(jr);
    }
    j["rows"] = rows;
    j["notes"] = rep.notes;
    if (!rep.details.is_null()) j["details"] = rep.details;
    j["gate_passed"] = rep.gate_passed;
    if (!rep.gate_description.empty()) j["gate"] = rep.gate_description;
    return j;
}

/// Tension report object: {n, delta, mean_pair_sum, mean_p3, gap, violations}.
inline nlohmann::json tension_to_json(const TensionReport& rep) {
    return nlohmann::json{{"n", rep.n},
                          {"delta", rep.delta},
                          {"mean_pair_sum", rep.mean_pair_sum},
                          {"mean_p3", rep.mean_p3},
                          {"gap", rep.gap},
                          {"violations", rep.violations}};
}

/// Stage table of a pipeline run:
/// {name, size_left, size_right, density, threshold, bad_pair_fraction, passed}.
inline nlohmann::json pipeline_to_json(const PipelineResult& result) {
    nlohmann::json j;
    nlohmann::json stages = nlohmann::json::array();
    for (const StageRecord& st : result.stages) {
        nlohmann::json s;
        s["name"] = st.name;
        s["size_left"] = static_cast<std::int64_t>(st.left_values.size());
        s["size_right"] = static_cast<std::int64_t>(st.right_values.size());
        s["density"] = st.density.to_double();
        s["threshold"] = st.threshold.to_double();
        s["bad_pair_fraction"] = st.bad_pair_fraction.to_double();
        s["passed"] = st.passed;
        stages.push_back(s);
    }
    j["stages"] = stages;
    j["alpha"] = result.alpha.to_double();
    j["eps"] = result.eps_used.to_double();
    j["final_v_size"] = static_cast<std::int64_t>(result.final_v.size());
    j["final_w_size"] = static_cast<std::int64_t>(result.final_w.size());
    j["doubling_v"] = result.doubling_v.to_string();
    j["doubling_w"] = result.doubling_w.to_string();
    j["restricted_edge_count"] = result.restricted_edge_count;
    nlohmann::json certs = nlohmann::json::array();
    for (const CertificateRecord& c : result.certificates)
        certs.push_back({{"claim", c.claim}, {"passed", c.passed}});
    j["certificates"] = certs;
    return j;
}

/// Incidence instance dump: {"points": [[x,y],...], "lines": [[s,t],...]}.
inline nlohmann::json incidence_to_json(const IncidenceInstance& inst) {
    nlohmann::json j;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [x, y] : inst.points) points.push_back({x, y});
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& [s, t] : inst.lines) lines.push_back({s, t});
    j["points"] = points;
    j["lines"] = lines;
    return j;
}

inline constexpr std::int64_t kMultTableGuard = 20000;

/// |[1..n]·[1..n]| via a presence bitset over [1..n²].
inline std::int64_t mult_table_size(std::int64_t n) {
    if (n < 1 || n > kMultTableGuard)
        throw std::invalid_argument("mult_table_size: n must lie in [1, 20000]");
    const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<std::uint64_t> bits(cells / 64 + 1, 0);
    for (std::int64_t i = 1; i <= n; ++i)
        for (std::int64_t j = i; j <= n; ++j) {
            const std::size_t v = static_cast<std::size_t>(i * j) - 1;
            bits[v / 64] |= std::uint64_t{1} << (v % 64);
        }
    std::int64_t count = 0;
    for (std::uint64_t w : bits) count += std::popcount(w);
    return count;
}

/// Multiplication-table density M(n)/n² across the grid; the gate requires
/// the density column to be strictly decreasing.
inline Report run_multtable_density(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("multtable: empty grid");
    Report rep;
    rep.experiment = "multtable";
    rep.columns = {"n", "m", "density"};
    detail::add_provenance(rep, cfg);
    double prev = 2.0;
    bool decreasing = true;
    for (std::int64_t n : cfg.n_list) {
        const std::int64_t m = mult_table_size(n);
        const double density =
            static_cast<double>(m) / (static_cast<double>(n) * static_cast<double>(n));
        if (density >= prev) decreasing = false;
        prev = density;
        rep.rows.push_back({n, m, density});
    }
    rep.gate_passed = decreasing;
    rep.gate_description = "density strictly decreasing across the grid";
    return rep;
}

/// Additive energy of [1..n]·[1..n] against n^6 across the grid; the gate
/// requires the ratio column to be strictly decreasing.
inline Report run_energy_decay(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("energy-decay: empty grid");
    Report rep;
    rep.experiment = "energy_decay";
    rep.columns = {"n", "product_set_size", "energy", "ratio"};
    detail::add_provenance(rep, cfg);
    double prev = -1.0;
    bool decreasing = true;
    bool first = true;
    for (std::int64_t n : cfg.n_list) {
        if (n < 1 || n > 128)
            throw std::invalid_argument("energy-decay: n must lie in [1, 128]");
        const IntSet b = IntSet::interval(1, n);
        const IntSet bb = product_set(b, b);
        const std::int64_t e = energy(bb, OpKind::add);
        const double ratio = static_cast<double>(e) / std::pow(static_cast<double>(n), 6.0);
        if (!first && ratio >= prev) decreasing = false;
        first = false;
        prev = ratio;
        rep.rows.push_back({n, static_cast<std::int64_t>(bb.size()), e, ratio});
    }
    rep.gate_passed = decreasing;
    rep.gate_description = "energy/n^6 strictly decreasing across the grid";
    return rep;
}

namespace detail {

/// Deterministic candidate family for the subset search: prefix truncations,
/// congruence classes for small moduli, and progression covers of prefixes.
inline std::vector<std::pair<std::string, IntSet>> search_candidates(const IntSet& p) {
    std::vector<std::pair<std::string, IntSet>> out;
    out.emplace_back("full", p);
    for (std::int64_t m = p.max() / 2; m >= p.min(); m /= 2) {
        std::vector<std::int64_t> pref;
        for (std::int64_t x : p)
            if (x <= m) pref.push_back(x);
        if (pref.size() >= 1) out.emplace_back("prefix<=" + std::to_string(m), IntSet(pref));
    }
    for (std::int64_t d = 1; d <= 16; ++d) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
        for (std::int64_t x : p) ++counts[static_cast<std::size_t>(((x % d) + d) % d)];
        std::int64_t best_r = 0;
        for (std::int64_t r = 1; r < d; ++r)
            if (counts[static_cast<std::size_t>(r)] > counts[static_cast<std::size_t>(best_r)])
                best_r = r;
        std::vector<std::int64_t> cls;
        for (std::int64_t x : p)
            if (((x % d) + d) % d == best_r) cls.push_back(x);
        if (!cls.empty())
            out.emplace_back("mod" + std::to_string(d) + "=" + std::to_string(best_r),
                             IntSet(cls));
    }
    // Covers of prefixes: keep elements lying on the covering progression.
    for (std::size_t frac = 2; frac <= 4; ++frac) {
        const std::size_t keep = p.size() / frac;
        if (keep < 2) continue;
        std::vector<std::int64_t> pref(p.values().begin(),
                                       p.values().begin() + static_cast<std::ptrdiff_t>(keep));
        const Gap cover = cover_with_ap(IntSet(pref));
        std::vector<std::int64_t> on;
        for (std::int64_t x : p)
            if (membership(cover, x)) on.push_back(x);
        if (!on.empty())
            out.emplace_back("apcover(1/" + std::to_string(frac) + ")", IntSet(on));
    }
    return out;
}

}  // namespace detail

inline constexpr std::size_t kSearchCandidateCap = 8192;

/// Heuristic lower bound: the largest subset of [1..n]·[1..n] found among a
/// deterministic candidate family whose additive doubling stays at or below
/// the configured threshold. Reported, never gated.
inline Report run_small_doubling_search(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("search: empty grid");
    Report rep;
    rep.experiment = "small_doubling_search";
    rep.columns = {"n", "k", "best_size", "best_fraction", "best_doubling", "best_candidate"};
    detail::add_provenance(rep, cfg);
    for (std::int64_t n : cfg.n_list) {
        if (n < 1 || n > 512)
            throw std::invalid_argument("search: n must lie in [1, 512]");
        const IntSet b = IntSet::interval(1, n);
        const IntSet p = product_set(b, b);
        std::int64_t best_size = 0;
        Rational best_ratio(0);
        std::string best_name = "none";
        for (const auto& [name, cand] : detail::search_candidates(p)) {
            if (cand.size() > kSearchCandidateCap) continue;
            if (static_cast<std::int64_t>(cand.size()) <= best_size) continue;
            const Rational ratio = doubling_ratio(cand, OpKind::add);
            if (ratio.to_double() <= cfg.k_threshold) {
                best_size = static_cast<std::int64_t>(cand.size());
                best_ratio = ratio;
                best_name = name;
            }
        }
        const double fraction = static_cast<double>(best_size) /
                                (static_cast<double>(n) * static_cast<double>(n));
        rep.rows.push_back(
            {n, cfg.k_threshold, best_size, fraction, best_ratio.to_string(), best_name});
    }
    rep.gate_passed = true;
    rep.gate_description = "heuristic lower bound, not gated";
    return rep;
}

/// Runs the full refinement pipeline on (A = B.B, B = [1..n]) per grid point
/// and reports final sizes, doubling ratios, and progression-cover sizes for
/// the surviving sets. Pipeline failures become rows, not exceptions; the
/// gate asks every grid point to complete.
inline Report run_pipeline_demo(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("pipeline: empty grid");
    Report rep;
    rep.experiment = "pipeline_demo";
    rep.columns = {"n",          "status",      "alpha",       "eps",
                   "size_v",     "size_w",      "doubling_v",  "doubling_w",
                   "restricted_edges", "ap_cover_v",  "ap_cover_w",  "ap_cover_prod",
                   "rank2_cover_v", "rank2_cover_w", "rank2_cover_prod"};
    detail::add_provenance(rep, cfg);
    bool all_ok = true;
    rep.details["pipeline_runs"] = nlohmann::json::array();
    for (std::int64_t n : cfg.n_list) {
        if (n < 1 || n > 4096)
            throw std::invalid_argument("pipeline: n must lie in [1, 4096]");
        const IntSet b = IntSet::interval(1, n);
        const IntSet a = product_set(b, b);
        const EpsPolicy policy =
            cfg.eps ? EpsPolicy::explicit_policy(*cfg.eps) : EpsPolicy::auto_policy();
        try {
            const PipelineResult res = small_doubling_pipeline(a, b, policy);
            nlohmann::json run = pipeline_to_json(res);
            run["n"] = n;
            rep.details["pipeline_runs"].push_back(std::move(run));
            const auto ap_points = [](const IntSet& s) {
                return cover_with_ap(s).nominal_size();
            };
            const auto rank2_points = [&](const IntSet& s) -> std::int64_t {
                if (s.size() < 2) return -1;
                const auto c = cover_with_gap_rank2(s, cfg.cover_budget);
                return c ? c->nominal_size() : -1;
            };
            std::vector<std::int64_t> prods;
            for (const auto& [v, w] : res.final_edges)
                prods.push_back(detail::checked_prod(v, w));
            const IntSet prod_set = IntSet(std::move(prods));
            for (const StageRecord& st : res.stages) {
                std::ostringstream note;
                note << "n=" << n << " stage=" << st.name
                     << " left=" << st.left_values.size()
                     << " right=" << st.right_values.size() << " edges=" << st.edge_count
                     << " density=" << st.density.to_string()
                     << " threshold=" << st.threshold.to_string()
                     << " bad_fraction=" << st.bad_pair_fraction.to_string()
                     << " passed=" << (st.passed ? "yes" : "no");
                rep.notes.push_back(note.str());
            }
            rep.rows.push_back({n,
                                std::string("ok"),
                                res.alpha.to_string(),
                                res.eps_used.to_string(),
                                static_cast<std::int64_t>(res.final_v.size()),
                                static_cast<std::int64_t>(res.final_w.size()),
                                res.doubling_v.to_string(),
                                res.doubling_w.to_string(),
                                res.restricted_edge_count,
                                ap_points(res.final_v),
                                ap_points(res.final_w),
                                prod_set.empty() ? -1 : ap_points(prod_set),
                                rank2_points(res.final_v),
                                rank2_points(res.final_w),
                                prod_set.empty() ? -1 : rank2_points(prod_set)});
        } catch (const PipelineFailed& ex) {
            all_ok = false;
            rep.rows.push_back({n, std::string("failed:") + ex.stage_name, std::string("-"),
                                std::string("-"), std::int64_t{0}, std::int64_t{0},
                                std::string("-"), std::string("-"), std::int64_t{0},
                                std::int64_t{-1}, std::int64_t{-1}, std::int64_t{-1},
                                std::int64_t{-1}, std::int64_t{-1}, std::int64_t{-1}});
        }
    }
    rep.gate_passed = all_ok;
    rep.gate_description = "every grid point completed with verified certificates";
    return rep;
}

/// Superadditivity tension experiment; defaults compare [1..n] x [1..n]
/// samples against the distribution over [1..n²]. The gate requires zero
/// superadditivity violations.
inline Report run_tension(const ExperimentConfig& cfg) {
    Report rep;
    rep.experiment = "tension";
    rep.columns = {"n",       "delta",        "level_half", "level_full",
                   "sample",  "mean_pair_sum", "mean_p3",    "gap",
                   "violations", "excluded_primes"};
    detail::add_provenance(rep, cfg);
    bool ok = true;
    rep.details["tension_reports"] = nlohmann::json::array();
    const auto run_one = [&](const Gap& g1, const Gap& g2, const Gap& g3) {
        const TensionReport tr = omega_tension(g1, g2, g3, cfg.delta, cfg.sample, cfg.seed);
        if (tr.violations != 0) ok = false;
        rep.details["tension_reports"].push_back(tension_to_json(tr));
        rep.rows.push_back({tr.n, tr.delta, tr.level_half, tr.level_full, tr.sample,
                            tr.mean_pair_sum, tr.mean_p3, tr.gap, tr.violations,
                            tr.excluded_primes});
    };
    if (cfg.gap1 || cfg.gap2 || cfg.gap3) {
        if (!(cfg.gap1 && cfg.gap2 && cfg.gap3))
            throw std::invalid_argument("tension: provide all three Gaps or none");
        run_one(*cfg.gap1, *cfg.gap2, *cfg.gap3);
    } else {
        if (cfg.n_list.empty()) throw std::invalid_argument("tension: empty grid");
        for (std::int64_t n : cfg.n_list) {
            if (n < 4 || n > 10000)
                throw std::invalid_argument("tension: n must lie in [4, 10000]");
            const Gap g1(1, {1}, {n - 1});
            const Gap g3(1, {1}, {n * n - 1});
            run_one(g1, g1, g3);
        }
    }
    rep.gate_passed = ok;
    rep.gate_description = "superadditivity violations = 0";
    return rep;
}

/// Omega distribution summary of a Gap; the table excludes primes dividing
/// any of the Gap's differences and is bounded by the Gap's size.
inline Report run_omega_stats(const ExperimentConfig& cfg) {
    Report rep;
    rep.experiment = "omega_stats";
    rep.columns = {"n", "mean", "variance", "band_center", "band_halfwidth", "outside_fraction"};
    detail::add_provenance(rep, cfg);
    const auto run_one = [&](const Gap& g) {
        const std::int64_t n = g.nominal_size();
        const PrimePowerTable full = sieve_prime_powers(std::max<std::int64_t>(n, 2), {});
        const PrimePowerTable table = restricted_primes(g.diffs, full).table;
        const OmegaStats stats = omega_stats_over_gap(g, table);
        rep.rows.push_back({stats.n, stats.mean, stats.variance, stats.band_center,
                            stats.band_halfwidth, stats.outside_fraction});
    };
    if (cfg.gap1) {
        run_one(*cfg.gap1);
    } else {
        if (cfg.n_list.empty()) throw std::invalid_argument("omega-stats: empty grid");
        for (std::int64_t n : cfg.n_list) {
            if (n < 16) throw std::invalid_argument("omega-stats: n must be at least 16");
            run_one(Gap(1, {1}, {n - 1}));
        }
    }
    rep.gate_passed = true;
    return rep;
}

inline void write_report(std::ostream& out, const Report& rep, const std::string& format) {
    if (format == "json") {
        out << report_to_json(rep).dump(2) << "\n";
    } else if (format == "csv") {
        write_csv(out, rep);
    } else {
        throw std::invalid_argument("unknown report format '" + format + "'");
    }
}

}  // namespace dlab
