// Command-line front end: experiment runners and direct access to the set
// calculus. Exit codes: 0 success, 1 gate failure, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlab/dlab.hpp"

namespace {

struct CliOptions {
    std::string out_path;
    std::string format = "csv";
    std::int64_t seed = 1;
    std::string n_list;
    std::string gap1, gap2, gap3;
    std::vector<std::string> set_files;
    double k = 2.0;
    double delta = 1.0;
    std::int64_t sample = 10000;
    std::string eps;
    std::string kind = "add";
    std::string algo = "auto";
    std::int64_t budget = 64;
};

void add_shared_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--out", opt.out_path, "output path (default: stdout)");
    cmd->add_option("--format", opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opt.seed, "seed for all randomized draws");
    cmd->add_option("--n-list", opt.n_list, "comma-separated grid, e.g. 10,50,100");
    cmd->add_option("--gap", opt.gap1, "Gap descriptor base;d1:L1,d2:L2,...");
    cmd->add_option("--set-file", opt.set_files, "set file (one integer per line)");
    cmd->add_option("--k", opt.k, "doubling threshold");
    cmd->add_option("--delta", opt.delta, "level exponent in (0,1]");
    cmd->add_option("--sample", opt.sample, "sample size");
}

std::vector<std::int64_t> parse_n_list(const std::string& text,
                                       std::vector<std::int64_t> fallback) {
    if (text.empty()) return fallback;
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, comma - pos);
        try {
            out.push_back(std::stoll(tok));
        } catch (...) {
            throw dlab::ParseError("--n-list: cannot parse '" + tok + "'");
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

// Accepts "p/q" or a decimal like "0.25"; both convert exactly.
dlab::Rational parse_rational(const std::string& text) {
    const std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        return dlab::Rational(std::stoll(text.substr(0, slash)),
                              std::stoll(text.substr(slash + 1)));
    }
    const std::size_t dot = text.find('.');
    if (dot == std::string::npos) return dlab::Rational(std::stoll(text));
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 18) throw dlab::ParseError("--eps: too many decimal digits");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t sign = (!whole.empty() && whole[0] == '-') ? -1 : 1;
    const std::int64_t wpart = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
    const std::int64_t fpart = frac.empty() ? 0 : std::stoll(frac);
    return dlab::Rational(wpart * den + sign * fpart, den);
}

dlab::ExperimentConfig make_config(const CliOptions& opt,
                                   std::vector<std::int64_t> default_grid) {
    dlab::ExperimentConfig cfg;
    cfg.n_list = parse_n_list(opt.n_list, std::move(default_grid));
    cfg.k_threshold = opt.k;
    cfg.delta = opt.delta;
    cfg.sample = opt.sample;
    cfg.seed = opt.seed;
    cfg.cover_budget = opt.budget;
    if (!opt.gap1.empty()) cfg.gap1 = dlab::parse_gap(opt.gap1);
    if (!opt.gap2.empty()) cfg.gap2 = dlab::parse_gap(opt.gap2);
    if (!opt.gap3.empty()) cfg.gap3 = dlab::parse_gap(opt.gap3);
    if (!opt.eps.empty()) cfg.eps = parse_rational(opt.eps);
    return cfg;
}

int emit_report(const dlab::Report& rep, const CliOptions& opt) {
    if (opt.out_path.empty()) {
        dlab::write_report(std::cout, rep, opt.format);
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw dlab::Error("cannot open '" + opt.out_path + "' for writing");
        dlab::write_report(out, rep, opt.format);
    }
    return rep.gate_passed ? 0 : 1;
}

int emit_set(const dlab::IntSet& s, const CliOptions& opt) {
    if (opt.out_path.empty()) {
        dlab::write_intset(std::cout, s);
    } else {
        dlab::save_intset(opt.out_path, s);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"doubling-lab: exact sum/product set calculus and experiments"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* multtable = app.add_subcommand("multtable", "multiplication table density");
    CLI::App* energy_decay = app.add_subcommand("energy-decay", "additive energy of product sets");
    CLI::App* search = app.add_subcommand("search", "small-doubling subset search");
    CLI::App* pipeline = app.add_subcommand("pipeline", "graph refinement pipeline demo");
    CLI::App* tension = app.add_subcommand("tension", "two-level divisor tension experiment");
    CLI::App* omega_stats = app.add_subcommand("omega-stats", "omega distribution over a Gap");
    CLI::App* energy_cmd = app.add_subcommand("energy", "energy of a set file");
    CLI::App* sumset_cmd = app.add_subcommand("sumset", "sumset/product set of set files");
    for (CLI::App* cmd : {multtable, energy_decay, search, pipeline, tension, omega_stats,
                          energy_cmd, sumset_cmd})
        add_shared_flags(cmd, opt);
    tension->add_option("--gap2", opt.gap2, "second Gap descriptor");
    tension->add_option("--gap3", opt.gap3, "third Gap descriptor");
    pipeline->add_option("--eps", opt.eps, "explicit epsilon (rational or decimal)");
    pipeline->add_option("--cover-budget", opt.budget, "candidate budget for rank-2 covers");
    energy_cmd->add_option("--kind", opt.kind, "add|mul")
        ->check(CLI::IsMember({"add", "mul"}));
    energy_cmd->add_option("--algo", opt.algo, "auto|naive|convolution|brute")
        ->check(CLI::IsMember({"auto", "naive", "convolution", "brute"}));
    sumset_cmd->add_option("--kind", opt.kind, "add|mul")
        ->check(CLI::IsMember({"add", "mul"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*multtable)
            return emit_report(
                dlab::run_multtable_density(make_config(opt, {10, 50, 100, 500, 1000, 5000})),
                opt);
        if (*energy_decay)
            return emit_report(dlab::run_energy_decay(make_config(opt, {8, 16, 32, 64})), opt);
        if (*search)
            return emit_report(dlab::run_small_doubling_search(make_config(opt, {8, 16, 32})),
                               opt);
        if (*pipeline)
            return emit_report(dlab::run_pipeline_demo(make_config(opt, {32, 64})), opt);
        if (*tension)
            return emit_report(dlab::run_tension(make_config(opt, {1000})), opt);
        if (*omega_stats)
            return emit_report(dlab::run_omega_stats(make_config(opt, {1000})), opt);
        if (*energy_cmd) {
            if (opt.set_files.size() != 1)
                throw std::invalid_argument("energy: exactly one --set-file required");
            const dlab::IntSet u = dlab::load_intset(opt.set_files[0]);
            const dlab::OpKind kind = opt.kind == "mul" ? dlab::OpKind::mul : dlab::OpKind::add;
            std::int64_t value = 0;
            if (opt.algo == "brute") {
                value = dlab::energy_bruteforce(u, kind);
            } else {
                const dlab::EnergyAlgo algo = opt.algo == "naive"
                                                  ? dlab::EnergyAlgo::naive
                                                  : (opt.algo == "convolution"
                                                         ? dlab::EnergyAlgo::convolution
                                                         : dlab::EnergyAlgo::automatic);
                value = dlab::energy(u, kind, algo);
            }
            dlab::Report rep;
            rep.experiment = "energy";
            rep.columns = {"n", "kind", "algo", "energy"};
            rep.provenance.emplace_back("version", dlab::kVersion);
            rep.provenance.emplace_back("set_file", opt.set_files[0]);
            rep.rows.push_back({static_cast<std::int64_t>(u.size()), opt.kind, opt.algo, value});
            return emit_report(rep, opt);
        }
        if (*sumset_cmd) {
            if (opt.set_files.empty() || opt.set_files.size() > 2)
                throw std::invalid_argument("sumset: one or two --set-file options required");
            const dlab::IntSet u = dlab::load_intset(opt.set_files[0]);
            const dlab::IntSet w =
                opt.set_files.size() == 2 ? dlab::load_intset(opt.set_files[1]) : u;
            const dlab::IntSet result =
                opt.kind == "mul" ? dlab::product_set(u, w) : dlab::sumset(u, w);
            return emit_set(result, opt);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 2;
}
