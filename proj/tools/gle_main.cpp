#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gle/ensemble.hpp"
#include "gle/exact.hpp"
#include "gle/experiments.hpp"
#include "gle/limit_density.hpp"
#include "gle/rng.hpp"
#include "gle/samplers.hpp"
#include "gle/scaling.hpp"
#include "gle/spec_io.hpp"

namespace {

std::string slurp_config(const std::string& path) {
    if (path.empty()) {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw gle::parse_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string frac_str(const gle::ExactProb& q) {
    const gle::ExactCount num = boost::multiprecision::numerator(q);
    const gle::ExactCount den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

void emit(const std::string& out_dir, const std::string& filename, const std::string& body) {
    if (out_dir.empty()) {
        std::cout << body;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / filename).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gle::error("cannot write " + path);
    out << body;
    std::cerr << "wrote " << path << "\n";
}

std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool config_bool(const gle::ConfigDoc& doc, const std::string& section, const std::string& key,
                 bool fallback) {
    if (!doc.has(section, key)) return fallback;
    const std::string v = doc.get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw gle::parse_error("expected a boolean for '" + key + "', got '" + v + "'");
}

struct CommonOpts {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_count(const CommonOpts& common, const std::string& method, long long cap) {
    const gle::EnsembleSpec spec = gle::parse_ensemble_spec(slurp_config(common.config));
    gle::ExactCount n;
    const bool lgv_ok = !spec.top.is_path() && !spec.bottom.is_path() && spec.S_is_full();
    if (method == "lgv" || (method == "auto" && lgv_ok))
        n = gle::count_avoid_lgv(spec);
    else
        n = gle::count_avoid_enum(spec, cap);
    std::cout << n.str() << "\n";
    return 0;
}

int cmd_pmf(const CommonOpts& common, long at, bool at_set) {
    const gle::EnsembleSpec spec = gle::parse_ensemble_spec(slurp_config(common.config));
    const gle::Time m = at_set ? static_cast<gle::Time>(at) : (spec.T0 + spec.T1) / 2;
    const gle::PmfTable table = gle::fixed_time_pmf(spec, m);
    std::ostringstream os;
    for (int i = 1; i <= spec.k; ++i) os << "lambda_" << i << ",";
    os << "prob_num,prob_den\n";
    for (const auto& [lambda, prob] : table.prob) {
        for (gle::Level v : lambda) os << v << ",";
        os << boost::multiprecision::numerator(prob).str() << ","
           << boost::multiprecision::denominator(prob).str() << "\n";
    }
    emit(common.out_dir, "pmf.csv", os.str());
    return 0;
}

int cmd_accept(const CommonOpts& common, long long cap) {
    const gle::EnsembleSpec spec = gle::parse_ensemble_spec(slurp_config(common.config));
    std::cout << frac_str(gle::acceptance_probability(spec, cap)) << "\n";
    return 0;
}

int cmd_sample(const CommonOpts& common, const std::string& method, long replicates,
               long long max_tries) {
    const gle::EnsembleSpec spec = gle::parse_ensemble_spec(slurp_config(common.config));
    const gle::RngHandle root(common.seed, 0x73616d70);
    std::ostringstream os;
    os << "replicate,path_index,time,value\n";
    for (long r = 0; r < replicates; ++r) {
        gle::RngHandle rng = root.derived(static_cast<std::uint64_t>(r));
        gle::BernoulliLineEnsemble ens =
            (method == "rejection") ? gle::rejection_sample(rng, spec, max_tries).ensemble
                                    : gle::sequential_exact_sample(rng, spec);
        for (int i = 0; i < ens.k(); ++i)
            for (gle::Time t = ens.t0(); t <= ens.t1(); ++t)
                os << r << "," << (i + 1) << "," << t << "," << ens.paths[static_cast<size_t>(i)].at(t)
                   << "\n";
    }
    emit(common.out_dir, "samples.csv", os.str());
    return 0;
}

int cmd_glauber(const CommonOpts& common, long long steps, bool steps_set) {
    const gle::EnsembleSpec spec = gle::parse_ensemble_spec(slurp_config(common.config));
    gle::RngHandle rng(common.seed, 0x676c6175);
    const long long n = steps_set ? steps : gle::default_burnin(spec);
    const gle::BernoulliLineEnsemble ens = gle::glauber_run(rng, spec, n);
    std::ostringstream os;
    os << "path_index,time,value\n";
    for (int i = 0; i < ens.k(); ++i)
        for (gle::Time t = ens.t0(); t <= ens.t1(); ++t)
            os << (i + 1) << "," << t << "," << ens.paths[static_cast<size_t>(i)].at(t) << "\n";
    emit(common.out_dir, "state.csv", os.str());
    return 0;
}

int cmd_density(const CommonOpts& common, const std::string& z_arg, const std::string& grid_arg) {
    const gle::LimitSpec spec = gle::parse_limit_spec(slurp_config(common.config));
    const gle::DensityEval density = gle::make_density(spec);
    if (!z_arg.empty()) {
        const std::vector<double> z = gle::parse_double_list(z_arg);
        std::cout << fmt17(density.rho(z)) << "\n";
        return 0;
    }
    if (grid_arg.empty()) throw gle::parse_error("density needs --z or --grid");
    const std::vector<double> g = gle::parse_double_list(grid_arg);
    if (g.size() != 3 || g[2] < 2 || g[1] <= g[0])
        throw gle::parse_error("--grid expects 'lo, hi, points' with hi > lo and points >= 2");
    const int n = static_cast<int>(g[2]);
    std::vector<double> axis(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) axis[static_cast<size_t>(i)] = g[0] + (g[1] - g[0]) * i / (n - 1);

    std::ostringstream os;
    for (int i = 1; i <= spec.k; ++i) os << "z_" << i << ",";
    os << "rho\n";
    std::vector<int> idx(static_cast<size_t>(spec.k), 0);
    std::vector<double> z(static_cast<size_t>(spec.k));
    for (;;) {
        bool ordered = true;
        for (int i = 0; i < spec.k; ++i) {
            z[static_cast<size_t>(i)] = axis[static_cast<size_t>(idx[static_cast<size_t>(i)])];
            if (i > 0 && z[static_cast<size_t>(i)] > z[static_cast<size_t>(i - 1)]) ordered = false;
        }
        if (ordered) {
            for (double v : z) os << fmt17(v) << ",";
            os << fmt17(density.rho(z)) << "\n";
        }
        int d = spec.k - 1;
        while (d >= 0 && ++idx[static_cast<size_t>(d)] == n) {
            idx[static_cast<size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    emit(common.out_dir, "density_grid.csv", os.str());
    return 0;
}

int cmd_zc(const CommonOpts& common, const std::string& method, double rel_tol) {
    const gle::LimitSpec spec = gle::parse_limit_spec(slurp_config(common.config));
    double value = 0.0;
    if (method == "closed")
        value = gle::zc_closed_form(spec);
    else if (method == "quadrature")
        value = gle::zc_quadrature(spec, rel_tol);
    else
        value = spec.distinct() ? gle::zc_closed_form(spec) : gle::zc_quadrature(spec, rel_tol);
    std::cout << fmt17(value) << "\n";
    return 0;
}

int cmd_experiment(const CommonOpts& common) {
    const gle::ConfigDoc doc = gle::parse_config(slurp_config(common.config));
    const std::string which = doc.get("", "experiment");
    const std::string out_dir = common.out_dir.empty() ? "." : common.out_dir;
    gle::ExperimentReport report;

    if (which == "convergence") {
        gle::ConvergenceOptions opt;
        opt.scaling = gle::make_scaling_spec(doc.get_double("scaling", "p"), doc.get_double("scaling", "t"),
                                             doc.get_doubles("scaling", "a"), doc.get_doubles("scaling", "b"));
        opt.T_values = doc.get_longs("convergence", "T_values");
        opt.n_samples = doc.get_long("convergence", "n_samples");
        opt.threshold = doc.get_double_or("convergence", "threshold", opt.threshold);
        opt.noise_band = doc.get_double_or("convergence", "noise_band", opt.noise_band);
        opt.write_samples = config_bool(doc, "convergence", "write_samples", false);
        opt.threads = common.threads;
        opt.out_dir = out_dir;
        report = gle::run_convergence(opt, common.seed);
    } else if (which == "coupling") {
        gle::CouplingOptions opt;
        opt.n_pairs = static_cast<int>(doc.get_long_or("coupling", "n_pairs", opt.n_pairs));
        opt.steps_per_pair = doc.get_long_or("coupling", "steps_per_pair", opt.steps_per_pair);
        opt.k_max = static_cast<int>(doc.get_long_or("coupling", "k_max", opt.k_max));
        opt.T_max = doc.get_long_or("coupling", "T_max", opt.T_max);
        opt.check_marginals = config_bool(doc, "coupling", "check_marginals", false);
        opt.marginal_steps = doc.get_long_or("coupling", "marginal_steps", opt.marginal_steps);
        opt.marginal_cap = doc.get_long_or("coupling", "marginal_cap", opt.marginal_cap);
        opt.tv_threshold = doc.get_double_or("coupling", "tv_threshold", opt.tv_threshold);
        opt.threads = common.threads;
        opt.out_dir = out_dir;
        report = gle::run_coupling_test(opt, common.seed);
    } else if (which == "gibbs") {
        gle::GibbsOptions opt;
        opt.spec = gle::ensemble_spec_from(doc, "spec");
        opt.a = doc.get_long("gibbs", "a");
        opt.b = doc.get_long("gibbs", "b");
        opt.k1 = static_cast<int>(doc.get_long("gibbs", "k1"));
        opt.k2 = static_cast<int>(doc.get_long("gibbs", "k2"));
        opt.cap = doc.get_long_or("gibbs", "cap", opt.cap);
        report = gle::run_gibbs_invariance(opt);
        report.seed = common.seed;
    } else if (which == "mingap") {
        gle::MingapOptions opt;
        opt.scaling = gle::make_scaling_spec(doc.get_double("scaling", "p"), doc.get_double("scaling", "t"),
                                             doc.get_doubles("scaling", "a"), doc.get_doubles("scaling", "b"));
        opt.T = doc.get_long("mingap", "T");
        opt.n_samples = doc.get_long("mingap", "n_samples");
        opt.deltas = doc.get_doubles("mingap", "deltas");
        opt.eps_threshold = doc.get_double_or("mingap", "eps_threshold", opt.eps_threshold);
        opt.threads = common.threads;
        opt.out_dir = out_dir;
        report = gle::run_mingap(opt, common.seed);
    } else {
        throw gle::parse_error("unknown experiment '" + which + "'");
    }

    gle::write_report(report, out_dir);
    std::cout << report.to_string();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact counting, sampling, and limit-density tools for avoiding Bernoulli line "
                 "ensembles"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config, "Input document path (stdin when omitted)");
    app.add_option("--seed", common.seed, "RNG seed");
    app.add_option("--out", common.out_dir, "Output directory for CSV / report files");
    app.add_option("--threads", common.threads, "Worker threads (GLE_THREADS as fallback)");

    std::string method_count = "auto";
    long long cap = gle::kDefaultEnumCap;
    auto* count = app.add_subcommand("count", "Number of admissible ensembles");
    count->add_option("--method", method_count, "auto | lgv | enum")
        ->check(CLI::IsMember({"auto", "lgv", "enum"}));
    count->add_option("--cap", cap, "Enumeration size cap");

    long at = 0;
    auto* pmf = app.add_subcommand("pmf", "Exact law of the column at a fixed time");
    auto* at_opt = pmf->add_option("--at", at, "Column time (default: window midpoint)");

    auto* accept = app.add_subcommand("accept", "Acceptance probability as a reduced fraction");
    accept->add_option("--cap", cap, "Enumeration size cap");

    std::string method_sample = "sequential";
    long replicates = 1;
    long long max_tries = 1000000;
    auto* sample = app.add_subcommand("sample", "Draw uniform ensembles");
    sample->add_option("--method", method_sample, "sequential | rejection")
        ->check(CLI::IsMember({"sequential", "rejection"}));
    sample->add_option("--replicates", replicates, "Number of draws");
    sample->add_option("--max-tries", max_tries, "Rejection retry limit");

    long long steps = 0;
    auto* glauber = app.add_subcommand("glauber", "Run the single-site chain, print the final state");
    auto* steps_opt = glauber->add_option("--steps", steps, "Moves (default: the burn-in heuristic)");

    std::string z_arg, grid_arg;
    auto* density = app.add_subcommand("density", "Evaluate the limiting density");
    density->add_option("--z", z_arg, "Point, e.g. '0.3, -0.2'");
    density->add_option("--grid", grid_arg, "'lo, hi, points' mesh per coordinate");

    std::string method_zc = "auto";
    double rel_tol = 1e-6;
    auto* zc = app.add_subcommand("zc", "Normalizing constant of the limiting density");
    zc->add_option("--method", method_zc, "auto | closed | quadrature")
        ->check(CLI::IsMember({"auto", "closed", "quadrature"}));
    zc->add_option("--rel-tol", rel_tol, "Quadrature refinement tolerance");

    auto* experiment = app.add_subcommand("experiment", "Run an experiment config, emit report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (count->parsed()) return cmd_count(common, method_count, cap);
        if (pmf->parsed()) return cmd_pmf(common, at, at_opt->count() > 0);
        if (accept->parsed()) return cmd_accept(common, cap);
        if (sample->parsed()) return cmd_sample(common, method_sample, replicates, max_tries);
        if (glauber->parsed()) return cmd_glauber(common, steps, steps_opt->count() > 0);
        if (density->parsed()) return cmd_density(common, z_arg, grid_arg);
        if (zc->parsed()) return cmd_zc(common, method_zc, rel_tol);
        if (experiment->parsed()) return cmd_experiment(common);
    } catch (const gle::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
