#include "gle/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gle/limit_density.hpp"
#include "gle/rng.hpp"
#include "gle/samplers.hpp"
#include "gle/spec_io.hpp"

namespace gle {

using nlohmann::ordered_json;

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GLE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return 1;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<long>(threads, n));
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ordered_json ExperimentReport::to_json() const {
    ordered_json j;
    j["experiment"] = experiment;
    j["schema_version"] = schema_version;
    j["config"] = config;
    j["seed"] = seed;
    j["statistics"] = statistics;
    if (pass.has_value()) j["pass"] = *pass;
    return j;
}

std::string ExperimentReport::to_string() const { return to_json().dump(2) + "\n"; }

std::string write_report(const ExperimentReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / "report.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gle::error("cannot write " + path);
    out << report.to_string();
    return path;
}

namespace {

ordered_json scaling_json(const ScalingSpec& s) {
    return ordered_json{{"p", s.p}, {"t", s.t}, {"a", s.a}, {"b", s.b}};
}

void write_text(const std::string& dir, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(dir);
    std::ofstream out((std::filesystem::path(dir) / name).string(), std::ios::binary);
    if (!out) throw gle::error("cannot write " + name + " under " + dir);
    out << body;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Continuity-corrected sup-CDF distance between the empirical law of integer
// column values and a model CDF of the rescaled variable: the model is read
// at the midpoints of the lattice cells of width 1/sqrt(T).
double sup_cdf_distance(std::vector<Level> values, double center, double root_t,
                        const MarginalCdf& model) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double half = 0.5 / root_t;
    double dist = 0.0;
    size_t i = 0;
    size_t cum = 0;
    while (i < values.size()) {
        size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double atom = (static_cast<double>(values[i]) - center) / root_t;
        const double before = static_cast<double>(cum) / n;
        cum += j - i;
        const double after = static_cast<double>(cum) / n;
        dist = std::max(dist, std::abs(before - model(atom - half)));
        dist = std::max(dist, std::abs(after - model(atom + half)));
        i = j;
    }
    return dist;
}

std::vector<Level> flatten(const BernoulliLineEnsemble& ens) {
    std::vector<Level> key;
    for (const auto& p : ens.paths) key.insert(key.end(), p.values.begin(), p.values.end());
    return key;
}

// Distinct admissible states of a small spec, as flattened vectors.
std::vector<std::vector<Level>> enumerate_states(const EnsembleSpec& spec, long long cap) {
    std::vector<std::vector<Level>> states;
    for_each_admissible(
        spec, [&](const BernoulliLineEnsemble& ens) { states.push_back(flatten(ens)); }, cap);
    std::sort(states.begin(), states.end());
    return states;
}

double glauber_tv_against_uniform(const EnsembleSpec& spec,
                                  const std::vector<std::vector<Level>>& states,
                                  long long n_obs, const RngHandle& stream) {
    std::map<std::vector<Level>, long long> index_of;
    std::vector<long long> counts(states.size(), 0);
    for (size_t i = 0; i < states.size(); ++i) index_of[states[i]] = static_cast<long long>(i);
    RngHandle rng = stream;
    const long long stride = std::max<long long>(1, spec.k * spec.width());
    glauber_sample_states(
        rng, spec, default_burnin(spec), n_obs, stride,
        [&](const BernoulliLineEnsemble& ens) {
            const auto it = index_of.find(flatten(ens));
            if (it == index_of.end()) throw inadmissible_state("chain left the admissible set");
            ++counts[static_cast<size_t>(it->second)];
        });
    const double uniform = 1.0 / static_cast<double>(states.size());
    double tv = 0.0;
    for (long long c : counts)
        tv += std::abs(static_cast<double>(c) / static_cast<double>(n_obs) - uniform);
    return 0.5 * tv;
}

} // namespace

ExperimentReport run_convergence(const ConvergenceOptions& opt, std::uint64_t seed) {
    if (opt.T_values.empty()) throw std::invalid_argument("T_values must be nonempty");
    std::vector<long> Ts = opt.T_values;
    std::sort(Ts.begin(), Ts.end());

    ExperimentReport report;
    report.experiment = "convergence";
    report.seed = seed;
    report.config = ordered_json{{"scaling", scaling_json(opt.scaling)},
                                 {"T_values", Ts},
                                 {"n_samples", opt.n_samples},
                                 {"threshold", opt.threshold},
                                 {"noise_band", opt.noise_band}};

    if (opt.n_samples <= 0) {
        report.statistics.push_back(ordered_json{{"note", "insufficient data"}, {"n_samples", 0}});
        return report;
    }

    const int k = opt.scaling.k;
    const int threads = thread_count(opt.threads);
    const RngHandle root(seed, 0x636f6e76);
    std::vector<double> max_dist_per_T;
    std::ostringstream cdf_csv, samples_csv;
    cdf_csv << "T,coord,value,F_empirical,F_model\n";
    samples_csv << "T,replicate,coord,value\n";

    for (size_t ti = 0; ti < Ts.size(); ++ti) {
        const long T = Ts[ti];
        const ScaledBoundary sb = boundary_for(opt.scaling, T);
        const EnsembleSpec espec = make_spec(0, static_cast<Time>(T), sb.x, sb.y);

        // The comparison density uses the endpoints the lattice actually
        // realizes at this T; the floor in boundary_for moves them by up to
        // 1/sqrt(T) and that offset would otherwise swamp the distances.
        const double rt = std::sqrt(static_cast<double>(T));
        std::vector<double> aT(static_cast<size_t>(k)), bT(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) {
            aT[static_cast<size_t>(i)] = static_cast<double>(sb.x[static_cast<size_t>(i)]) / rt;
            bT[static_cast<size_t>(i)] =
                (static_cast<double>(sb.y[static_cast<size_t>(i)]) -
                 opt.scaling.p * static_cast<double>(T)) /
                rt;
        }
        const DensityEval density =
            make_density(make_limit_spec(opt.scaling.p, opt.scaling.t, aT, bT));
        std::vector<MarginalCdf> model;
        model.reserve(static_cast<size_t>(k));
        for (int c = 1; c <= k; ++c) model.push_back(marginal_cdf(density, c));

        std::vector<std::vector<Level>> columns(static_cast<size_t>(opt.n_samples));
        parallel_for(opt.n_samples, threads, [&](long r) {
            RngHandle rng = root.derived(static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(r));
            const BernoulliLineEnsemble ens = sequential_exact_sample(rng, espec);
            std::vector<Level>& col = columns[static_cast<size_t>(r)];
            col.resize(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) col[static_cast<size_t>(i)] = ens.paths[static_cast<size_t>(i)].at(sb.m);
        });

        const double root_t = std::sqrt(static_cast<double>(T));
        const double center = opt.scaling.p * opt.scaling.t * static_cast<double>(T);
        ordered_json per_coord = ordered_json::array();
        double dmax = 0.0;
        for (int i = 0; i < k; ++i) {
            std::vector<Level> vals(static_cast<size_t>(opt.n_samples));
            for (long r = 0; r < opt.n_samples; ++r)
                vals[static_cast<size_t>(r)] = columns[static_cast<size_t>(r)][static_cast<size_t>(i)];
            const double d = sup_cdf_distance(vals, center, root_t, model[static_cast<size_t>(i)]);
            per_coord.push_back(d);
            dmax = std::max(dmax, d);

            if (!opt.out_dir.empty()) {
                std::sort(vals.begin(), vals.end());
                size_t j = 0, cum = 0;
                while (j < vals.size()) {
                    size_t e = j;
                    while (e < vals.size() && vals[e] == vals[j]) ++e;
                    cum += e - j;
                    const double atom = (static_cast<double>(vals[j]) - center) / root_t;
                    cdf_csv << T << ',' << (i + 1) << ',' << fmt(atom) << ','
                            << fmt(static_cast<double>(cum) / static_cast<double>(opt.n_samples))
                            << ',' << fmt(model[static_cast<size_t>(i)](atom + 0.5 / root_t)) << "\n";
                    j = e;
                }
            }
        }
        if (!opt.out_dir.empty() && opt.write_samples) {
            for (long r = 0; r < opt.n_samples; ++r)
                for (int i = 0; i < k; ++i)
                    samples_csv << T << ',' << r << ',' << (i + 1) << ','
                                << columns[static_cast<size_t>(r)][static_cast<size_t>(i)] << "\n";
        }
        max_dist_per_T.push_back(dmax);
        report.statistics.push_back(ordered_json{{"T", T},
                                                 {"m", sb.m},
                                                 {"n", opt.n_samples},
                                                 {"sup_cdf", per_coord},
                                                 {"sup_cdf_max", dmax}});
    }

    bool ok = max_dist_per_T.back() <= opt.threshold;
    for (size_t j = 1; j < max_dist_per_T.size(); ++j)
        if (max_dist_per_T[j] > max_dist_per_T[j - 1] + opt.noise_band) ok = false;
    report.pass = ok;

    if (!opt.out_dir.empty()) {
        write_text(opt.out_dir, "cdf.csv", cdf_csv.str());
        if (opt.write_samples) write_text(opt.out_dir, "samples.csv", samples_csv.str());
    }
    return report;
}

namespace {

UpRightPath random_barrier_path(RngHandle& rng, Time T0, Time T1, Level start) {
    std::vector<Level> vals;
    vals.reserve(static_cast<size_t>(T1 - T0 + 1));
    Level v = start;
    vals.push_back(v);
    for (Time t = T0; t < T1; ++t) {
        v += static_cast<Level>(rng.below(2));
        vals.push_back(v);
    }
    return make_path(T0, std::move(vals));
}

std::vector<Level> random_weakly_decreasing(RngHandle& rng, int k, Level lo, Level hi) {
    std::vector<Level> v(static_cast<size_t>(k));
    Level cap = hi;
    for (int i = 0; i < k; ++i) {
        v[static_cast<size_t>(i)] = rng.uniform_int(lo, cap);
        cap = v[static_cast<size_t>(i)];
    }
    return v;
}

UpRightPath shift_path(const UpRightPath& p, Level d) {
    std::vector<Level> vals = p.values;
    for (Level& v : vals) v += d;
    return make_path(p.t0, std::move(vals));
}

} // namespace

std::vector<std::pair<EnsembleSpec, EnsembleSpec>> random_ordered_pairs(int n_pairs, int k_max,
                                                                        long T_max,
                                                                        std::uint64_t seed) {
    if (n_pairs < 1 || k_max < 1 || T_max < 1) throw std::invalid_argument("bad pair-generator arguments");
    std::vector<std::pair<EnsembleSpec, EnsembleSpec>> out;
    out.reserve(static_cast<size_t>(n_pairs));
    const RngHandle root(seed, 0x70616972);
    for (int pi = 0; pi < n_pairs; ++pi) {
        RngHandle rng = root.derived(static_cast<std::uint64_t>(pi));
        for (int attempt = 0;; ++attempt) {
            if (attempt > 2000)
                throw gle::error("could not generate a feasible ordered pair; loosen the ranges");
            const int k = static_cast<int>(rng.uniform_int(1, k_max));
            const Time T = static_cast<Time>(rng.uniform_int(2, T_max));

            std::vector<Level> xl = random_weakly_decreasing(rng, k, -2, 2);
            std::vector<Level> yl(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) {
                const Level lo = xl[static_cast<size_t>(i)];
                Level hi = xl[static_cast<size_t>(i)] + T;
                if (i > 0) hi = std::min(hi, yl[static_cast<size_t>(i - 1)]);
                if (hi < lo) {
                    yl.clear();
                    break;
                }
                yl[static_cast<size_t>(i)] = rng.uniform_int(lo, hi);
            }
            if (yl.empty()) continue;

            std::vector<Level> xh = xl, yh = yl;
            for (int i = 0; i < k; ++i) {
                xh[static_cast<size_t>(i)] += rng.uniform_int(0, 2);
                if (i > 0)
                    xh[static_cast<size_t>(i)] =
                        std::min(xh[static_cast<size_t>(i)], xh[static_cast<size_t>(i - 1)]);
                yh[static_cast<size_t>(i)] += rng.uniform_int(0, 2);
                if (i > 0)
                    yh[static_cast<size_t>(i)] =
                        std::min(yh[static_cast<size_t>(i)], yh[static_cast<size_t>(i - 1)]);
                yh[static_cast<size_t>(i)] = std::max(yh[static_cast<size_t>(i)], xh[static_cast<size_t>(i)]);
                yh[static_cast<size_t>(i)] = std::min(yh[static_cast<size_t>(i)], xh[static_cast<size_t>(i)] + T);
            }

            Barrier top_l = Barrier::plus_infinity(), top_h = Barrier::plus_infinity();
            Barrier bot_l = Barrier::minus_infinity(), bot_h = Barrier::minus_infinity();
            if (rng.below(10) < 4) {
                const UpRightPath f = random_barrier_path(rng, 0, T, xl[0] + static_cast<Level>(rng.below(3)));
                top_l = Barrier::path(f);
                top_h = Barrier::path(shift_path(f, static_cast<Level>(rng.below(3))));
            }
            if (rng.below(10) < 4) {
                const UpRightPath g =
                    random_barrier_path(rng, 0, T, xl[static_cast<size_t>(k - 1)] - 1 - static_cast<Level>(rng.below(3)));
                bot_l = Barrier::path(g);
                bot_h = Barrier::path(shift_path(g, static_cast<Level>(rng.below(2))));
            }

            std::vector<Time> S;
            if (rng.below(10) < 2) {
                for (Time t = 0; t <= T; ++t)
                    if (t == 0 || t == T || rng.below(2) == 0) S.push_back(t);
            } else {
                for (Time t = 0; t <= T; ++t) S.push_back(t);
            }

            try {
                EnsembleSpec low = make_spec(0, T, xl, yl, top_l, bot_l, S);
                EnsembleSpec high = make_spec(0, T, xh, yh, top_h, bot_h, S);
                if (!boundary_feasible(low).ok() || !boundary_feasible(high).ok()) continue;
                maximal_ensemble(low);
                maximal_ensemble(high);
                out.emplace_back(std::move(low), std::move(high));
            } catch (const gle::error&) {
                continue;
            } catch (const std::invalid_argument&) {
                continue;
            }
            break;
        }
    }
    return out;
}

ExperimentReport run_coupling_test(const std::vector<std::pair<EnsembleSpec, EnsembleSpec>>& pairs,
                                   const CouplingOptions& opt, std::uint64_t seed) {
    if (pairs.empty()) throw std::invalid_argument("no spec pairs given");
    ExperimentReport report;
    report.experiment = "coupling";
    report.seed = seed;
    ordered_json pair_echo = ordered_json::array();
    for (const auto& pr : pairs)
        pair_echo.push_back(ordered_json{{"low", format_ensemble_spec(pr.first)},
                                         {"high", format_ensemble_spec(pr.second)}});
    report.config = ordered_json{{"steps_per_pair", opt.steps_per_pair},
                                 {"check_marginals", opt.check_marginals},
                                 {"marginal_steps", opt.marginal_steps},
                                 {"marginal_cap", opt.marginal_cap},
                                 {"tv_threshold", opt.tv_threshold},
                                 {"pairs", pair_echo}};

    const int threads = thread_count(opt.threads);
    const RngHandle root(seed, 0x63706c67);
    struct PairResult {
        long long violations = 0;
        long long states_low = -1, states_high = -1;
        double tv_low = -1.0, tv_high = -1.0;
    };
    std::vector<PairResult> results(pairs.size());

    parallel_for(static_cast<long>(pairs.size()), threads, [&](long i) {
        const auto& pr = pairs[static_cast<size_t>(i)];
        RngHandle rng = root.derived(static_cast<std::uint64_t>(i), 1);
        PairResult& res = results[static_cast<size_t>(i)];
        const CoupledResult run = coupled_glauber_run(rng, pr.first, pr.second, opt.steps_per_pair);
        res.violations = run.ordering_violations;
        if (opt.check_marginals) {
            try {
                const auto states_low = enumerate_states(pr.first, opt.marginal_cap);
                const auto states_high = enumerate_states(pr.second, opt.marginal_cap);
                res.states_low = static_cast<long long>(states_low.size());
                res.states_high = static_cast<long long>(states_high.size());
                res.tv_low = glauber_tv_against_uniform(pr.first, states_low, opt.marginal_steps,
                                                        root.derived(static_cast<std::uint64_t>(i), 2));
                res.tv_high = glauber_tv_against_uniform(pr.second, states_high, opt.marginal_steps,
                                                         root.derived(static_cast<std::uint64_t>(i), 3));
            } catch (const cap_exceeded&) {
                // too many states for the TV check; ordering result stands
            }
        }
    });

    long long total_violations = 0;
    bool tv_ok = true;
    std::ostringstream csv;
    csv << "pair,k,T,steps,violations,states_low,tv_low,states_high,tv_high\n";
    for (size_t i = 0; i < pairs.size(); ++i) {
        const PairResult& r = results[i];
        total_violations += r.violations;
        ordered_json entry{{"pair", i},
                           {"k", pairs[i].first.k},
                           {"T", pairs[i].first.T1 - pairs[i].first.T0},
                           {"steps", opt.steps_per_pair},
                           {"violations", r.violations}};
        if (r.tv_low >= 0.0) {
            entry["states_low"] = r.states_low;
            entry["tv_low"] = r.tv_low;
            entry["states_high"] = r.states_high;
            entry["tv_high"] = r.tv_high;
            if (r.tv_low > opt.tv_threshold || r.tv_high > opt.tv_threshold) tv_ok = false;
        }
        report.statistics.push_back(entry);
        csv << i << ',' << pairs[i].first.k << ',' << (pairs[i].first.T1 - pairs[i].first.T0) << ','
            << opt.steps_per_pair << ',' << r.violations << ',' << r.states_low << ','
            << fmt(r.tv_low) << ',' << r.states_high << ',' << fmt(r.tv_high) << "\n";
    }
    report.statistics.push_back(ordered_json{{"total_violations", total_violations}});
    report.pass = (total_violations == 0) && tv_ok;
    if (!opt.out_dir.empty()) write_text(opt.out_dir, "pairs.csv", csv.str());
    return report;
}

ExperimentReport run_coupling_test(const CouplingOptions& opt, std::uint64_t seed) {
    const auto pairs = random_ordered_pairs(opt.n_pairs, opt.k_max, opt.T_max, seed);
    return run_coupling_test(pairs, opt, seed);
}

ExperimentReport run_gibbs_invariance(const GibbsOptions& opt) {
    const EnsembleSpec& spec = opt.spec;
    if (spec.top.is_path() || spec.bottom.is_path())
        throw std::invalid_argument("Gibbs invariance check requires a barrier-free spec");
    if (!spec.S_is_full())
        throw std::invalid_argument("Gibbs invariance check requires S to be the full window");
    if (opt.k1 < 1 || opt.k1 > opt.k2 || opt.k2 > spec.k - 1)
        throw std::invalid_argument("resampled indices must satisfy 1 <= k1 <= k2 <= k-1");
    if (opt.a < spec.T0 || opt.b > spec.T1 || opt.a > opt.b)
        throw std::invalid_argument("resampling window must sit inside [T0, T1]");

    ExperimentReport report;
    report.experiment = "gibbs_invariance";
    report.config = ordered_json{{"spec", format_ensemble_spec(spec)},
                                 {"a", opt.a},
                                 {"b", opt.b},
                                 {"k1", opt.k1},
                                 {"k2", opt.k2}};

    // Group the admissible set by the conditioning data: everything except
    // the resampled block strictly inside (a, b).
    struct Group {
        std::vector<std::vector<Level>> interiors;
        BernoulliLineEnsemble representative;
        Group(const BernoulliLineEnsemble& e) : representative(e) {}
    };
    std::map<std::vector<Level>, Group> groups;
    long long total_states = 0;
    for_each_admissible(
        spec,
        [&](const BernoulliLineEnsemble& ens) {
            ++total_states;
            std::vector<Level> key, interior;
            for (int i = 0; i < spec.k; ++i) {
                const UpRightPath& p = ens.paths[static_cast<size_t>(i)];
                const bool resampled = (i + 1 >= opt.k1 && i + 1 <= opt.k2);
                for (Time t = spec.T0; t <= spec.T1; ++t) {
                    if (resampled && t > opt.a && t < opt.b)
                        interior.push_back(p.at(t));
                    else
                        key.push_back(p.at(t));
                }
            }
            auto [it, inserted] = groups.try_emplace(key, ens);
            it->second.interiors.push_back(std::move(interior));
        },
        opt.cap);

    // Each group must coincide exactly with the admissible set of the induced
    // sub-problem on [a, b] bounded by the neighboring lines.
    long long mismatched = 0;
    bool rational_ok = true;
    const ExactProb uniform = ExactProb(1) / ExactProb(total_states);
    for (auto& [key, group] : groups) {
        const BernoulliLineEnsemble& rep = group.representative;
        const int kk = opt.k2 - opt.k1 + 1;
        std::vector<Level> bx(static_cast<size_t>(kk)), by(static_cast<size_t>(kk));
        for (int i = 0; i < kk; ++i) {
            bx[static_cast<size_t>(i)] = rep.paths[static_cast<size_t>(opt.k1 - 1 + i)].at(opt.a);
            by[static_cast<size_t>(i)] = rep.paths[static_cast<size_t>(opt.k1 - 1 + i)].at(opt.b);
        }
        auto slice = [&](int line) {
            const UpRightPath& p = rep.paths[static_cast<size_t>(line - 1)];
            std::vector<Level> vals(p.values.begin() + (opt.a - spec.T0),
                                    p.values.begin() + (opt.b - spec.T0) + 1);
            return Barrier::path(make_path(opt.a, std::move(vals)));
        };
        const Barrier top = (opt.k1 == 1) ? Barrier::plus_infinity() : slice(opt.k1 - 1);
        const Barrier bottom = slice(opt.k2 + 1);
        const EnsembleSpec sub = make_spec(opt.a, opt.b, bx, by, top, bottom);

        std::vector<std::vector<Level>> sub_interiors;
        for_each_admissible(
            sub,
            [&](const BernoulliLineEnsemble& block) {
                std::vector<Level> interior;
                for (const auto& p : block.paths)
                    for (Time t = opt.a + 1; t <= opt.b - 1; ++t) interior.push_back(p.at(t));
                sub_interiors.push_back(std::move(interior));
            },
            opt.cap);
        std::sort(sub_interiors.begin(), sub_interiors.end());
        std::sort(group.interiors.begin(), group.interiors.end());
        if (sub_interiors != group.interiors) ++mismatched;

        // Post-resampling mass of any member: (|group| / |Omega|) * (1 / |sub|).
        const ExactProb post = (ExactProb(group.interiors.size()) / ExactProb(total_states)) /
                               ExactProb(sub_interiors.size());
        if (post != uniform) rational_ok = false;
    }

    report.statistics.push_back(ordered_json{{"states", total_states},
                                             {"groups", groups.size()},
                                             {"mismatched_groups", mismatched},
                                             {"rational_equality", rational_ok}});
    report.pass = (mismatched == 0) && rational_ok;
    return report;
}

ExperimentReport run_mingap(const MingapOptions& opt, std::uint64_t seed) {
    if (opt.scaling.k < 2) throw std::invalid_argument("min-gap experiment needs k >= 2");
    if (opt.T < 1) throw std::invalid_argument("T must be positive");
    if (opt.n_samples < 1) throw std::invalid_argument("n_samples must be positive");
    if (opt.deltas.empty()) throw std::invalid_argument("delta grid must be nonempty");
    std::vector<double> deltas = opt.deltas;
    std::sort(deltas.begin(), deltas.end());

    ExperimentReport report;
    report.experiment = "mingap";
    report.seed = seed;
    report.config = ordered_json{{"scaling", scaling_json(opt.scaling)},
                                 {"T", opt.T},
                                 {"n_samples", opt.n_samples},
                                 {"deltas", deltas},
                                 {"eps_threshold", opt.eps_threshold}};

    const ScaledBoundary sb = boundary_for(opt.scaling, opt.T);
    const EnsembleSpec espec = make_spec(0, static_cast<Time>(opt.T), sb.x, sb.y);
    const int threads = thread_count(opt.threads);
    const RngHandle root(seed, 0x6d696e67);
    std::vector<Level> min_gaps(static_cast<size_t>(opt.n_samples));
    parallel_for(opt.n_samples, threads, [&](long r) {
        RngHandle rng = root.derived(static_cast<std::uint64_t>(r));
        const BernoulliLineEnsemble ens = sequential_exact_sample(rng, espec);
        Level mg = std::numeric_limits<Level>::max();
        for (int i = 0; i + 1 < espec.k; ++i)
            mg = std::min(mg, ens.paths[static_cast<size_t>(i)].at(sb.m) -
                                  ens.paths[static_cast<size_t>(i + 1)].at(sb.m));
        min_gaps[static_cast<size_t>(r)] = mg;
    });

    const double root_t = std::sqrt(static_cast<double>(opt.T));
    std::ostringstream csv;
    csv << "delta,probability,count\n";
    std::optional<double> smallest_positive_prob;
    for (double d : deltas) {
        long long count = 0;
        for (Level mg : min_gaps) {
            if (d == 0.0 ? (mg == 0) : (static_cast<double>(mg) < d * root_t)) ++count;
        }
        const double prob = static_cast<double>(count) / static_cast<double>(opt.n_samples);
        if (d > 0.0 && !smallest_positive_prob.has_value()) smallest_positive_prob = prob;
        report.statistics.push_back(ordered_json{{"delta", d},
                                                 {"probability", prob},
                                                 {"count", count},
                                                 {"in_pass", d > 0.0}});
        csv << fmt(d) << ',' << fmt(prob) << ',' << count << "\n";
    }
    if (smallest_positive_prob.has_value()) report.pass = *smallest_positive_prob <= opt.eps_threshold;
    if (!opt.out_dir.empty()) write_text(opt.out_dir, "mingap.csv", csv.str());
    return report;
}

} // namespace gle
