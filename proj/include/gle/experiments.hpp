#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gle/ensemble.hpp"
#include "gle/exact.hpp"
#include "gle/scaling.hpp"

#include "json.hpp"

namespace gle {

/// Resolves a worker count: an explicit positive request wins, otherwise the
/// GLE_THREADS environment variable, otherwise 1.
int thread_count(int requested);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.  Work items must
/// write to disjoint slots; the first exception is rethrown after joining.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

struct ExperimentReport {
    std::string experiment;
    nlohmann::ordered_json config;
    std::uint64_t seed = 0;
    nlohmann::ordered_json statistics = nlohmann::ordered_json::array();
    std::optional<bool> pass;
    int schema_version = 1;

    nlohmann::ordered_json to_json() const;
    /// Canonical serialization: identical (config, seed) inputs produce
    /// byte-identical text.
    std::string to_string() const;
};

/// Writes report.json (and returns the path) under dir.
std::string write_report(const ExperimentReport& report, const std::string& dir);

struct ConvergenceOptions {
    ScalingSpec scaling;
    std::vector<long> T_values;
    long n_samples = 0;
    double threshold = 0.03;  // sup-CDF bound at the largest T
    double noise_band = 0.01; // allowed increase between consecutive T
    int threads = 0;
    std::string out_dir; // empty: no CSV side files
    bool write_samples = false;
};

/// Samples the fixed-time column at m = floor(tT) exactly, rescales it, and
/// compares each coordinate's empirical law against the limit marginal taken
/// at the endpoints the lattice realizes at that T (x/sqrt(T) and
/// (y - pT)/sqrt(T), which differ from the nominal a, b by up to 1/sqrt(T)).
/// The distance is a continuity-corrected sup-CDF distance: the model CDF is
/// read at lattice-cell midpoints v +- 1/(2 sqrt(T)) so that the lattice atom
/// width does not count against the match.
ExperimentReport run_convergence(const ConvergenceOptions& opt, std::uint64_t seed);

struct CouplingOptions {
    int n_pairs = 20;
    long long steps_per_pair = 50000;
    int k_max = 3;
    long T_max = 6;
    bool check_marginals = false;
    long long marginal_steps = 200000; // subsampled Glauber observations per chain
    long long marginal_cap = 50;       // max enumerable states for the TV check
    double tv_threshold = 0.05;
    int threads = 0;
    std::string out_dir;
};

/// Coupled Glauber runs on explicitly supplied ordered pairs.
ExperimentReport run_coupling_test(const std::vector<std::pair<EnsembleSpec, EnsembleSpec>>& pairs,
                                   const CouplingOptions& opt, std::uint64_t seed);

/// Same, over randomly generated ordered pairs (barriers included).
ExperimentReport run_coupling_test(const CouplingOptions& opt, std::uint64_t seed);

std::vector<std::pair<EnsembleSpec, EnsembleSpec>> random_ordered_pairs(int n_pairs, int k_max,
                                                                        long T_max,
                                                                        std::uint64_t seed);

struct GibbsOptions {
    EnsembleSpec spec;  // barrier-free, full S
    Time a = 0, b = 0;  // resampling window inside [T0, T1]
    int k1 = 1, k2 = 1; // path indices to resample, 1 <= k1 <= k2 <= k-1
    long long cap = kDefaultEnumCap;
};

/// Exact check of conditional uniformity: groups the admissible set by the
/// boundary data of the (k1..k2, [a,b]) block and verifies, in rational
/// arithmetic, that each group's interior blocks are exactly the admissible
/// set of the induced sub-problem, so uniform resampling preserves the law.
ExperimentReport run_gibbs_invariance(const GibbsOptions& opt);

struct MingapOptions {
    ScalingSpec scaling;
    long T = 0;
    long n_samples = 0;
    std::vector<double> deltas;
    double eps_threshold = 0.1; // bound on P(min gap < delta sqrt(T)) at the smallest delta > 0
    int threads = 0;
    std::string out_dir;
};

/// Estimates P(min_i [L_i(m) - L_{i+1}(m)] < delta sqrt(T)) over the delta
/// grid at m = floor(tT).
ExperimentReport run_mingap(const MingapOptions& opt, std::uint64_t seed);

} // namespace gle
