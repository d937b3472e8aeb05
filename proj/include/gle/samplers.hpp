#pragma once

#include <functional>
#include <optional>

#include "gle/ensemble.hpp"
#include "gle/exact.hpp"
#include "gle/rng.hpp"

namespace gle {

/// Uniform bridge from (t0, z0) to (t1, z1): a uniformly random placement of
/// the z1-z0 up-steps among the t1-t0 slots.
UpRightPath sample_bridge(RngHandle& rng, Time t0, Time t1, Level z0, Level z1);

struct RejectionResult {
    BernoulliLineEnsemble ensemble;
    long long tries = 0;
};

/// Draws independent bridges until the tuple is admissible.  The try count
/// is geometric with success rate acceptance_probability(spec).  Throws
/// max_tries_exceeded (carrying the attempt count) when the limit is hit.
RejectionResult rejection_sample(RngHandle& rng, const EnsembleSpec& spec,
                                 long long max_tries = 1'000'000);

/// Column-by-column exact sampler for barrier-free specs with the ordering
/// enforced on the whole window: each next column is drawn with probability
/// proportional to the determinant count of completions, which makes the
/// output exactly uniform over the admissible set.
BernoulliLineEnsemble sequential_exact_sample(RngHandle& rng, const EnsembleSpec& spec);

/// One proposed heat-bath update: line index (1-based, top line is 1), a
/// time, a level and a coin.
struct GlauberMove {
    int line = 1;
    Time t = 0;
    Level z = 0;
    bool heads = false;
};

/// Inclusive range of levels the single-site dynamics proposes from.
struct LevelWindow {
    Level lo = 0;
    Level hi = -1;
    bool empty() const { return hi < lo; }
    Level width() const { return hi - lo + 1; }
};

/// [min(x_k, bottom(T0)), y_1 - 1]: covers every site value the chain can
/// reach, so moves outside the current configuration are no-ops and the
/// proposal stays symmetric.
LevelWindow glauber_window(const EnsembleSpec& spec);

/// 10 * k * (T1 - T0) * window width; enough mixing for the desk-scale
/// instances the experiments run.
long long default_burnin(const EnsembleSpec& spec);

GlauberMove random_move(RngHandle& rng, const EnsembleSpec& spec, const LevelWindow& window);

/// Applies one move.  The site changes only when (t-1, t, t+1) carries the
/// local shape (z, current, z+1); endpoints never move.  When t lies in the
/// spec's ordering set, an update that would cross the neighbouring line
/// above or below, or a barrier, is suppressed; off the ordering set the
/// update always goes through.  Validates the input state (inadmissible_state).
BernoulliLineEnsemble glauber_step(BernoulliLineEnsemble state, const EnsembleSpec& spec,
                                   const GlauberMove& move);

/// Runs `steps` random moves from `init` (default: maximal_ensemble).
BernoulliLineEnsemble glauber_run(RngHandle& rng, const EnsembleSpec& spec, long long steps,
                                  std::optional<BernoulliLineEnsemble> init = std::nullopt);

/// Burn-in, then n_obs observations spaced `stride` moves apart.
void glauber_sample_states(RngHandle& rng, const EnsembleSpec& spec, long long burnin,
                           long long n_obs, long long stride,
                           const std::function<void(const BernoulliLineEnsemble&)>& visit,
                           std::optional<BernoulliLineEnsemble> init = std::nullopt);

struct CoupledResult {
    BernoulliLineEnsemble low;
    BernoulliLineEnsemble high;
    long long ordering_violations = 0;
};

/// Runs two chains off one move sequence (same triples, same coins).  The
/// specs must share (T0, T1, k, S) and be ordered: x <= x', y <= y', and each
/// barrier of the low spec at most the matching barrier of the high spec on
/// S.  Started from the maximal ensembles, the low chain then stays below the
/// high chain pointwise; violations are counted and returned (zero unless
/// something is broken).
CoupledResult coupled_glauber_run(
    RngHandle& rng, const EnsembleSpec& specLow, const EnsembleSpec& specHigh,
    long long steps,
    const std::function<void(long long, const BernoulliLineEnsemble&,
                             const BernoulliLineEnsemble&)>& observe = {},
    long long observe_stride = 0);

} // namespace gle
