#include "gle/samplers.hpp"

#include <algorithm>
#include <sstream>

namespace gle {

UpRightPath sample_bridge(RngHandle& rng, Time t0, Time t1, Level z0, Level z1) {
    const long slots = t1 - t0;
    const long ups = z1 - z0;
    if (slots < 0 || ups < 0 || ups > slots)
        throw infeasible_boundary("no bridge joins these endpoints");
    std::vector<Level> vals(static_cast<size_t>(slots) + 1);
    vals[0] = z0;
    long ups_left = ups;
    for (long s = 0; s < slots; ++s) {
        const long slots_left = slots - s;
        const bool up = rng.below(static_cast<std::uint64_t>(slots_left)) <
                        static_cast<std::uint64_t>(ups_left);
        if (up) --ups_left;
        vals[static_cast<size_t>(s) + 1] = vals[static_cast<size_t>(s)] + (up ? 1 : 0);
    }
    UpRightPath p;
    p.t0 = t0;
    p.values = std::move(vals);
    return p;
}

RejectionResult rejection_sample(RngHandle& rng, const EnsembleSpec& spec,
                                 long long max_tries) {
    validate_spec(spec);
    if (count_free(spec) == 0)
        throw infeasible_boundary("no free path tuples join the boundary columns");

    RejectionResult out;
    out.ensemble.paths.resize(static_cast<size_t>(spec.k));
    for (long long tries = 1; tries <= max_tries; ++tries) {
        for (int i = 0; i < spec.k; ++i)
            out.ensemble.paths[static_cast<size_t>(i)] =
                sample_bridge(rng, spec.T0, spec.T1, spec.x[static_cast<size_t>(i)],
                              spec.y[static_cast<size_t>(i)]);
        if (is_admissible(out.ensemble, spec)) {
            out.tries = tries;
            return out;
        }
    }
    std::ostringstream os;
    os << "no admissible tuple in " << max_tries << " tries";
    throw max_tries_exceeded(os.str(), max_tries);
}

BernoulliLineEnsemble sequential_exact_sample(RngHandle& rng, const EnsembleSpec& spec) {
    validate_spec(spec);
    if (spec.top.is_path() || spec.bottom.is_path())
        throw std::invalid_argument("exact column sampler requires a barrier-free spec");
    if (!spec.S_is_full())
        throw std::invalid_argument("exact column sampler needs the ordering on the whole window");

    const int k = spec.k;
    const Time T = spec.width();
    ExactCount remaining_count = count_avoid_lgv(spec.x, spec.y, T);
    if (remaining_count == 0)
        throw infeasible_boundary("spec admits no ensemble");

    BernoulliLineEnsemble ens;
    ens.paths.assign(static_cast<size_t>(k),
                     UpRightPath{spec.T0, std::vector<Level>(static_cast<size_t>(T) + 1)});
    std::vector<Level> col(spec.x);
    for (int i = 0; i < k; ++i) ens.paths[static_cast<size_t>(i)].values[0] = col[static_cast<size_t>(i)];

    std::vector<Level> cand(static_cast<size_t>(k));
    std::vector<long> step_lo(static_cast<size_t>(k)), step_hi(static_cast<size_t>(k));
    std::vector<std::vector<Level>> mus;
    std::vector<ExactCount> weights;

    for (Time r = 1; r <= T; ++r) {
        const Time rem = T - r + 1; // steps left including this one

        bool forced = true;
        for (int i = 0; i < k; ++i) {
            const Level need = spec.y[static_cast<size_t>(i)] - col[static_cast<size_t>(i)];
            step_lo[static_cast<size_t>(i)] = std::max(0L, need - (rem - 1));
            step_hi[static_cast<size_t>(i)] = std::min(1L, need);
            if (step_lo[static_cast<size_t>(i)] != step_hi[static_cast<size_t>(i)]) forced = false;
        }

        if (forced) {
            for (int i = 0; i < k; ++i) col[static_cast<size_t>(i)] += step_lo[static_cast<size_t>(i)];
        } else {
            mus.clear();
            weights.clear();
            const unsigned top = 1u << k;
            for (unsigned mask = 0; mask < top; ++mask) {
                bool ok = true;
                for (int i = 0; i < k && ok; ++i) {
                    const long s = (mask >> i) & 1u;
                    if (s < step_lo[static_cast<size_t>(i)] || s > step_hi[static_cast<size_t>(i)]) {
                        ok = false;
                        break;
                    }
                    cand[static_cast<size_t>(i)] = col[static_cast<size_t>(i)] + s;
                    if (i > 0 && cand[static_cast<size_t>(i)] > cand[static_cast<size_t>(i - 1)])
                        ok = false;
                }
                if (!ok) continue;
                ExactCount w = count_avoid_lgv(cand, spec.y, rem - 1);
                if (w == 0) continue;
                mus.push_back(cand);
                weights.push_back(std::move(w));
            }
            if (mus.empty())
                throw error("internal: no admissible continuation from a reachable column");
            // the weights sum to remaining_count by the one-step branching identity
            ExactCount draw = rng.below_big(remaining_count);
            size_t pick = 0;
            ExactCount acc = weights[0];
            while (draw >= acc) {
                ++pick;
                acc += weights[pick];
            }
            col = mus[pick];
            remaining_count = weights[pick];
        }

        for (int i = 0; i < k; ++i)
            ens.paths[static_cast<size_t>(i)].values[static_cast<size_t>(r)] =
                col[static_cast<size_t>(i)];
    }
    return ens;
}

LevelWindow glauber_window(const EnsembleSpec& spec) {
    LevelWindow w;
    w.lo = spec.x.back();
    if (spec.bottom.is_path()) w.lo = std::min(w.lo, spec.bottom.as_path().at(spec.T0));
    w.hi = spec.y.front() - 1;
    return w;
}

long long default_burnin(const EnsembleSpec& spec) {
    const long long width = std::max<long long>(1, glauber_window(spec).width());
    return 10LL * spec.k * spec.width() * width;
}

GlauberMove random_move(RngHandle& rng, const EnsembleSpec& spec, const LevelWindow& window) {
    GlauberMove mv;
    mv.line = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.k)));
    mv.t = spec.T0 + rng.uniform_int(0, spec.width());
    mv.z = window.lo + rng.uniform_int(0, window.hi - window.lo);
    mv.heads = rng.coin();
    return mv;
}

namespace {

// The raise/lower rules below keep the state inside the admissible set:
// moves are suppressed exactly when the ordering at a time in S (against the
// neighbouring line or a barrier) would break.  Off S nothing is checked.
bool apply_move(BernoulliLineEnsemble& state, const EnsembleSpec& spec,
                const std::vector<std::uint8_t>& in_S, const GlauberMove& mv) {
    if (mv.t <= spec.T0 || mv.t >= spec.T1) return false;
    UpRightPath& path = state.paths[static_cast<size_t>(mv.line - 1)];
    if (path.at(mv.t - 1) != mv.z || path.at(mv.t + 1) != mv.z + 1) return false;
    const Level target = mv.heads ? mv.z + 1 : mv.z;
    if (path.at(mv.t) == target) return false;

    if (in_S[static_cast<size_t>(mv.t - spec.T0)]) {
        if (mv.heads) {
            if (mv.line == 1) {
                if (!spec.top.at_least(mv.t, target)) return false;
            } else if (state.paths[static_cast<size_t>(mv.line - 2)].at(mv.t) < target) {
                return false;
            }
        } else {
            if (mv.line == spec.k) {
                if (!spec.bottom.at_most(mv.t, target)) return false;
            } else if (state.paths[static_cast<size_t>(mv.line)].at(mv.t) > target) {
                return false;
            }
        }
    }
    path.set(mv.t, target);
    return true;
}

std::vector<std::uint8_t> s_mask(const EnsembleSpec& spec) {
    std::vector<std::uint8_t> mask(static_cast<size_t>(spec.width()) + 1, 0);
    for (Time t : spec.S) mask[static_cast<size_t>(t - spec.T0)] = 1;
    return mask;
}

BernoulliLineEnsemble start_state(const EnsembleSpec& spec,
                                  std::optional<BernoulliLineEnsemble> init) {
    if (!init) return maximal_ensemble(spec);
    if (!is_admissible(*init, spec))
        throw inadmissible_state("initial state is not admissible for the spec");
    return std::move(*init);
}

} // namespace

BernoulliLineEnsemble glauber_step(BernoulliLineEnsemble state, const EnsembleSpec& spec,
                                   const GlauberMove& move) {
    if (move.line < 1 || move.line > spec.k)
        throw std::invalid_argument("line index out of range");
    if (!is_admissible(state, spec))
        throw inadmissible_state("state is not admissible for the spec");
    apply_move(state, spec, s_mask(spec), move);
    return state;
}

BernoulliLineEnsemble glauber_run(RngHandle& rng, const EnsembleSpec& spec, long long steps,
                                  std::optional<BernoulliLineEnsemble> init) {
    BernoulliLineEnsemble state = start_state(spec, std::move(init));
    const LevelWindow window = glauber_window(spec);
    if (window.empty()) return state; // boundary data pins a single state
    const auto mask = s_mask(spec);
    for (long long s = 0; s < steps; ++s)
        apply_move(state, spec, mask, random_move(rng, spec, window));
    return state;
}

void glauber_sample_states(RngHandle& rng, const EnsembleSpec& spec, long long burnin,
                           long long n_obs, long long stride,
                           const std::function<void(const BernoulliLineEnsemble&)>& visit,
                           std::optional<BernoulliLineEnsemble> init) {
    BernoulliLineEnsemble state = start_state(spec, std::move(init));
    const LevelWindow window = glauber_window(spec);
    const auto mask = s_mask(spec);
    const bool frozen = window.empty();
    for (long long s = 0; s < burnin && !frozen; ++s)
        apply_move(state, spec, mask, random_move(rng, spec, window));
    for (long long o = 0; o < n_obs; ++o) {
        for (long long s = 0; s < stride && !frozen; ++s)
            apply_move(state, spec, mask, random_move(rng, spec, window));
        visit(state);
    }
}

namespace {

bool barrier_below(const Barrier& lo, const Barrier& hi, Time t) {
    if (lo.kind() == Barrier::Kind::minus_infinity) return true;
    if (hi.kind() == Barrier::Kind::plus_infinity) return true;
    if (lo.kind() == Barrier::Kind::plus_infinity) return false;
    if (hi.kind() == Barrier::Kind::minus_infinity) return false;
    return lo.as_path().at(t) <= hi.as_path().at(t);
}

} // namespace

CoupledResult coupled_glauber_run(
    RngHandle& rng, const EnsembleSpec& specLow, const EnsembleSpec& specHigh,
    long long steps,
    const std::function<void(long long, const BernoulliLineEnsemble&,
                             const BernoulliLineEnsemble&)>& observe,
    long long observe_stride) {
    validate_spec(specLow);
    validate_spec(specHigh);
    if (specLow.T0 != specHigh.T0 || specLow.T1 != specHigh.T1 || specLow.k != specHigh.k ||
        specLow.S != specHigh.S)
        throw incompatible_specs("coupled specs must share window, k and ordering set");
    for (int i = 0; i < specLow.k; ++i)
        if (specLow.x[static_cast<size_t>(i)] > specHigh.x[static_cast<size_t>(i)] ||
            specLow.y[static_cast<size_t>(i)] > specHigh.y[static_cast<size_t>(i)])
            throw incompatible_specs("coupled specs must have ordered boundary columns");
    for (Time t : specLow.S) {
        if (!barrier_below(specLow.bottom, specHigh.bottom, t) ||
            !barrier_below(specLow.top, specHigh.top, t))
            throw incompatible_specs("coupled specs must have ordered barriers on S");
    }

    CoupledResult res;
    res.low = maximal_ensemble(specLow);
    res.high = maximal_ensemble(specHigh);

    LevelWindow window = glauber_window(specLow);
    const LevelWindow wh = glauber_window(specHigh);
    window.lo = std::min(window.lo, wh.lo);
    window.hi = std::max(window.hi, wh.hi);
    if (window.empty()) return res;

    const auto mask = s_mask(specLow);
    for (long long s = 1; s <= steps; ++s) {
        const GlauberMove mv = random_move(rng, specLow, window);
        apply_move(res.low, specLow, mask, mv);
        apply_move(res.high, specHigh, mask, mv);
        if (res.low.paths[static_cast<size_t>(mv.line - 1)].at(mv.t) >
            res.high.paths[static_cast<size_t>(mv.line - 1)].at(mv.t))
            ++res.ordering_violations;
        if (observe_stride > 0 && s % observe_stride == 0) observe(s, res.low, res.high);
    }

    // definitive sweep, in case a violation appeared and then washed out
    for (int i = 0; i < specLow.k; ++i)
        for (Time t = specLow.T0; t <= specLow.T1; ++t)
            if (res.low.paths[static_cast<size_t>(i)].at(t) >
                res.high.paths[static_cast<size_t>(i)].at(t))
                ++res.ordering_violations;
    return res;
}

} // namespace gle
