#pragma once

// Shared helpers for the test binaries: deterministic random instances and a
// few encodings.  Test-local randomness uses std::mt19937_64 so failures
// reproduce across runs and machines.

#include <random>
#include <string>
#include <vector>

#include "gle/ensemble.hpp"
#include "gle/exact.hpp"

namespace testutil {

using gle::Barrier;
using gle::BernoulliLineEnsemble;
using gle::EnsembleSpec;
using gle::Level;
using gle::Time;

inline long pick(std::mt19937_64& g, long lo, long hi) {
    return lo + static_cast<long>(g() % static_cast<unsigned long>(hi - lo + 1));
}

inline std::vector<Level> rand_weakly_decreasing(std::mt19937_64& g, int k, Level top,
                                                 long max_gap = 2) {
    std::vector<Level> v(static_cast<size_t>(k));
    Level cur = top;
    for (int i = 0; i < k; ++i) {
        v[static_cast<size_t>(i)] = cur;
        cur -= pick(g, 0, max_gap);
    }
    return v;
}

inline gle::UpRightPath rand_path(std::mt19937_64& g, Time t0, Time t1, Level z0) {
    std::vector<Level> vals;
    vals.push_back(z0);
    for (Time t = t0 + 1; t <= t1; ++t) vals.push_back(vals.back() + pick(g, 0, 1));
    return gle::make_path(t0, std::move(vals));
}

struct SpecOptions {
    int k_max = 3;
    Time T_max = 6;
    bool allow_barriers = false;
    bool allow_partial_S = false;
};

/// Rejection-samples a boundary-feasible spec.
inline EnsembleSpec rand_feasible_spec(std::mt19937_64& g, const SpecOptions& opt = {}) {
    for (;;) {
        int k = static_cast<int>(pick(g, 1, opt.k_max));
        Time T0 = pick(g, -3, 3);
        Time T1 = T0 + pick(g, 1, opt.T_max);
        auto x = rand_weakly_decreasing(g, k, pick(g, -4, 4));
        std::vector<Level> y(static_cast<size_t>(k));
        bool ok = true;
        Level prev = 0;
        for (int i = 0; i < k && ok; ++i) {
            Level lo = x[static_cast<size_t>(i)];
            Level hi = x[static_cast<size_t>(i)] + (T1 - T0);
            if (i > 0) hi = std::min(hi, prev);
            if (lo > hi) {
                ok = false;
                break;
            }
            y[static_cast<size_t>(i)] = pick(g, lo, hi);
            prev = y[static_cast<size_t>(i)];
        }
        if (!ok) continue;

        Barrier top = Barrier::plus_infinity();
        Barrier bottom = Barrier::minus_infinity();
        if (opt.allow_barriers && pick(g, 0, 2) == 0)
            top = Barrier::path(rand_path(g, T0, T1, x.front() + pick(g, 0, 2)));
        if (opt.allow_barriers && pick(g, 0, 2) == 0)
            bottom = Barrier::path(rand_path(g, T0, T1, x.back() - pick(g, 1, 3)));

        std::vector<Time> S;
        if (opt.allow_partial_S && pick(g, 0, 1) == 0) {
            for (Time t = T0; t <= T1; ++t)
                if (pick(g, 0, 1) == 0) S.push_back(t);
            if (S.empty()) S.push_back(pick(g, T0, T1));
        } else {
            for (Time t = T0; t <= T1; ++t) S.push_back(t);
        }

        EnsembleSpec spec;
        try {
            spec = gle::make_spec(T0, T1, x, y, top, bottom, S);
        } catch (const std::exception&) {
            continue;
        }
        if (gle::boundary_feasible(spec).ok()) return spec;
    }
}

/// Flat encoding of an ensemble, usable as a map key.
inline std::vector<Level> key_of(const BernoulliLineEnsemble& ens) {
    std::vector<Level> key;
    for (const auto& p : ens.paths) key.insert(key.end(), p.values.begin(), p.values.end());
    return key;
}

} // namespace testutil
