#pragma once

#include <vector>

#include "gle/ensemble.hpp"

namespace gle {

/// Diffusive boundary family: at size T the entry/exit columns are
/// x_i = floor(a_i sqrt(T)) and y_i = floor(p T + b_i sqrt(T)), repaired
/// minimally (decrementing lower coordinates, clamping into [x_i, x_i + T])
/// so the pair stays weakly decreasing and feasible.
struct ScalingSpec {
    double p = 0.5;
    double t = 0.5;
    std::vector<double> a, b;
    int k = 0;
};

ScalingSpec make_scaling_spec(double p, double t, std::vector<double> a, std::vector<double> b);

struct ScaledBoundary {
    long T = 0;
    Time m = 0; // observation time floor(t T)
    std::vector<Level> x, y;
};

ScaledBoundary boundary_for(const ScalingSpec& spec, long T);

/// Barrier-free ensemble on [0, T] with the boundary above.
EnsembleSpec ensemble_for(const ScalingSpec& spec, long T);

/// Centered and scaled column values (lambda_i - p t T) / sqrt(T).
std::vector<double> rescale_column(const ScalingSpec& spec, long T,
                                   const std::vector<Level>& column);

/// Parameters of the curve rescaling map
///   f_i(s) = N^{-alpha/2} (L_i(s N^alpha) - p s N^alpha + lambda s^2 N^{alpha/2}).
struct RescaleSpec {
    double alpha = 1.0;
    double p = 0.5;
    double lambda = 0.0;
};

RescaleSpec make_rescale_spec(double alpha, double p, double lambda);

struct RescaledCurves {
    double psi = 0.0;
    std::vector<double> s;                   // uniform grid on [-psi, psi]
    std::vector<std::vector<double>> f;      // curves with the parabolic term kept
    std::vector<std::vector<double>> line;   // (f - lambda s^2) / sqrt(p(1-p))
};

/// Evaluates the rescaling map on a uniform s-grid, interpolating the paths
/// linearly between lattice times and extending them by their boundary values.
/// The ensemble window must be symmetric ([-T, T]) and cover psi N^alpha;
/// psi <= 0 selects the largest admissible value, grid_points <= 0 picks a
/// resolution matching the lattice.
RescaledCurves rescale_ensemble(const BernoulliLineEnsemble& ens, const RescaleSpec& spec, long N,
                                double psi = 0.0, int grid_points = 0);

} // namespace gle
