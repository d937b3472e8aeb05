#pragma once

#include <vector>

#include "gle/rng.hpp"

namespace gle {

/// P(max of a bridge with diffusion sqrt(p(1-p)) on [0,1] reaches C):
/// exp(-2 C^2 / (p (1-p))), for C >= 0.
double bb_max_tail(double C, double p);

/// Two-sided version P(max |bridge| >= C): alternating series
/// 2 sum_{n>=1} (-1)^{n-1} exp(-2 n^2 C^2 / (p(1-p))), truncated once a term
/// drops below 1e-16.
double bb_abs_max_tail(double C, double p);

/// Covariance sigma^2 (min(r,s) - r s) of the bridge at fractions r, s.
double bridge_covariance(double r, double s, double sigma);

/// Bridge with diffusion sigma sampled on the uniform grid j/n, j = 0..n:
/// cumulative Gaussian increments pinned to zero at both ends.  The returned
/// vector has n+1 entries and exact grid covariance sigma^2 (min - rs).
std::vector<double> sample_brownian_bridge(RngHandle& rng, int n, double sigma);

} // namespace gle
