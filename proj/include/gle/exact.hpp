#pragma once

#include <functional>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gle/ensemble.hpp"

namespace gle {

using ExactCount = boost::multiprecision::cpp_int;
using ExactProb = boost::multiprecision::cpp_rational; // always stored reduced

/// C(n, r); zero outside 0 <= r <= n.  Backed by a thread-local Pascal table,
/// so repeated queries at fixed n are cheap.
const ExactCount& binomial(long n, long r);

/// Elementary symmetric polynomial e_r at n ones: C(n, r), zero for r < 0 or
/// r > n.
ExactCount elem_sym(long r, long n);

/// Fraction-free determinant of an integer matrix (consumes its argument).
ExactCount det_exact(std::vector<std::vector<ExactCount>> m);

/// Number of unconstrained path tuples joining the spec's boundary columns:
/// prod_i C(T1-T0, y_i-x_i).
ExactCount count_free(const EnsembleSpec& spec);

/// Number of weakly ordered tuples joining column x to column y in T steps,
/// by the k x k binomial determinant det[ e_{y_i - x_j - i + j}(1^T) ].
/// Infeasible data gives 0.
ExactCount count_avoid_lgv(const std::vector<Level>& x, const std::vector<Level>& y, Time T);

/// Determinant route for a barrier-free spec whose ordering is enforced on
/// the whole window.
ExactCount count_avoid_lgv(const EnsembleSpec& spec);

inline constexpr long long kDefaultEnumCap = 10'000'000;

/// Brute force count: walks the full product of per-path bridge sets and
/// tests admissibility tuple by tuple.  Handles barriers and partial S.
/// Throws cap_exceeded when count_free(spec) > cap.
ExactCount count_avoid_enum(const EnsembleSpec& spec, long long cap = kDefaultEnumCap);

/// Visits every admissible ensemble once; same cap rule as count_avoid_enum.
void for_each_admissible(const EnsembleSpec& spec,
                         const std::function<void(const BernoulliLineEnsemble&)>& visit,
                         long long cap = kDefaultEnumCap);

/// Exact distribution of the time-m column of the uniform avoiding ensemble.
struct PmfTable {
    Time m = 0;
    std::map<std::vector<Level>, ExactProb> prob;

    ExactProb total() const;
};

/// Law of the column at time m for a barrier-free, full-S spec:
///   P(column = lambda) = det[e_{lambda_i - x_j - i + j}(1^{m - T0})]
///                      * det[e_{y_i - lambda_j - i + j}(1^{T1 - m})]
///                      / det[e_{y_i - x_j - i + j}(1^{T1 - T0})].
/// Support runs over weakly decreasing columns with
/// x_i <= lambda_i <= x_i + (m - T0) and y_i - (T1 - m) <= lambda_i <= y_i.
/// Throws degenerate_denominator when the spec admits no ensemble.
PmfTable fixed_time_pmf(const EnsembleSpec& spec, Time m);

/// |admissible set| / count_free, the success rate of bridge rejection.
/// Uses the determinant route when it applies, enumeration otherwise.
ExactProb acceptance_probability(const EnsembleSpec& spec, long long cap = kDefaultEnumCap);

/// log of a positive big integer (msb-based; exact to double rounding).
double log_exact(const ExactCount& v);

/// log C(n, N) for N = 0..n, computed exactly and then rounded.  Linear time,
/// no Pascal table, usable for n ~ 10^4.
std::vector<double> log_binomial_row(long n);

/// log of the Gaussian-window approximation to C(n, N) around N ~ pn:
///   -log sqrt(2*pi) - x^2/(2p(1-p)) + N log((1-p)/p) - n log(1-p)
///   - (1/2) log n - (1/2) log(p(1-p)),   x = (N - pn)/sqrt(n).
/// Returns -inf outside 0 <= N <= n.
double elem_sym_asymptotic_log(long n, long N, double p);

/// exp of the above; overflows to +inf for large windows, use the log form
/// for comparisons.
double elem_sym_asymptotic(long n, long N, double p);

/// Checks C(n, N) <= C * exp(N log((1-p)/p) - n log(1-p) - (1/2) log n)
///                     * exp(-c (N - pn)^2 / n)
/// in log space.  Vacuously true outside 0 <= N <= n.
bool elem_sym_upper_bound_holds(long n, long N, double p, double C, double c);

/// Constant C making the bound above hold at every N for this n, plus a
/// Stirling allowance: the exact-to-profile ratio at the central N grows
/// with n toward its limit, with first-order deficit (1/p + 1/(1-p) - 1)
/// / (12 n), so the padded constant stays valid well past the calibration
/// size.
double calibrate_upper_bound_constant(long n, double p, double c);

} // namespace gle
