#pragma once

#include <vector>

#include "gle/errors.hpp"

namespace gle {

struct LimitConstants {
    double c1 = 0.0; // 1 / (p(1-p) t)
    double c2 = 0.0; // 1 / (p(1-p) (1-t))
    double c3 = 0.0; // 1 / (2 p(1-p) t(1-t))
};

LimitConstants limit_constants(double p, double t);

/// Runs of equal entries in a weakly decreasing vector.
struct Blocks {
    std::vector<double> values; // strictly decreasing representatives
    std::vector<int> mult;
    int count() const { return static_cast<int>(values.size()); }
    int total() const;
};

/// Groups entries whose gap is below tol; tol < 0 applies the default rule
/// 1e-12 * max(1, |value|) per comparison.  Rejects vectors that increase by
/// more than tol.
Blocks block_structure(const std::vector<double>& v, double tol = -1.0);

/// Endpoint data of the diffusive limit: probabilities (p, t) and the two
/// weakly decreasing coordinate vectors with their block structure.
struct LimitSpec {
    double p = 0.5;
    double t = 0.5;
    std::vector<double> a, b;
    Blocks blocks_a, blocks_b;
    int k = 0;

    bool distinct() const;
};

LimitSpec make_limit_spec(double p, double t, std::vector<double> a, std::vector<double> b,
                          double tol = -1.0);

/// Unnormalized limit density at a weakly decreasing z:
///   H(z) = det A(z) * det B(z) * prod_i exp(-c3 z_i^2),
/// where A stacks, for each block of a with value alpha and multiplicity m,
/// the rows (c1 z_j)^d exp(c1 alpha z_j) with d = m-1, ..., 0, and B does the
/// same for b with c2.  With this row order H > 0 strictly inside the
/// ordered cone and H = 0 whenever two coordinates coincide.
///
/// Returns log|H| with the sign in *sign_out (0 for an exact zero).
double H_density_log(const LimitSpec& spec, const std::vector<double>& z, int* sign_out = nullptr);

/// exp of the above; clamps the tiny negative roundoff at the boundary to 0.
double H_density(const LimitSpec& spec, const std::vector<double>& z);

/// log of a certified pointwise envelope of |H|:
///   (k!)^2 prod_i exp(Cenv |z_i| - c3 z_i^2),
///   Cenv = c1 (max|a| + max mult_a - 1) + c2 (max|b| + max mult_b - 1).
/// Used to pick and certify quadrature truncation boxes.
double envelope_log_bound(const LimitSpec& spec, const std::vector<double>& z);

/// Closed-form normalizing constant, valid when all entries of a and b are
/// distinct:
///   (2 pi)^{k/2} (p(1-p) t(1-t))^{k/2} e^{(c1/2) sum a^2} e^{(c2/2) sum b^2}
///   * det[ exp(-(b_i - a_j)^2 / (2 p(1-p))) ].
double zc_closed_form(const LimitSpec& spec);

/// Integral of H over the ordered cone by iterated composite Gauss-Legendre
/// panels over a truncation box certified with envelope_log_bound (tail mass
/// below tail_rel of the estimate), refined until two successive panel counts
/// agree to rel_tol.  Throws quadrature_failure when refinement stalls.
double zc_quadrature(const LimitSpec& spec, double rel_tol = 1e-6, double tail_rel = 1e-8);

/// Closed form when available, quadrature otherwise.
double normalizing_constant(const LimitSpec& spec);

/// Density evaluator with the normalizing constant computed once.
struct DensityEval {
    LimitSpec spec;
    double Zc = 0.0;

    double H(const std::vector<double>& z) const;
    /// Normalized density; zero off the weakly ordered cone.
    double rho(const std::vector<double>& z) const;
};

DensityEval make_density(const LimitSpec& spec);

/// Perturbed endpoint vectors that split every block into distinct entries:
/// direction +1 shifts the j-th entry of an m-block by (m - j + 1) eps,
/// direction -1 by -j eps.  eps must keep the vector strictly decreasing.
std::vector<double> split_blocks(const Blocks& blocks, double eps, int direction);

/// Ratio of the split-spec density to its confluent limit:
///   eps^-(u+v) H_eps(z) / H(z),
/// u and v counting the collapsed pairs in a and b.  The limit of the ratio
/// is 1 as eps -> 0  (the Vandermonde factors of the split cancel exactly
/// against the derivative normalization with the row order used here), and
/// the approach is linear in eps.
double confluent_check(const LimitSpec& spec, const std::vector<double>& z, double eps,
                       int direction);

/// One-coordinate marginal distribution function of rho on a uniform grid,
/// section integrals by the same panel rule as zc_quadrature.
struct MarginalCdf {
    std::vector<double> u;
    std::vector<double> F;
    double raw_total = 0.0; // integral of the marginal before renormalization
    double operator()(double point) const;
};

MarginalCdf marginal_cdf(const DensityEval& density, int coord, int grid_points = 801);

} // namespace gle
