#include "gle/brownian.hpp"

#include <cmath>
#include <stdexcept>

namespace gle {

namespace {

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
}

} // namespace

double bb_max_tail(double C, double p) {
    check_p(p);
    if (C < 0.0) throw std::invalid_argument("threshold must be nonnegative");
    return std::exp(-2.0 * C * C / (p * (1.0 - p)));
}

double bb_abs_max_tail(double C, double p) {
    check_p(p);
    if (C < 0.0) throw std::invalid_argument("threshold must be nonnegative");
    if (C == 0.0) return 1.0;
    const double base = -2.0 * C * C / (p * (1.0 - p));
    double sum = 0.0;
    double sign = 1.0;
    for (long n = 1;; ++n) {
        const double term = std::exp(base * static_cast<double>(n) * static_cast<double>(n));
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::min(1.0, 2.0 * sum);
}

double bridge_covariance(double r, double s, double sigma) {
    return sigma * sigma * (std::min(r, s) - r * s);
}

std::vector<double> sample_brownian_bridge(RngHandle& rng, int n, double sigma) {
    if (n < 1) throw std::invalid_argument("grid needs at least one cell");
    std::vector<double> w(static_cast<size_t>(n) + 1);
    w[0] = 0.0;
    const double step_sd = sigma / std::sqrt(static_cast<double>(n));
    for (int j = 1; j <= n; ++j)
        w[static_cast<size_t>(j)] = w[static_cast<size_t>(j) - 1] + step_sd * rng.normal();
    const double drift = w[static_cast<size_t>(n)];
    for (int j = 1; j <= n; ++j)
        w[static_cast<size_t>(j)] -= drift * static_cast<double>(j) / static_cast<double>(n);
    return w;
}

} // namespace gle
