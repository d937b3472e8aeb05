#include "gle/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gle {

ScalingSpec make_scaling_spec(double p, double t, std::vector<double> a, std::vector<double> b) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
    if (a.empty() || a.size() != b.size())
        throw dimension_mismatch("a and b must be nonempty and of equal length");
    for (size_t i = 0; i + 1 < a.size(); ++i)
        if (a[i + 1] > a[i] || b[i + 1] > b[i])
            throw std::invalid_argument("a and b must be weakly decreasing");
    ScalingSpec s;
    s.p = p;
    s.t = t;
    s.k = static_cast<int>(a.size());
    s.a = std::move(a);
    s.b = std::move(b);
    return s;
}

ScaledBoundary boundary_for(const ScalingSpec& spec, long T) {
    if (T < 1) throw std::invalid_argument("T must be positive");
    const double rt = std::sqrt(static_cast<double>(T));
    const int k = spec.k;
    ScaledBoundary out;
    out.T = T;
    out.m = static_cast<Time>(std::floor(spec.t * static_cast<double>(T)));
    out.x.resize(static_cast<size_t>(k));
    out.y.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        out.x[static_cast<size_t>(i)] = static_cast<Level>(std::floor(spec.a[static_cast<size_t>(i)] * rt));
        out.y[static_cast<size_t>(i)] =
            static_cast<Level>(std::floor(spec.p * static_cast<double>(T) + spec.b[static_cast<size_t>(i)] * rt));
    }
    for (int pass = 0; pass < k + 2; ++pass) {
        bool changed = false;
        for (int i = 1; i < k; ++i) {
            auto& xi = out.x[static_cast<size_t>(i)];
            auto& yi = out.y[static_cast<size_t>(i)];
            if (xi > out.x[static_cast<size_t>(i - 1)]) {
                xi = out.x[static_cast<size_t>(i - 1)];
                changed = true;
            }
            if (yi > out.y[static_cast<size_t>(i - 1)]) {
                yi = out.y[static_cast<size_t>(i - 1)];
                changed = true;
            }
        }
        for (int i = 0; i < k; ++i) {
            auto& xi = out.x[static_cast<size_t>(i)];
            auto& yi = out.y[static_cast<size_t>(i)];
            if (yi < xi) {
                yi = xi;
                changed = true;
            }
            if (yi > xi + T) {
                yi = xi + T;
                changed = true;
            }
        }
        if (!changed) break;
    }
    for (int i = 0; i < k; ++i) {
        const Level d = out.y[static_cast<size_t>(i)] - out.x[static_cast<size_t>(i)];
        const bool ordered = i == 0 || (out.x[static_cast<size_t>(i)] <= out.x[static_cast<size_t>(i - 1)] &&
                                        out.y[static_cast<size_t>(i)] <= out.y[static_cast<size_t>(i - 1)]);
        if (d < 0 || d > T || !ordered)
            throw infeasible_boundary("scaled boundary at T=" + std::to_string(T) +
                                      " could not be repaired to a feasible pair");
    }
    return out;
}

EnsembleSpec ensemble_for(const ScalingSpec& spec, long T) {
    const ScaledBoundary b = boundary_for(spec, T);
    return make_spec(0, static_cast<Time>(T), b.x, b.y);
}

std::vector<double> rescale_column(const ScalingSpec& spec, long T,
                                   const std::vector<Level>& column) {
    if (static_cast<int>(column.size()) != spec.k)
        throw dimension_mismatch("column length differs from k");
    const double rt = std::sqrt(static_cast<double>(T));
    const double center = spec.p * spec.t * static_cast<double>(T);
    std::vector<double> out(column.size());
    for (size_t i = 0; i < column.size(); ++i)
        out[i] = (static_cast<double>(column[i]) - center) / rt;
    return out;
}

RescaleSpec make_rescale_spec(double alpha, double p, double lambda) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    RescaleSpec s;
    s.alpha = alpha;
    s.p = p;
    s.lambda = lambda;
    return s;
}

namespace {

double path_at_real_time(const UpRightPath& path, double u) {
    if (u <= static_cast<double>(path.t0)) return static_cast<double>(path.values.front());
    if (u >= static_cast<double>(path.t1())) return static_cast<double>(path.values.back());
    const double fl = std::floor(u);
    const Time t = static_cast<Time>(fl);
    const double lo = static_cast<double>(path.at(t));
    const double hi = static_cast<double>(path.at(t + 1));
    return lo + (u - fl) * (hi - lo);
}

} // namespace

RescaledCurves rescale_ensemble(const BernoulliLineEnsemble& ens, const RescaleSpec& spec, long N,
                                double psi, int grid_points) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    const Time T0 = ens.t0();
    const Time T1 = ens.t1();
    if (T0 != -T1 || T1 <= 0)
        throw window_too_small("rescaling needs a symmetric window [-T, T], got [" +
                               std::to_string(T0) + ", " + std::to_string(T1) + "]");
    const double na = std::pow(static_cast<double>(N), spec.alpha);
    const double max_psi = static_cast<double>(T1) / na;
    if (psi <= 0.0) psi = max_psi;
    if (psi * na > static_cast<double>(T1) * (1.0 + 1e-12))
        throw window_too_small("psi N^alpha exceeds the ensemble window half-width");

    int gp = grid_points;
    if (gp <= 0) gp = static_cast<int>(std::min<double>(2.0 * std::ceil(psi * na) + 1.0, 4001.0));
    if (gp < 3) gp = 3;

    const double half_pow = std::pow(static_cast<double>(N), spec.alpha / 2.0);
    const double root_pq = std::sqrt(spec.p * (1.0 - spec.p));
    const int k = ens.k();

    RescaledCurves out;
    out.psi = psi;
    out.s.resize(static_cast<size_t>(gp));
    out.f.assign(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(gp)));
    out.line = out.f;
    for (int j = 0; j < gp; ++j) {
        const double s = -psi + (2.0 * psi) * j / (gp - 1);
        out.s[static_cast<size_t>(j)] = s;
        const double u = s * na;
        for (int i = 0; i < k; ++i) {
            const double L = path_at_real_time(ens.paths[static_cast<size_t>(i)], u);
            const double f = (L - spec.p * u + spec.lambda * s * s * half_pow) / half_pow;
            out.f[static_cast<size_t>(i)][static_cast<size_t>(j)] = f;
            out.line[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                (f - spec.lambda * s * s) / root_pq;
        }
    }
    return out;
}

} // namespace gle
