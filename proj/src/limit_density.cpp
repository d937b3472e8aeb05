#include "gle/limit_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pair_tol(double x, double y, double tol) {
    if (tol >= 0.0) return tol;
    return 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

// 16-point Gauss-Legendre rule on [-1, 1], positive half (rule is symmetric).
constexpr int kGlHalf = 8;
constexpr double kGlNode[kGlHalf] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
constexpr double kGlWeight[kGlHalf] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

struct Workspace {
    int k = 0;
    std::vector<double> lm; // k*k log magnitudes
    std::vector<int> sg;    // k*k signs
    std::vector<double> m;  // k*k scaled matrix for the LU pass

    explicit Workspace(int kk) : k(kk), lm(kk * kk), sg(kk * kk), m(kk * kk) {}
};

// Rows for one side of the product: block (alpha, mult) contributes rows
// (c z_j)^d exp(c alpha z_j) with d = mult-1 down to 0.
void fill_side(const Blocks& bl, double c, const std::vector<double>& z, Workspace& ws) {
    const int k = ws.k;
    int row = 0;
    for (int b = 0; b < bl.count(); ++b) {
        const double alpha = bl.values[static_cast<size_t>(b)];
        const int mult = bl.mult[static_cast<size_t>(b)];
        for (int d = mult - 1; d >= 0; --d, ++row) {
            for (int col = 0; col < k; ++col) {
                const double w = c * z[static_cast<size_t>(col)];
                const double lin = c * alpha * z[static_cast<size_t>(col)];
                double lmag;
                int sgn;
                if (d == 0) {
                    lmag = lin;
                    sgn = 1;
                } else if (w == 0.0) {
                    lmag = kNegInf;
                    sgn = 0;
                } else {
                    lmag = d * std::log(std::abs(w)) + lin;
                    sgn = (w > 0.0 || d % 2 == 0) ? 1 : -1;
                }
                ws.lm[static_cast<size_t>(row * k + col)] = lmag;
                ws.sg[static_cast<size_t>(row * k + col)] = sgn;
            }
        }
    }
}

// log|det| and sign of the matrix held in (lm, sg), with per-row scaling so
// the LU pass runs on O(1) magnitudes.
double logdet_scaled(Workspace& ws, int& sign_out) {
    const int k = ws.k;
    double log_acc = 0.0;
    for (int r = 0; r < k; ++r) {
        double mx = kNegInf;
        for (int c = 0; c < k; ++c) mx = std::max(mx, ws.lm[static_cast<size_t>(r * k + c)]);
        if (mx == kNegInf) {
            sign_out = 0;
            return kNegInf;
        }
        log_acc += mx;
        for (int c = 0; c < k; ++c) {
            const size_t idx = static_cast<size_t>(r * k + c);
            ws.m[idx] = ws.sg[idx] == 0 ? 0.0 : ws.sg[idx] * std::exp(ws.lm[idx] - mx);
        }
    }
    int parity = 1;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        double best = std::abs(ws.m[static_cast<size_t>(col * k + col)]);
        for (int r = col + 1; r < k; ++r) {
            const double v = std::abs(ws.m[static_cast<size_t>(r * k + col)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) {
            sign_out = 0;
            return kNegInf;
        }
        if (piv != col) {
            for (int c = 0; c < k; ++c)
                std::swap(ws.m[static_cast<size_t>(piv * k + c)], ws.m[static_cast<size_t>(col * k + c)]);
            parity = -parity;
        }
        const double d = ws.m[static_cast<size_t>(col * k + col)];
        for (int r = col + 1; r < k; ++r) {
            const double f = ws.m[static_cast<size_t>(r * k + col)] / d;
            if (f == 0.0) continue;
            for (int c = col; c < k; ++c)
                ws.m[static_cast<size_t>(r * k + c)] -= f * ws.m[static_cast<size_t>(col * k + c)];
        }
    }
    int sign = parity;
    for (int i = 0; i < k; ++i) {
        const double d = ws.m[static_cast<size_t>(i * k + i)];
        sign *= (d > 0.0) ? 1 : -1;
        log_acc += std::log(std::abs(d));
    }
    sign_out = sign;
    return log_acc;
}

double h_log_ws(const LimitSpec& spec, const std::vector<double>& z, Workspace& ws, int& sign_out) {
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    int sa = 0, sb = 0;
    fill_side(spec.blocks_a, cc.c1, z, ws);
    const double la = logdet_scaled(ws, sa);
    if (sa == 0) {
        sign_out = 0;
        return kNegInf;
    }
    fill_side(spec.blocks_b, cc.c2, z, ws);
    const double lb = logdet_scaled(ws, sb);
    if (sb == 0) {
        sign_out = 0;
        return kNegInf;
    }
    double gauss = 0.0;
    for (double zi : z) gauss -= cc.c3 * zi * zi;
    sign_out = sa * sb;
    return la + lb + gauss;
}

void check_point(const LimitSpec& spec, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != spec.k)
        throw dimension_mismatch("z has " + std::to_string(z.size()) + " coordinates, spec has k=" +
                                 std::to_string(spec.k));
    for (size_t i = 0; i + 1 < z.size(); ++i)
        if (z[i + 1] > z[i]) throw std::invalid_argument("z must be weakly decreasing");
}

double envelope_slope(const LimitSpec& spec) {
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    double amax = 0.0, bmax = 0.0;
    int ma = 1, mb = 1;
    for (size_t i = 0; i < spec.blocks_a.values.size(); ++i) {
        amax = std::max(amax, std::abs(spec.blocks_a.values[i]));
        ma = std::max(ma, spec.blocks_a.mult[i]);
    }
    for (size_t i = 0; i < spec.blocks_b.values.size(); ++i) {
        bmax = std::max(bmax, std::abs(spec.blocks_b.values[i]));
        mb = std::max(mb, spec.blocks_b.mult[i]);
    }
    return cc.c1 * (amax + ma - 1) + cc.c2 * (bmax + mb - 1);
}

double log_factorial_sq(int k) { return 2.0 * std::lgamma(k + 1.0); }

// log of int_R exp(C|u| - c3 u^2) du.
double log_full_line(double C, double c3) {
    return std::log(2.0) + C * C / (4.0 * c3) + 0.5 * std::log(M_PI / (4.0 * c3)) +
           std::log(std::erfc(-C / (2.0 * std::sqrt(c3))));
}

// log of int_L^inf exp(C u - c3 u^2) du, an upper half-tail of the envelope.
double log_half_tail(double L, double C, double c3) {
    const double arg = std::sqrt(c3) * (L - C / (2.0 * c3));
    const double e = std::erfc(arg);
    if (e <= 0.0) return kNegInf;
    return C * C / (4.0 * c3) + 0.5 * std::log(M_PI / (4.0 * c3)) + std::log(e);
}

// Envelope mass of the region where some coordinate exceeds L in absolute
// value; bounds the truncation error of integrals over [-L, L]^k.
double log_tail_mass(const LimitSpec& spec, double L) {
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    const double C = envelope_slope(spec);
    return std::log(2.0 * spec.k) + log_factorial_sq(spec.k) + log_half_tail(L, C, cc.c3) +
           (spec.k - 1) * log_full_line(C, cc.c3);
}

double initial_box(const LimitSpec& spec, double tail_rel) {
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    const double C = envelope_slope(spec);
    const double sigma = 1.0 / std::sqrt(2.0 * cc.c3);
    // Solve c3 (L - C/(2 c3))^2 >= A - target, with erfc(x) <= exp(-x^2).
    const double A = std::log(2.0 * spec.k) + log_factorial_sq(spec.k) +
                     C * C / (4.0 * cc.c3) + 0.5 * std::log(M_PI / (4.0 * cc.c3)) +
                     (spec.k - 1) * std::max(0.0, log_full_line(C, cc.c3));
    const double target = std::log(tail_rel) - 25.0;
    const double L = C / (2.0 * cc.c3) + std::sqrt(std::max(1.0, (A - target) / cc.c3));
    return std::max(L, C / (2.0 * cc.c3) + 6.0 * sigma);
}

int base_panels(const LimitSpec& spec, double L) {
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    const double sigma = 1.0 / std::sqrt(2.0 * cc.c3);
    return std::max(6, static_cast<int>(std::ceil(L / (2.0 * sigma))));
}

// Iterated composite Gauss-Legendre over the ordered cone intersected with
// [-L, L]^k.  A coordinate may be pinned (for marginal sections); pinned < 0
// integrates all of them.
struct ConeIntegrator {
    const LimitSpec& spec;
    double L;
    int panels;
    int pinned = -1;
    double pin_value = 0.0;
    Workspace ws;
    std::vector<double> z;

    ConeIntegrator(const LimitSpec& s, double box, int p)
        : spec(s), L(box), panels(p), ws(s.k), z(static_cast<size_t>(s.k), 0.0) {}

    double value_at_point() {
        int sign = 0;
        const double l = h_log_ws(spec, z, ws, sign);
        if (sign == 0) return 0.0;
        return sign * std::exp(l);
    }

    double run() { return recurse(0); }

    double recurse(int d) {
        if (d == spec.k) return value_at_point();
        if (d == pinned) {
            if (d > 0 && pin_value > z[static_cast<size_t>(d - 1)]) return 0.0;
            if (pin_value < -L || pin_value > L) return 0.0;
            z[static_cast<size_t>(d)] = pin_value;
            return recurse(d + 1);
        }
        const double hi = (d == 0) ? L : z[static_cast<size_t>(d - 1)];
        const double lo = -L;
        if (hi <= lo) return 0.0;
        const double h = (hi - lo) / panels;
        double acc = 0.0;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double mid = lo + (pnl + 0.5) * h;
            for (int i = 0; i < kGlHalf; ++i) {
                const double off = 0.5 * h * kGlNode[i];
                z[static_cast<size_t>(d)] = mid - off;
                const double f0 = recurse(d + 1);
                z[static_cast<size_t>(d)] = mid + off;
                const double f1 = recurse(d + 1);
                acc += kGlWeight[i] * 0.5 * h * (f0 + f1);
            }
        }
        return acc;
    }
};

double cone_integral(const LimitSpec& spec, double L, int panels) {
    ConeIntegrator integ(spec, L, panels);
    return integ.run();
}

double refine_at_box(const LimitSpec& spec, double L, double rel_tol) {
    const int p0 = base_panels(spec, L);
    const int levels = (spec.k >= 3) ? 3 : 5;
    double prev = cone_integral(spec, L, p0);
    int p = p0;
    for (int lvl = 1; lvl < levels; ++lvl) {
        p *= 2;
        const double cur = cone_integral(spec, L, p);
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    throw quadrature_failure("panel refinement did not reach rel_tol=" + std::to_string(rel_tol) +
                             " at L=" + std::to_string(L));
}

} // namespace

LimitConstants limit_constants(double p, double t) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
    const double pq = p * (1.0 - p);
    LimitConstants c;
    c.c1 = 1.0 / (pq * t);
    c.c2 = 1.0 / (pq * (1.0 - t));
    c.c3 = 1.0 / (2.0 * pq * t * (1.0 - t));
    return c;
}

int Blocks::total() const {
    int n = 0;
    for (int m : mult) n += m;
    return n;
}

Blocks block_structure(const std::vector<double>& v, double tol) {
    Blocks out;
    if (v.empty()) return out;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] > v[i] + pair_tol(v[i], v[i + 1], tol))
            throw std::invalid_argument("vector is not weakly decreasing");
    }
    size_t start = 0;
    while (start < v.size()) {
        size_t end = start + 1;
        while (end < v.size() && v[end - 1] - v[end] <= pair_tol(v[end - 1], v[end], tol)) ++end;
        out.values.push_back(v[start]);
        out.mult.push_back(static_cast<int>(end - start));
        start = end;
    }
    return out;
}

bool LimitSpec::distinct() const {
    for (int m : blocks_a.mult)
        if (m > 1) return false;
    for (int m : blocks_b.mult)
        if (m > 1) return false;
    return true;
}

LimitSpec make_limit_spec(double p, double t, std::vector<double> a, std::vector<double> b,
                          double tol) {
    limit_constants(p, t);
    if (a.empty() || a.size() != b.size())
        throw dimension_mismatch("endpoint vectors must be nonempty and of equal length");
    LimitSpec spec;
    spec.p = p;
    spec.t = t;
    spec.k = static_cast<int>(a.size());
    spec.blocks_a = block_structure(a, tol);
    spec.blocks_b = block_structure(b, tol);
    spec.a = std::move(a);
    spec.b = std::move(b);
    return spec;
}

double H_density_log(const LimitSpec& spec, const std::vector<double>& z, int* sign_out) {
    check_point(spec, z);
    Workspace ws(spec.k);
    int sign = 0;
    const double l = h_log_ws(spec, z, ws, sign);
    if (sign_out) *sign_out = sign;
    return l;
}

double H_density(const LimitSpec& spec, const std::vector<double>& z) {
    int sign = 0;
    const double l = H_density_log(spec, z, &sign);
    if (sign <= 0) return 0.0;
    return std::exp(l);
}

double envelope_log_bound(const LimitSpec& spec, const std::vector<double>& z) {
    check_point(spec, z);
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    const double C = envelope_slope(spec);
    double acc = log_factorial_sq(spec.k);
    for (double zi : z) acc += C * std::abs(zi) - cc.c3 * zi * zi;
    return acc;
}

double zc_closed_form(const LimitSpec& spec) {
    if (!spec.distinct())
        throw std::invalid_argument("closed form requires all entries of a and b distinct");
    const LimitConstants cc = limit_constants(spec.p, spec.t);
    const double pq = spec.p * (1.0 - spec.p);
    const int k = spec.k;
    Workspace ws(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double d = spec.b[static_cast<size_t>(i)] - spec.a[static_cast<size_t>(j)];
            ws.lm[static_cast<size_t>(i * k + j)] = -d * d / (2.0 * pq);
            ws.sg[static_cast<size_t>(i * k + j)] = 1;
        }
    int sign = 0;
    const double ld = logdet_scaled(ws, sign);
    if (sign <= 0)
        throw gle::error("closed-form Gaussian determinant lost positivity; endpoints too separated "
                         "for double precision");
    double le = 0.5 * k * std::log(2.0 * M_PI * pq * spec.t * (1.0 - spec.t));
    for (double ai : spec.a) le += 0.5 * cc.c1 * ai * ai;
    for (double bi : spec.b) le += 0.5 * cc.c2 * bi * bi;
    return std::exp(le + ld);
}

double zc_quadrature(const LimitSpec& spec, double rel_tol, double tail_rel) {
    if (!(rel_tol > 0.0) || !(tail_rel > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    double L = initial_box(spec, tail_rel);
    for (int attempt = 0; attempt < 5; ++attempt) {
        const double I = refine_at_box(spec, L, rel_tol);
        if (!(I > 0.0)) throw quadrature_failure("integral of the density came out nonpositive");
        if (log_tail_mass(spec, L) <= std::log(tail_rel) + std::log(I)) return I;
        L *= 1.3;
    }
    throw quadrature_failure("could not certify the truncation tail below the requested bound");
}

double normalizing_constant(const LimitSpec& spec) {
    if (spec.distinct()) return zc_closed_form(spec);
    return zc_quadrature(spec);
}

double DensityEval::H(const std::vector<double>& z) const { return H_density(spec, z); }

double DensityEval::rho(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != spec.k)
        throw dimension_mismatch("z has wrong dimension for density");
    for (size_t i = 0; i + 1 < z.size(); ++i)
        if (z[i + 1] > z[i]) return 0.0;
    return H_density(spec, z) / Zc;
}

DensityEval make_density(const LimitSpec& spec) {
    DensityEval d;
    d.spec = spec;
    d.Zc = normalizing_constant(spec);
    if (!(d.Zc > 0.0) || !std::isfinite(d.Zc))
        throw quadrature_failure("normalizing constant is not a positive finite number");
    return d;
}

std::vector<double> split_blocks(const Blocks& blocks, double eps, int direction) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(blocks.total()));
    for (size_t b = 0; b < blocks.values.size(); ++b) {
        const double val = blocks.values[b];
        const int m = blocks.mult[b];
        for (int j = 1; j <= m; ++j)
            out.push_back(direction > 0 ? val + (m - j + 1) * eps : val - j * eps);
    }
    for (size_t i = 0; i + 1 < out.size(); ++i)
        if (out[i + 1] >= out[i])
            throw std::invalid_argument("eps too large: split vector is no longer strictly decreasing");
    return out;
}

double confluent_check(const LimitSpec& spec, const std::vector<double>& z, double eps,
                       int direction) {
    check_point(spec, z);
    for (size_t i = 0; i + 1 < z.size(); ++i)
        if (z[i + 1] >= z[i])
            throw std::invalid_argument("confluent check needs a strictly ordered interior point");
    int sign = 0;
    const double lh = H_density_log(spec, z, &sign);
    if (sign <= 0)
        throw std::invalid_argument("density vanishes at z; pick an interior point");

    long long collapsed = 0;
    for (int m : spec.blocks_a.mult) collapsed += static_cast<long long>(m) * (m - 1) / 2;
    for (int m : spec.blocks_b.mult) collapsed += static_cast<long long>(m) * (m - 1) / 2;

    const LimitSpec split = make_limit_spec(spec.p, spec.t, split_blocks(spec.blocks_a, eps, direction),
                                            split_blocks(spec.blocks_b, eps, direction));
    if (!split.distinct())
        throw std::invalid_argument("eps is below the block-merging resolution");
    int sign_eps = 0;
    const double lh_eps = H_density_log(split, z, &sign_eps);
    if (sign_eps == 0) return 0.0;
    return sign_eps * std::exp(lh_eps - collapsed * std::log(eps) - lh);
}

double MarginalCdf::operator()(double point) const {
    if (u.empty()) return 0.0;
    if (point <= u.front()) return 0.0;
    if (point >= u.back()) return 1.0;
    const auto it = std::upper_bound(u.begin(), u.end(), point);
    const size_t j = static_cast<size_t>(it - u.begin());
    const double w = (point - u[j - 1]) / (u[j] - u[j - 1]);
    return F[j - 1] + w * (F[j] - F[j - 1]);
}

MarginalCdf marginal_cdf(const DensityEval& density, int coord, int grid_points) {
    const LimitSpec& spec = density.spec;
    if (coord < 1 || coord > spec.k) throw std::invalid_argument("coord must lie in 1..k");
    if (grid_points < 9) throw std::invalid_argument("grid_points too small");
    int n = grid_points;
    if (n % 2 == 0) ++n;
    const double L = initial_box(spec, 1e-8);
    const int panels = base_panels(spec, L);

    MarginalCdf cdf;
    cdf.u.resize(static_cast<size_t>(n));
    cdf.F.assign(static_cast<size_t>(n), 0.0);
    const double h = 2.0 * L / (n - 1);
    std::vector<double> f(static_cast<size_t>(n), 0.0);
    ConeIntegrator integ(spec, L, panels);
    integ.pinned = coord - 1;
    for (int j = 0; j < n; ++j) {
        const double uj = -L + j * h;
        cdf.u[static_cast<size_t>(j)] = uj;
        integ.pin_value = uj;
        if (spec.k == 1) {
            integ.z[0] = uj;
            f[static_cast<size_t>(j)] = integ.value_at_point() / density.Zc;
        } else {
            f[static_cast<size_t>(j)] = integ.run() / density.Zc;
        }
    }
    for (int j = 1; j < n; ++j) {
        const size_t s = static_cast<size_t>(j);
        if (j == 1)
            cdf.F[s] = cdf.F[s - 1] + h / 12.0 * (5.0 * f[s - 1] + 8.0 * f[s] - f[s + 1]);
        else
            cdf.F[s] = cdf.F[s - 2] + h / 3.0 * (f[s - 2] + 4.0 * f[s - 1] + f[s]);
    }
    cdf.raw_total = cdf.F.back();
    if (std::abs(cdf.raw_total - 1.0) > 2e-3)
        throw quadrature_failure("marginal mass " + std::to_string(cdf.raw_total) +
                                 " is too far from 1");
    for (int j = 1; j < n; ++j) {
        const size_t s = static_cast<size_t>(j);
        cdf.F[s] = std::max(cdf.F[s], cdf.F[s - 1]);
    }
    for (double& v : cdf.F) v = std::min(1.0, std::max(0.0, v / cdf.raw_total));
    cdf.F.back() = 1.0;
    return cdf;
}

} // namespace gle
