#include "gle/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gle {

namespace {

// Pascal triangle, grown on demand.  Thread-local so samplers on different
// threads never contend; sized for window-scale n, not for n ~ 10^4 (use
// log_binomial_row for that regime).
thread_local std::vector<std::vector<ExactCount>> pascal_rows;

void ensure_rows(long n) {
    while (static_cast<long>(pascal_rows.size()) <= n) {
        size_t m = pascal_rows.size();
        std::vector<ExactCount> row(m + 1);
        row[0] = 1;
        row[m] = 1;
        for (size_t r = 1; r < m; ++r)
            row[r] = pascal_rows[m - 1][r - 1] + pascal_rows[m - 1][r];
        pascal_rows.push_back(std::move(row));
    }
}

const ExactCount zero_count{};

} // namespace

const ExactCount& binomial(long n, long r) {
    if (n < 0 || r < 0 || r > n) return zero_count;
    ensure_rows(n);
    return pascal_rows[static_cast<size_t>(n)][static_cast<size_t>(r)];
}

ExactCount elem_sym(long r, long n) {
    if (n < 0) throw std::invalid_argument("variable count must be nonnegative");
    return binomial(n, r);
}

ExactCount det_exact(std::vector<std::vector<ExactCount>> m) {
    const size_t n = m.size();
    if (n == 0) return 1;
    for (const auto& row : m)
        if (row.size() != n) throw dimension_mismatch("determinant needs a square matrix");

    // Bareiss elimination: every division below is exact.
    int sign = 1;
    ExactCount prev = 1;
    for (size_t p = 0; p + 1 < n; ++p) {
        if (m[p][p] == 0) {
            size_t swap_row = p + 1;
            while (swap_row < n && m[swap_row][p] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[p], m[swap_row]);
            sign = -sign;
        }
        for (size_t i = p + 1; i < n; ++i) {
            for (size_t j = p + 1; j < n; ++j) {
                m[i][j] = m[p][p] * m[i][j] - m[i][p] * m[p][j];
                m[i][j] /= prev;
            }
            m[i][p] = 0;
        }
        prev = m[p][p];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

ExactCount count_free(const EnsembleSpec& spec) {
    validate_spec(spec);
    ExactCount prod = 1;
    for (int i = 0; i < spec.k; ++i) {
        prod *= binomial(spec.width(),
                         spec.y[static_cast<size_t>(i)] - spec.x[static_cast<size_t>(i)]);
        if (prod == 0) break;
    }
    return prod;
}

ExactCount count_avoid_lgv(const std::vector<Level>& x, const std::vector<Level>& y, Time T) {
    const size_t k = x.size();
    if (y.size() != k) throw dimension_mismatch("boundary columns differ in length");
    std::vector<std::vector<ExactCount>> m(k, std::vector<ExactCount>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            m[i][j] = binomial(T, y[i] - x[j] - static_cast<long>(i) + static_cast<long>(j));
    return det_exact(std::move(m));
}

ExactCount count_avoid_lgv(const EnsembleSpec& spec) {
    validate_spec(spec);
    if (spec.top.is_path() || spec.bottom.is_path())
        throw std::invalid_argument("determinant count applies to barrier-free specs");
    if (!spec.S_is_full())
        throw std::invalid_argument("determinant count needs the ordering on the whole window");
    return count_avoid_lgv(spec.x, spec.y, spec.width());
}

namespace {

// Enumerates one path's bridges as masks of up-slots; next_permutation walks
// all mask rearrangements, i.e. all bridges.
struct BridgeEnum {
    std::vector<char> mask;

    void first(long slots, long ups) {
        mask.assign(static_cast<size_t>(slots), 0);
        std::fill(mask.end() - ups, mask.end(), char(1));
        std::sort(mask.begin(), mask.end());
    }
    bool next() { return std::next_permutation(mask.begin(), mask.end()); }

    void write(Level z0, UpRightPath& p) const {
        p.values[0] = z0;
        for (size_t s = 0; s < mask.size(); ++s)
            p.values[s + 1] = p.values[s] + mask[s];
    }
};

} // namespace

void for_each_admissible(const EnsembleSpec& spec,
                         const std::function<void(const BernoulliLineEnsemble&)>& visit,
                         long long cap) {
    ExactCount free_total = count_free(spec);
    if (free_total > cap) {
        std::ostringstream os;
        os << "enumeration of " << free_total << " tuples exceeds cap " << cap;
        throw cap_exceeded(os.str(), free_total.str());
    }
    if (free_total == 0) return;

    const size_t k = static_cast<size_t>(spec.k);
    const long slots = spec.width();
    std::vector<BridgeEnum> iters(k);
    BernoulliLineEnsemble ens;
    ens.paths.assign(k, UpRightPath{spec.T0, std::vector<Level>(static_cast<size_t>(slots) + 1)});
    for (size_t i = 0; i < k; ++i) {
        iters[i].first(slots, spec.y[i] - spec.x[i]);
        iters[i].write(spec.x[i], ens.paths[i]);
    }

    for (;;) {
        if (is_admissible(ens, spec)) visit(ens);
        size_t i = k;
        while (i-- > 0) {
            if (iters[i].next()) {
                iters[i].write(spec.x[i], ens.paths[i]);
                break;
            }
            iters[i].first(slots, spec.y[i] - spec.x[i]);
            iters[i].write(spec.x[i], ens.paths[i]);
            if (i == 0) return;
        }
    }
}

ExactCount count_avoid_enum(const EnsembleSpec& spec, long long cap) {
    long long n = 0;
    for_each_admissible(spec, [&](const BernoulliLineEnsemble&) { ++n; }, cap);
    return n;
}

ExactProb PmfTable::total() const {
    ExactProb s = 0;
    for (const auto& [column, p] : prob) s += p;
    return s;
}

PmfTable fixed_time_pmf(const EnsembleSpec& spec, Time m) {
    validate_spec(spec);
    if (spec.top.is_path() || spec.bottom.is_path())
        throw std::invalid_argument("column law requires a barrier-free spec");
    if (!spec.S_is_full())
        throw std::invalid_argument("column law needs the ordering on the whole window");
    if (m < spec.T0 || m > spec.T1)
        throw std::invalid_argument("column time lies outside the window");

    ExactCount denom = count_avoid_lgv(spec);
    if (denom == 0)
        throw degenerate_denominator("spec admits no ensemble, column law undefined");

    const long k = spec.k;
    const long left = m - spec.T0;
    const long right = spec.T1 - m;

    PmfTable table;
    table.m = m;

    std::vector<Level> lambda(static_cast<size_t>(k));
    auto emit = [&]() {
        std::vector<std::vector<ExactCount>> a(static_cast<size_t>(k),
                                               std::vector<ExactCount>(static_cast<size_t>(k)));
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j)
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    binomial(left, lambda[static_cast<size_t>(i)] - spec.x[static_cast<size_t>(j)] - i + j);
        ExactCount num = det_exact(std::move(a));
        if (num == 0) return;
        std::vector<std::vector<ExactCount>> b(static_cast<size_t>(k),
                                               std::vector<ExactCount>(static_cast<size_t>(k)));
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j)
                b[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    binomial(right, spec.y[static_cast<size_t>(i)] - lambda[static_cast<size_t>(j)] - i + j);
        num *= det_exact(std::move(b));
        if (num == 0) return;
        table.prob.emplace(lambda, ExactProb(num, denom));
    };

    auto walk = [&](auto&& self, long i) -> void {
        if (i == k) {
            emit();
            return;
        }
        Level lo = std::max(spec.x[static_cast<size_t>(i)],
                            spec.y[static_cast<size_t>(i)] - right);
        Level hi = std::min(spec.x[static_cast<size_t>(i)] + left,
                            spec.y[static_cast<size_t>(i)]);
        if (i > 0) hi = std::min(hi, lambda[static_cast<size_t>(i - 1)]);
        for (Level v = hi; v >= lo; --v) {
            lambda[static_cast<size_t>(i)] = v;
            self(self, i + 1);
        }
    };
    walk(walk, 0);
    return table;
}

ExactProb acceptance_probability(const EnsembleSpec& spec, long long cap) {
    ExactCount denom = count_free(spec);
    if (denom == 0)
        throw degenerate_denominator("no free path tuples join the boundary columns");
    ExactCount num;
    if (!spec.top.is_path() && !spec.bottom.is_path() && spec.S_is_full())
        num = count_avoid_lgv(spec);
    else
        num = count_avoid_enum(spec, cap);
    return {num, denom};
}

double log_exact(const ExactCount& v) {
    if (v < 0) throw std::invalid_argument("log of a negative count");
    if (v == 0) return -std::numeric_limits<double>::infinity();
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits <= 52) return std::log(v.convert_to<double>());
    ExactCount top = v >> (bits - 52);
    return std::log(top.convert_to<double>()) +
           static_cast<double>(bits - 52) * std::log(2.0);
}

std::vector<double> log_binomial_row(long n) {
    if (n < 0) throw std::invalid_argument("row index must be nonnegative");
    std::vector<double> out(static_cast<size_t>(n) + 1);
    ExactCount c = 1;
    out[0] = 0.0;
    for (long N = 0; N < n; ++N) {
        c *= (n - N);
        c /= (N + 1);
        out[static_cast<size_t>(N) + 1] = log_exact(c);
    }
    return out;
}

namespace {

void check_profile(long n, double p) {
    if (n <= 0) throw std::invalid_argument("need n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
}

// N log((1-p)/p) - n log(1-p) - (1/2) log n, the shared growth profile.
double growth_log(long n, long N, double p) {
    return static_cast<double>(N) * std::log((1.0 - p) / p) -
           static_cast<double>(n) * std::log1p(-p) - 0.5 * std::log(static_cast<double>(n));
}

} // namespace

double elem_sym_asymptotic_log(long n, long N, double p) {
    check_profile(n, p);
    if (N < 0 || N > n) return -std::numeric_limits<double>::infinity();
    const double pq = p * (1.0 - p);
    const double x = (static_cast<double>(N) - p * static_cast<double>(n)) /
                     std::sqrt(static_cast<double>(n));
    return -0.5 * std::log(2.0 * M_PI) - x * x / (2.0 * pq) + growth_log(n, N, p) -
           0.5 * std::log(pq);
}

double elem_sym_asymptotic(long n, long N, double p) {
    return std::exp(elem_sym_asymptotic_log(n, N, p));
}

bool elem_sym_upper_bound_holds(long n, long N, double p, double C, double c) {
    check_profile(n, p);
    if (N < 0 || N > n) return true;
    ExactCount exact = 1;
    for (long i = 1; i <= std::min(N, n - N); ++i) {
        exact *= (n - i + 1);
        exact /= i;
    }
    const double dev = static_cast<double>(N) - p * static_cast<double>(n);
    const double bound = std::log(C) + growth_log(n, N, p) - c * dev * dev / static_cast<double>(n);
    return log_exact(exact) <= bound;
}

double calibrate_upper_bound_constant(long n, double p, double c) {
    check_profile(n, p);
    std::vector<double> row = log_binomial_row(n);
    double worst = -std::numeric_limits<double>::infinity();
    for (long N = 0; N <= n; ++N) {
        const double dev = static_cast<double>(N) - p * static_cast<double>(n);
        const double body = growth_log(n, N, p) - c * dev * dev / static_cast<double>(n);
        worst = std::max(worst, row[static_cast<size_t>(N)] - body);
    }
    const double allowance = (1.0 / p + 1.0 / (1.0 - p) - 1.0) / (12.0 * static_cast<double>(n)) +
                             1.0 / (static_cast<double>(n) * static_cast<double>(n));
    return std::exp(worst + allowance);
}

} // namespace gle
