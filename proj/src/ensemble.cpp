#include "gle/ensemble.hpp"

#include <algorithm>
#include <sstream>

namespace gle {

UpRightPath make_path(Time t0, std::vector<Level> values) {
    if (values.empty()) throw step_violation("path needs at least one value");
    for (size_t r = 1; r < values.size(); ++r) {
        Level d = values[r] - values[r - 1];
        if (d != 0 && d != 1) {
            std::ostringstream os;
            os << "increment " << d << " at time " << t0 + static_cast<Time>(r)
               << " is not in {0,1}";
            throw step_violation(os.str());
        }
    }
    UpRightPath p;
    p.t0 = t0;
    p.values = std::move(values);
    return p;
}

Barrier Barrier::path(UpRightPath p) {
    Barrier b(Kind::path);
    b.path_ = std::move(p);
    return b;
}

static bool weakly_decreasing(const std::vector<Level>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

EnsembleSpec make_spec(Time T0, Time T1, std::vector<Level> x, std::vector<Level> y,
                       Barrier top, Barrier bottom) {
    std::vector<Time> S;
    S.reserve(static_cast<size_t>(T1 - T0 + 1));
    for (Time t = T0; t <= T1; ++t) S.push_back(t);
    return make_spec(T0, T1, std::move(x), std::move(y), std::move(top),
                     std::move(bottom), std::move(S));
}

EnsembleSpec make_spec(Time T0, Time T1, std::vector<Level> x, std::vector<Level> y,
                       Barrier top, Barrier bottom, std::vector<Time> S) {
    EnsembleSpec spec;
    spec.T0 = T0;
    spec.T1 = T1;
    spec.k = static_cast<int>(x.size());
    spec.x = std::move(x);
    spec.y = std::move(y);
    spec.top = std::move(top);
    spec.bottom = std::move(bottom);
    spec.S = std::move(S);
    validate_spec(spec);
    return spec;
}

void validate_spec(const EnsembleSpec& spec) {
    if (spec.T1 < spec.T0) throw std::invalid_argument("window is empty");
    if (spec.k <= 0) throw dimension_mismatch("k must be positive");
    if (static_cast<int>(spec.x.size()) != spec.k ||
        static_cast<int>(spec.y.size()) != spec.k)
        throw dimension_mismatch("boundary columns must have k entries");
    if (!weakly_decreasing(spec.x)) throw std::invalid_argument("x is not weakly decreasing");
    if (!weakly_decreasing(spec.y)) throw std::invalid_argument("y is not weakly decreasing");
    if (!std::is_sorted(spec.S.begin(), spec.S.end()))
        throw std::invalid_argument("S must be sorted");
    if (std::adjacent_find(spec.S.begin(), spec.S.end()) != spec.S.end())
        throw std::invalid_argument("S has duplicates");
    if (!spec.S.empty() && (spec.S.front() < spec.T0 || spec.S.back() > spec.T1))
        throw std::invalid_argument("S leaves the window");
    for (const Barrier* b : {&spec.top, &spec.bottom}) {
        if (b->is_path() &&
            (b->as_path().t0 != spec.T0 || b->as_path().t1() != spec.T1))
            throw dimension_mismatch("barrier path must span the window");
    }
}

bool is_admissible(const BernoulliLineEnsemble& ens, const EnsembleSpec& spec) {
    if (ens.k() != spec.k) throw dimension_mismatch("ensemble has wrong number of paths");
    for (const auto& p : ens.paths)
        if (p.t0 != spec.T0 || p.t1() != spec.T1)
            throw dimension_mismatch("path window does not match spec");

    for (int i = 0; i < spec.k; ++i) {
        if (ens.paths[static_cast<size_t>(i)].at(spec.T0) != spec.x[static_cast<size_t>(i)]) return false;
        if (ens.paths[static_cast<size_t>(i)].at(spec.T1) != spec.y[static_cast<size_t>(i)]) return false;
    }
    for (Time r : spec.S) {
        if (!spec.top.at_least(r, ens.paths.front().at(r))) return false;
        for (int i = 1; i < spec.k; ++i)
            if (ens.paths[static_cast<size_t>(i - 1)].at(r) < ens.paths[static_cast<size_t>(i)].at(r))
                return false;
        if (!spec.bottom.at_most(r, ens.paths.back().at(r))) return false;
    }
    return true;
}

std::string FeasibilityReport::describe() const {
    if (ok()) return "feasible";
    std::string s = "infeasible:";
    if (!endpoints_ok) s += " endpoint-columns";
    if (!barrier_steps_ok) s += " barrier-steps";
    if (!boundary_ok) s += " barrier-boundary";
    return s;
}

FeasibilityReport boundary_feasible(const EnsembleSpec& spec) {
    validate_spec(spec);
    FeasibilityReport rep;
    Time T = spec.width();

    rep.endpoints_ok = weakly_decreasing(spec.x) && weakly_decreasing(spec.y);
    for (int i = 0; i < spec.k && rep.endpoints_ok; ++i) {
        Level d = spec.y[static_cast<size_t>(i)] - spec.x[static_cast<size_t>(i)];
        if (d < 0 || d > T) rep.endpoints_ok = false;
    }

    // validate_spec already rejected barrier paths with the wrong span, and
    // make_path enforced their step rule, so this condition can only record
    // success here.
    rep.barrier_steps_ok = true;

    rep.boundary_ok = spec.top.at_least(spec.T0, spec.x.front()) &&
                      spec.top.at_least(spec.T1, spec.y.front()) &&
                      spec.bottom.at_most(spec.T0, spec.x.back()) &&
                      spec.bottom.at_most(spec.T1, spec.y.back());
    if (rep.boundary_ok && spec.top.is_path() && spec.bottom.is_path()) {
        for (Time t = spec.T0; t <= spec.T1 && rep.boundary_ok; ++t)
            if (spec.top.as_path().at(t) < spec.bottom.as_path().at(t))
                rep.boundary_ok = false;
    }
    return rep;
}

BernoulliLineEnsemble maximal_ensemble(const EnsembleSpec& spec) {
    FeasibilityReport rep = boundary_feasible(spec);
    if (!rep.ok()) throw infeasible_boundary(rep.describe());

    Time T = spec.width();
    size_t n = static_cast<size_t>(T) + 1;
    BernoulliLineEnsemble ens;
    ens.paths.reserve(static_cast<size_t>(spec.k));
    for (int j = 0; j < spec.k; ++j) {
        std::vector<Level> vals(n);
        vals[0] = spec.x[static_cast<size_t>(j)];
        const Level exit = spec.y[static_cast<size_t>(j)];
        for (size_t r = 1; r < n; ++r) {
            Time t = spec.T0 + static_cast<Time>(r);
            Level up = vals[r - 1] + 1;
            bool climb = up <= exit;
            if (climb && j == 0)
                climb = spec.top.at_least(t, up);
            else if (climb && j > 0)
                climb = ens.paths[static_cast<size_t>(j - 1)].at(t) >= up;
            vals[r] = climb ? up : vals[r - 1];
        }
        ens.paths.push_back(make_path(spec.T0, std::move(vals)));
    }
    return ens;
}

} // namespace gle
