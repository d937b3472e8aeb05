#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gle/errors.hpp"

namespace gle {

using Time = long;
using Level = long;

/// Lattice path with unit time steps and increments in {0,1}.
/// values[r] is the height at time t0 + r.
struct UpRightPath {
    Time t0 = 0;
    std::vector<Level> values;

    Time t1() const { return t0 + static_cast<Time>(values.size()) - 1; }
    bool covers(Time t) const { return t >= t0 && t <= t1(); }

    Level at(Time t) const { return values[static_cast<size_t>(t - t0)]; }
    void set(Time t, Level v) { values[static_cast<size_t>(t - t0)] = v; }
};

/// Validates the step rule and builds a path; throws step_violation otherwise.
UpRightPath make_path(Time t0, std::vector<Level> values);

/// Top or bottom boundary: a path, or +/- infinity (no constraint).
class Barrier {
public:
    enum class Kind { plus_infinity, minus_infinity, path };

    static Barrier plus_infinity() { return Barrier(Kind::plus_infinity); }
    static Barrier minus_infinity() { return Barrier(Kind::minus_infinity); }
    static Barrier path(UpRightPath p);

    Kind kind() const { return kind_; }
    bool is_path() const { return kind_ == Kind::path; }
    const UpRightPath& as_path() const { return path_; }

    /// barrier(t) >= v, with the infinite conventions.
    bool at_least(Time t, Level v) const {
        if (kind_ == Kind::plus_infinity) return true;
        if (kind_ == Kind::minus_infinity) return false;
        return path_.at(t) >= v;
    }
    /// barrier(t) <= v.
    bool at_most(Time t, Level v) const {
        if (kind_ == Kind::minus_infinity) return true;
        if (kind_ == Kind::plus_infinity) return false;
        return path_.at(t) <= v;
    }

private:
    explicit Barrier(Kind k) : kind_(k) {}
    Kind kind_ = Kind::plus_infinity;
    UpRightPath path_;
};

/// Boundary data for k ordered up-right paths on [T0, T1]: entry column x,
/// exit column y (both weakly decreasing), a top barrier, a bottom barrier,
/// and the set S of times where the ordering is enforced.
struct EnsembleSpec {
    Time T0 = 0;
    Time T1 = 0;
    int k = 0;
    std::vector<Level> x;
    std::vector<Level> y;
    Barrier top = Barrier::plus_infinity();
    Barrier bottom = Barrier::minus_infinity();
    std::vector<Time> S; // sorted, duplicate-free subset of [T0, T1]

    Time width() const { return T1 - T0; }
    bool S_is_full() const { return static_cast<Time>(S.size()) == width() + 1; }
};

/// Spec with S equal to the whole window.
EnsembleSpec make_spec(Time T0, Time T1, std::vector<Level> x, std::vector<Level> y,
                       Barrier top = Barrier::plus_infinity(),
                       Barrier bottom = Barrier::minus_infinity());

/// Same, with an explicit avoidance set.
EnsembleSpec make_spec(Time T0, Time T1, std::vector<Level> x, std::vector<Level> y,
                       Barrier top, Barrier bottom, std::vector<Time> S);

/// Structural validation (sizes, monotone columns, S within window, barrier
/// spans).  Throws dimension_mismatch or std::invalid_argument.
void validate_spec(const EnsembleSpec& spec);

/// k paths ordered top to bottom; paths[0] is the highest line.
struct BernoulliLineEnsemble {
    std::vector<UpRightPath> paths;

    int k() const { return static_cast<int>(paths.size()); }
    Time t0() const { return paths.front().t0; }
    Time t1() const { return paths.front().t1(); }
};

/// True when every path joins its boundary points and, at every time in S,
/// top >= B_1 >= ... >= B_k >= bottom.  Throws dimension_mismatch when the
/// ensemble does not even have the spec's shape.
bool is_admissible(const BernoulliLineEnsemble& ens, const EnsembleSpec& spec);

struct FeasibilityReport {
    bool endpoints_ok = false;     // columns weakly decreasing, 0 <= y_i - x_i <= T1 - T0
    bool barrier_steps_ok = false; // barrier paths span the window (step rule holds by construction)
    bool boundary_ok = false;      // top(T0) >= x_1, top(T1) >= y_1, bottom(T0) <= x_k,
                                   // bottom(T1) <= y_k, top >= bottom pointwise
    bool ok() const { return endpoints_ok && barrier_steps_ok && boundary_ok; }
    std::string describe() const;
};

/// Checks the three conditions that are jointly equivalent to a nonempty
/// admissible set over the full window.
FeasibilityReport boundary_feasible(const EnsembleSpec& spec);

/// The pointwise-maximal admissible ensemble for the full-window ordering:
/// each line climbs as early as possible subject to its exit level and the
/// line (or barrier) above.  Throws infeasible_boundary when no admissible
/// ensemble exists.
BernoulliLineEnsemble maximal_ensemble(const EnsembleSpec& spec);

} // namespace gle
