#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "gle/samplers.hpp"
#include "gle/scaling.hpp"

using namespace gle;

TEST_SUITE("scaling") {

TEST_CASE("boundary columns at small sizes") {
    const ScalingSpec s = make_scaling_spec(0.5, 0.5, {0.0}, {0.0});
    const ScaledBoundary b = boundary_for(s, 16);
    CHECK(b.T == 16);
    CHECK(b.m == 8);
    CHECK(b.x == std::vector<Level>{0});
    CHECK(b.y == std::vector<Level>{8}); // floor(0.5 * 16)

    const ScalingSpec s2 = make_scaling_spec(0.5, 0.25, {1.0, -1.0}, {1.0, -1.0});
    const ScaledBoundary b2 = boundary_for(s2, 100);
    CHECK(b2.m == 25);
    CHECK(b2.x == std::vector<Level>{10, -10});
    CHECK(b2.y == std::vector<Level>{60, 40}); // floor(50 +- 10)
}

TEST_CASE("touching diffusive coordinates still give feasible columns") {
    // equal a entries floor to equal lattice values; the repair pass must
    // keep the columns weakly decreasing and the window constraint intact
    const ScalingSpec s = make_scaling_spec(0.5, 0.5, {0.0, 0.0, 0.0}, {0.2, 0.0, -0.2});
    for (long T : {4L, 9L, 25L, 100L}) {
        const ScaledBoundary b = boundary_for(s, T);
        for (size_t i = 0; i + 1 < b.x.size(); ++i) {
            REQUIRE(b.x[i] >= b.x[i + 1]);
            REQUIRE(b.y[i] >= b.y[i + 1]);
        }
        for (size_t i = 0; i < b.x.size(); ++i) {
            REQUIRE(b.y[i] >= b.x[i]);
            REQUIRE(b.y[i] - b.x[i] <= T);
        }
        const EnsembleSpec spec = ensemble_for(s, T);
        CHECK(boundary_feasible(spec).ok());
        CHECK_NOTHROW(maximal_ensemble(spec));
    }
}

TEST_CASE("random scaling data produce feasible ensembles") {
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int rep = 0; rep < 60; ++rep) {
        const int k = 1 + static_cast<int>(g() % 3);
        std::vector<double> a(static_cast<size_t>(k)), b(static_cast<size_t>(k));
        for (auto& v : a) v = U(g);
        for (auto& v : b) v = U(g);
        std::sort(a.begin(), a.end(), std::greater<double>());
        std::sort(b.begin(), b.end(), std::greater<double>());
        const ScalingSpec s = make_scaling_spec(0.5, 0.5, a, b);
        const long T = 20 + static_cast<long>(g() % 200);
        const EnsembleSpec spec = ensemble_for(s, T);
        REQUIRE(boundary_feasible(spec).ok());
        CHECK(spec.T0 == 0);
        CHECK(spec.T1 == T);
        CHECK_NOTHROW(maximal_ensemble(spec));
    }
}

TEST_CASE("column rescaling recentres at p t T") {
    const ScalingSpec s = make_scaling_spec(0.5, 0.5, {0.0, 0.0}, {0.0, 0.0});
    const auto r = rescale_column(s, 400, {110, 90});
    CHECK(r[0] == doctest::Approx((110.0 - 100.0) / 20.0));
    CHECK(r[1] == doctest::Approx((90.0 - 100.0) / 20.0));
}

TEST_CASE("scaling spec validation") {
    CHECK_THROWS_AS(make_scaling_spec(0.0, 0.5, {0.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_scaling_spec(0.5, 0.5, {0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_scaling_spec(0.5, 0.5, {0.0}, {0.0, 0.0}), dimension_mismatch);
}

TEST_CASE("curve rescaling at s = 0 reads off the centre value") {
    BernoulliLineEnsemble ens;
    std::vector<Level> vals;
    for (Time t = -8; t <= 8; ++t) vals.push_back((t + 8) / 2);
    ens.paths = {make_path(-8, std::move(vals))};

    const RescaleSpec rs = make_rescale_spec(1.0, 0.5, 0.0);
    const RescaledCurves rc = rescale_ensemble(ens, rs, 8, 0.5, 9);
    REQUIRE(rc.s.size() == 9);
    REQUIRE(rc.f.size() == 1);
    CHECK(rc.psi == doctest::Approx(0.5));
    CHECK(rc.s.front() == doctest::Approx(-0.5));
    CHECK(rc.s.back() == doctest::Approx(0.5));
    // centre grid point: f(0) = N^{-1/2} L(0)
    CHECK(rc.f[0][4] == doctest::Approx(ens.paths[0].at(0) / std::sqrt(8.0)));
    // line = (f - lambda s^2) / sqrt(pq) with lambda = 0
    CHECK(rc.line[0][4] == doctest::Approx(rc.f[0][4] / 0.5));
}

TEST_CASE("straight staircase stays uniformly small after rescaling") {
    // L(t) = floor(p t) tracks the drift line within 1, so f is O(N^{-alpha/2})
    const long N = 64;
    const double alpha = 1.0;
    const long T = 64;
    BernoulliLineEnsemble ens;
    std::vector<Level> vals;
    for (Time t = -T; t <= T; ++t)
        vals.push_back(static_cast<Level>(std::floor(0.5 * static_cast<double>(t))));
    ens.paths = {make_path(-T, std::move(vals))};

    const double lambda = 0.3;
    const RescaleSpec rs = make_rescale_spec(alpha, 0.5, lambda);
    const RescaledCurves rc = rescale_ensemble(ens, rs, N, 1.0, 257);
    const double slack = (1.0 + 1e-9) / std::sqrt(static_cast<double>(N));
    for (size_t j = 0; j < rc.s.size(); ++j) {
        const double para = lambda * rc.s[j] * rc.s[j];
        CHECK(std::abs(rc.f[0][j] - para) <= slack);
        CHECK(std::abs(rc.line[0][j]) <= 2.0 * slack + 1e-12);
    }
}

TEST_CASE("curve rescaling window rules") {
    const RescaleSpec rs = make_rescale_spec(1.0, 0.5, 0.0);

    BernoulliLineEnsemble sym;
    sym.paths = {make_path(-4, {0, 0, 1, 1, 2, 2, 3, 3, 4})};
    CHECK_NOTHROW(rescale_ensemble(sym, rs, 4, 1.0, 5));
    // psi beyond the window
    CHECK_THROWS_AS(rescale_ensemble(sym, rs, 4, 1.5, 5), window_too_small);
    // asymmetric window
    BernoulliLineEnsemble asym;
    asym.paths = {make_path(0, {0, 0, 1, 1, 2})};
    CHECK_THROWS_AS(rescale_ensemble(asym, rs, 4, 0.5, 5), window_too_small);

    CHECK_THROWS_AS(make_rescale_spec(0.0, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_rescale_spec(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_rescale_spec(1.0, 0.5, -0.1), std::invalid_argument);
}

TEST_CASE("default psi covers the whole symmetric window") {
    BernoulliLineEnsemble sym;
    sym.paths = {make_path(-8, std::vector<Level>(17, 0))};
    const RescaleSpec rs = make_rescale_spec(1.0, 0.5, 0.0);
    const RescaledCurves rc = rescale_ensemble(sym, rs, 8, 0.0, 5);
    CHECK(rc.psi == doctest::Approx(1.0));
    CHECK(rc.s.front() == doctest::Approx(-1.0));
}

} // TEST_SUITE
