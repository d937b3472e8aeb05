#include <doctest.h>

#include "gle/ensemble.hpp"
#include "gle/exact.hpp"
#include "test_util.hpp"

using namespace gle;

TEST_SUITE_BEGIN("ensemble");

TEST_CASE("make_path accepts unit staircases and rejects bad steps") {
    auto p = make_path(-1, {0, 0, 1, 2, 2});
    CHECK(p.t0 == -1);
    CHECK(p.t1() == 3);
    CHECK(p.at(-1) == 0);
    CHECK(p.at(3) == 2);
    CHECK_THROWS_AS(make_path(0, {0, 2}), step_violation);
    CHECK_THROWS_AS(make_path(0, {0, 1, 0}), step_violation);
    CHECK_THROWS_AS(make_path(0, {}), step_violation);
}

TEST_CASE("spec construction validates shape") {
    CHECK_THROWS_AS(make_spec(0, 2, {0, 1}, {1, 1}), std::invalid_argument); // x increasing
    CHECK_THROWS_AS(make_spec(0, 2, {1, 0}, {1}), dimension_mismatch);
    CHECK_THROWS_AS(make_spec(0, 2, {0}, {1}, Barrier::plus_infinity(),
                              Barrier::minus_infinity(), {0, 3}),
                    std::invalid_argument); // S leaves window
    CHECK_THROWS_AS(make_spec(0, 2, {0}, {1}, Barrier::path(make_path(0, {1, 1})),
                              Barrier::minus_infinity()),
                    dimension_mismatch); // barrier too short
}

TEST_CASE("admissibility on a two-line window") {
    auto spec = make_spec(0, 2, {1, 0}, {2, 1});
    BernoulliLineEnsemble ens;
    ens.paths = {make_path(0, {1, 2, 2}), make_path(0, {0, 1, 1})};
    CHECK(is_admissible(ens, spec));

    // touching is allowed
    ens.paths = {make_path(0, {1, 1, 2}), make_path(0, {0, 1, 1})};
    CHECK(is_admissible(ens, spec));

    // wrong exit level
    ens.paths = {make_path(0, {1, 2, 2}), make_path(0, {0, 0, 0})};
    CHECK_FALSE(is_admissible(ens, spec));

    BernoulliLineEnsemble wrong;
    wrong.paths = {make_path(0, {1, 2, 2})};
    CHECK_THROWS_AS(is_admissible(wrong, spec), dimension_mismatch);
}

TEST_CASE("ordering is only enforced on S") {
    auto crossing = BernoulliLineEnsemble{};
    crossing.paths = {make_path(0, {0, 0, 1}), make_path(0, {0, 1, 1})};

    auto full = make_spec(0, 2, {0, 0}, {1, 1});
    CHECK_FALSE(is_admissible(crossing, full));

    auto ends_only = make_spec(0, 2, {0, 0}, {1, 1}, Barrier::plus_infinity(),
                               Barrier::minus_infinity(), std::vector<Time>{0, 2});
    CHECK(is_admissible(crossing, ends_only));
}

TEST_CASE("barriers constrain the extreme lines") {
    auto top = Barrier::path(make_path(0, {0, 0, 1}));
    auto spec = make_spec(0, 2, {0}, {1}, top, Barrier::minus_infinity());
    BernoulliLineEnsemble low, high;
    low.paths = {make_path(0, {0, 0, 1})};
    high.paths = {make_path(0, {0, 1, 1})};
    CHECK(is_admissible(low, spec));
    CHECK_FALSE(is_admissible(high, spec));
}

TEST_CASE("boundary_feasible reports the failed condition") {
    CHECK(boundary_feasible(make_spec(0, 2, {1, 0}, {2, 1})).ok());

    auto far = make_spec(0, 2, {0}, {3});
    auto r1 = boundary_feasible(far);
    CHECK_FALSE(r1.ok());
    CHECK_FALSE(r1.endpoints_ok);
    CHECK(r1.boundary_ok);

    // top barrier starts below the entry level
    auto r2 = boundary_feasible(make_spec(0, 2, {1}, {1},
                                          Barrier::path(make_path(0, {0, 1, 1})),
                                          Barrier::minus_infinity()));
    CHECK_FALSE(r2.ok());
    CHECK(r2.endpoints_ok);
    CHECK_FALSE(r2.boundary_ok);

    // top dips under bottom in the middle
    auto r3 = boundary_feasible(make_spec(0, 2, {0}, {1},
                                          Barrier::path(make_path(0, {0, 0, 1})),
                                          Barrier::path(make_path(0, {-1, 0, 1}))));
    CHECK(r3.endpoints_ok);
    CHECK(r3.boundary_ok); // endpoints fine and top(1)=0 >= bottom(1)=0
    auto r4 = boundary_feasible(make_spec(0, 2, {0}, {1},
                                          Barrier::path(make_path(0, {0, 0, 1})),
                                          Barrier::path(make_path(0, {0, 1, 1}))));
    CHECK_FALSE(r4.boundary_ok);
}

TEST_CASE("maximal ensemble climbs as early as possible") {
    auto spec = make_spec(0, 2, {1, 0}, {2, 1});
    auto ens = maximal_ensemble(spec);
    CHECK(ens.paths[0].values == std::vector<Level>{1, 2, 2});
    CHECK(ens.paths[1].values == std::vector<Level>{0, 1, 1});

    auto one = maximal_ensemble(make_spec(0, 4, {0}, {2}));
    CHECK(one.paths[0].values == std::vector<Level>{0, 1, 2, 2, 2});

    // a top barrier delays the climb
    auto capped = maximal_ensemble(make_spec(0, 3, {0}, {1},
                                             Barrier::path(make_path(0, {0, 0, 1, 2})),
                                             Barrier::minus_infinity()));
    CHECK(capped.paths[0].values == std::vector<Level>{0, 0, 1, 1});

    CHECK_THROWS_AS(maximal_ensemble(make_spec(0, 1, {0}, {3})), infeasible_boundary);
}

TEST_CASE("maximal ensemble is admissible and dominates every admissible tuple") {
    std::mt19937_64 g(20240811);
    testutil::SpecOptions opt;
    opt.allow_barriers = true;
    for (int rep = 0; rep < 200; ++rep) {
        auto spec = testutil::rand_feasible_spec(g, opt);
        auto top = maximal_ensemble(spec);
        CHECK(is_admissible(top, spec));
        for_each_admissible(spec, [&](const BernoulliLineEnsemble& ens) {
            for (int i = 0; i < spec.k; ++i)
                for (Time t = spec.T0; t <= spec.T1; ++t) {
                    REQUIRE(top.paths[static_cast<size_t>(i)].at(t) >=
                            ens.paths[static_cast<size_t>(i)].at(t));
                }
        });
    }
}

TEST_CASE("maximal ensemble stays admissible when S is partial") {
    std::mt19937_64 g(7);
    testutil::SpecOptions opt;
    opt.allow_partial_S = true;
    for (int rep = 0; rep < 50; ++rep) {
        auto spec = testutil::rand_feasible_spec(g, opt);
        CHECK(is_admissible(maximal_ensemble(spec), spec));
    }
}

TEST_SUITE_END();
