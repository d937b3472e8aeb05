#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"

#include "gle/exact.hpp"
#include "gle/samplers.hpp"
#include "test_util.hpp"

using namespace gle;
using testutil::key_of;

namespace {

double tv_against_uniform(const std::map<std::vector<Level>, long>& counts, long n_states,
                          long n_draws) {
    double tv = 0.0;
    const double u = 1.0 / static_cast<double>(n_states);
    long seen = 0;
    for (const auto& [key, c] : counts) {
        tv += std::abs(static_cast<double>(c) / n_draws - u);
        seen += c;
    }
    // states never drawn contribute u each
    tv += u * static_cast<double>(n_states - static_cast<long>(counts.size()));
    REQUIRE(seen == n_draws);
    return 0.5 * tv;
}

EnsembleSpec thirds_spec() { return make_spec(0, 2, {0, 0}, {1, 1}); }

} // namespace

TEST_SUITE("samplers") {

TEST_CASE("bridge hits its endpoints and keeps the step rule") {
    RngHandle rng(1, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const Time t0 = -2, t1 = 5;
        const Level z0 = 1, z1 = 1 + static_cast<Level>(rng.below(8));
        const UpRightPath p = sample_bridge(rng, t0, t1, z0, z1);
        REQUIRE(p.t0 == t0);
        REQUIRE(p.t1() == t1);
        REQUIRE(p.at(t0) == z0);
        REQUIRE(p.at(t1) == z1);
        for (Time t = t0; t < t1; ++t) {
            const Level d = p.at(t + 1) - p.at(t);
            REQUIRE(d >= 0);
            REQUIRE(d <= 1);
        }
    }
    CHECK_THROWS_AS(sample_bridge(rng, 0, 3, 0, 5), infeasible_boundary);
    CHECK_THROWS_AS(sample_bridge(rng, 0, 3, 2, 1), infeasible_boundary);
}

TEST_CASE("bridge is uniform over the 6 paths from (0,0) to (4,2)") {
    RngHandle rng(2, 0);
    std::map<std::vector<Level>, long> counts;
    const long n = 30000;
    for (long i = 0; i < n; ++i) ++counts[sample_bridge(rng, 0, 4, 0, 2).values];
    REQUIRE(counts.size() == 6);
    CHECK(tv_against_uniform(counts, 6, n) < 0.03);
}

TEST_CASE("rejection sampling on the two-line two-step instance") {
    const EnsembleSpec spec = thirds_spec();
    RngHandle rng(3, 0);
    std::map<std::vector<Level>, long> counts;
    long long total_tries = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i) {
        RejectionResult r = rejection_sample(rng, spec);
        REQUIRE(is_admissible(r.ensemble, spec));
        total_tries += r.tries;
        ++counts[key_of(r.ensemble)];
    }
    REQUIRE(counts.size() == 3);
    CHECK(tv_against_uniform(counts, 3, n) < 0.03);

    // tries is geometric with success rate 3/4: mean 4/3, sd 2/3,
    // so 3 standard errors at n = 2e4 is 0.0142.
    const double mean = static_cast<double>(total_tries) / n;
    CHECK(std::abs(mean - 4.0 / 3.0) < 0.015);
}

TEST_CASE("rejection respects max_tries") {
    const EnsembleSpec spec = thirds_spec();
    RngHandle rng(4, 0);
    CHECK_THROWS_AS(rejection_sample(rng, spec, 0), max_tries_exceeded);

    const EnsembleSpec bad = make_spec(0, 2, {3, 0}, {2, 1});
    RngHandle rng2(4, 1);
    CHECK_THROWS_AS(rejection_sample(rng2, bad, 10), infeasible_boundary);
}

TEST_CASE("sequential sampler matches enumeration on random instances") {
    std::mt19937_64 g(20240801);
    testutil::SpecOptions opt;
    opt.k_max = 2;
    opt.T_max = 5;
    for (int inst = 0; inst < 10; ++inst) {
        const EnsembleSpec spec = testutil::rand_feasible_spec(g, opt);
        std::map<std::vector<Level>, long> state_ix;
        long n_states = 0;
        for_each_admissible(spec, [&](const BernoulliLineEnsemble& e) {
            state_ix[key_of(e)] = n_states++;
        });
        REQUIRE(n_states > 0);

        const long n = 200 * n_states;
        RngHandle rng(500 + inst, 0);
        std::map<std::vector<Level>, long> counts;
        for (long i = 0; i < n; ++i) {
            const BernoulliLineEnsemble e = sequential_exact_sample(rng, spec);
            REQUIRE(is_admissible(e, spec));
            const auto key = key_of(e);
            REQUIRE(state_ix.count(key) == 1);
            ++counts[key];
        }
        CHECK(tv_against_uniform(counts, n_states, n) < 0.08);
    }
}

TEST_CASE("sequential sampler rejects barriers and partial ordering sets") {
    const auto top = Barrier::path(make_path(0, {2, 2, 2}));
    const EnsembleSpec with_top = make_spec(0, 2, {0}, {1}, top, Barrier::minus_infinity());
    RngHandle rng(6, 0);
    CHECK_THROWS_AS(sequential_exact_sample(rng, with_top), std::invalid_argument);

    const EnsembleSpec partial = make_spec(0, 2, {0, 0}, {1, 1}, Barrier::plus_infinity(),
                                           Barrier::minus_infinity(), std::vector<Time>{0, 2});
    CHECK_THROWS_AS(sequential_exact_sample(rng, partial), std::invalid_argument);
}

TEST_CASE("forced instance needs exactly one try and one state") {
    const EnsembleSpec spec = make_spec(0, 3, {0}, {0});
    RngHandle rng(7, 0);
    const RejectionResult r = rejection_sample(rng, spec);
    CHECK(r.tries == 1);
    CHECK(r.ensemble.paths[0].values == std::vector<Level>{0, 0, 0, 0});
    const BernoulliLineEnsemble e = sequential_exact_sample(rng, spec);
    CHECK(key_of(e) == key_of(r.ensemble));
    CHECK(key_of(maximal_ensemble(spec)) == key_of(e));
}

TEST_CASE("glauber window and burn-in") {
    const EnsembleSpec spec = thirds_spec();
    const LevelWindow w = glauber_window(spec);
    CHECK(w.lo == 0);
    CHECK(w.hi == 0);
    CHECK(w.width() == 1);
    CHECK(default_burnin(spec) == 10 * 2 * 2 * 1);

    const auto g = Barrier::path(make_path(0, {-2, -1, -1}));
    const EnsembleSpec with_bottom =
        make_spec(0, 2, {0, 0}, {1, 1}, Barrier::plus_infinity(), g);
    const LevelWindow w2 = glauber_window(with_bottom);
    CHECK(w2.lo == -2);
    CHECK(w2.hi == 0);
}

TEST_CASE("glauber_step applies the single-site rule") {
    const EnsembleSpec one = make_spec(0, 2, {0}, {1});
    BernoulliLineEnsemble low;
    low.paths = {make_path(0, {0, 0, 1})};
    BernoulliLineEnsemble high;
    high.paths = {make_path(0, {0, 1, 1})};

    CHECK(key_of(glauber_step(low, one, {1, 1, 0, true})) == key_of(high));
    CHECK(key_of(glauber_step(low, one, {1, 1, 0, false})) == key_of(low));
    CHECK(key_of(glauber_step(high, one, {1, 1, 0, false})) == key_of(low));
    // wrong level: neighbours do not match z, z+1
    CHECK(key_of(glauber_step(low, one, {1, 1, 1, true})) == key_of(low));
    // endpoints never move
    CHECK(key_of(glauber_step(low, one, {1, 0, 0, true})) == key_of(low));
    CHECK(key_of(glauber_step(low, one, {1, 2, 0, false})) == key_of(low));

    CHECK_THROWS_AS(glauber_step(low, one, {2, 1, 0, true}), std::invalid_argument);
    BernoulliLineEnsemble wrong;
    wrong.paths = {make_path(0, {0, 0, 0})};
    CHECK_THROWS_AS(glauber_step(wrong, one, {1, 1, 0, true}), inadmissible_state);
}

TEST_CASE("updates that would cross a neighbouring line are suppressed") {
    const EnsembleSpec spec = thirds_spec();
    BernoulliLineEnsemble both_flat;
    both_flat.paths = {make_path(0, {0, 0, 1}), make_path(0, {0, 0, 1})};
    BernoulliLineEnsemble both_up;
    both_up.paths = {make_path(0, {0, 1, 1}), make_path(0, {0, 1, 1})};

    // raising the lower line above the upper one
    CHECK(key_of(glauber_step(both_flat, spec, {2, 1, 0, true})) == key_of(both_flat));
    // dropping the upper line below the lower one
    CHECK(key_of(glauber_step(both_up, spec, {1, 1, 0, false})) == key_of(both_up));
    // the same moves on the other line go through
    CHECK(key_of(glauber_step(both_flat, spec, {1, 1, 0, true})) !=
          key_of(both_flat));
    CHECK(key_of(glauber_step(both_up, spec, {2, 1, 0, false})) != key_of(both_up));
}

TEST_CASE("barriers suppress moves on the ordering set") {
    const auto f = Barrier::path(make_path(0, {0, 0, 1}));
    const EnsembleSpec capped = make_spec(0, 2, {0}, {1}, f, Barrier::minus_infinity());
    BernoulliLineEnsemble flat;
    flat.paths = {make_path(0, {0, 0, 1})};
    CHECK(key_of(glauber_step(flat, capped, {1, 1, 0, true})) == key_of(flat));

    const auto g = Barrier::path(make_path(0, {0, 1, 1}));
    const EnsembleSpec floored = make_spec(0, 2, {0}, {1}, Barrier::plus_infinity(), g);
    BernoulliLineEnsemble up;
    up.paths = {make_path(0, {0, 1, 1})};
    CHECK(key_of(glauber_step(up, floored, {1, 1, 0, false})) == key_of(up));
}

TEST_CASE("off the ordering set the lines may cross") {
    const EnsembleSpec spec = make_spec(0, 2, {0, 0}, {1, 1}, Barrier::plus_infinity(),
                                        Barrier::minus_infinity(), std::vector<Time>{0, 2});
    BernoulliLineEnsemble both_flat;
    both_flat.paths = {make_path(0, {0, 0, 1}), make_path(0, {0, 0, 1})};
    const BernoulliLineEnsemble stepped = glauber_step(both_flat, spec, {2, 1, 0, true});
    CHECK(stepped.paths[1].at(1) == 1);
    CHECK(stepped.paths[0].at(1) == 0);
    CHECK(is_admissible(stepped, spec));
}

TEST_CASE("glauber_run is deterministic in the seed") {
    const EnsembleSpec spec = make_spec(0, 4, {2, 0}, {4, 2});
    RngHandle a(11, 0), b(11, 0), c(12, 0);
    const auto ra = glauber_run(a, spec, 5000);
    const auto rb = glauber_run(b, spec, 5000);
    CHECK(key_of(ra) == key_of(rb));
    REQUIRE(is_admissible(ra, spec));
    const auto rc = glauber_run(c, spec, 5000);
    REQUIRE(is_admissible(rc, spec));

    CHECK(key_of(glauber_run(a, spec, 0)) == key_of(maximal_ensemble(spec)));
}

TEST_CASE("glauber equilibrates on the two-line two-step instance") {
    const EnsembleSpec spec = thirds_spec();
    RngHandle rng(13, 0);
    std::map<std::vector<Level>, long> counts;
    const long long n_obs = 30000;
    glauber_sample_states(rng, spec, default_burnin(spec), n_obs, 4,
                          [&](const BernoulliLineEnsemble& e) { ++counts[key_of(e)]; });
    CHECK(tv_against_uniform(counts, 3, n_obs) < 0.05);
}

TEST_CASE("coupling two copies of one spec keeps them identical") {
    const EnsembleSpec spec = make_spec(0, 4, {2, 0}, {4, 2});
    RngHandle rng(14, 0);
    long long mismatches = 0;
    const CoupledResult res = coupled_glauber_run(
        rng, spec, spec, 20000,
        [&](long long, const BernoulliLineEnsemble& lo, const BernoulliLineEnsemble& hi) {
            if (key_of(lo) != key_of(hi)) ++mismatches;
        },
        100);
    CHECK(res.ordering_violations == 0);
    CHECK(mismatches == 0);
    CHECK(key_of(res.low) == key_of(res.high));
}

TEST_CASE("monotone coupling preserves the pointwise order") {
    std::mt19937_64 g(77);
    testutil::SpecOptions opt;
    opt.k_max = 3;
    opt.T_max = 6;
    for (int rep = 0; rep < 5; ++rep) {
        const EnsembleSpec low = testutil::rand_feasible_spec(g, opt);
        EnsembleSpec high = low;
        const Level shift = static_cast<Level>(testutil::pick(g, 0, 2));
        for (auto& v : high.x) v += shift;
        for (auto& v : high.y) v += shift;
        RngHandle rng(600 + rep, 0);
        const CoupledResult res = coupled_glauber_run(rng, low, high, 20000);
        CHECK(res.ordering_violations == 0);
        REQUIRE(is_admissible(res.low, low));
        REQUIRE(is_admissible(res.high, high));
        for (int i = 0; i < low.k; ++i)
            for (Time t = low.T0; t <= low.T1; ++t)
                REQUIRE(res.low.paths[static_cast<size_t>(i)].at(t) <=
                        res.high.paths[static_cast<size_t>(i)].at(t));
    }
}

TEST_CASE("coupling rejects mismatched or unordered specs") {
    const EnsembleSpec a = make_spec(0, 2, {0}, {1});
    const EnsembleSpec b = make_spec(0, 3, {0}, {1});
    const EnsembleSpec c = make_spec(0, 2, {0, 0}, {1, 1});
    RngHandle rng(15, 0);
    CHECK_THROWS_AS(coupled_glauber_run(rng, a, b, 10), incompatible_specs);
    CHECK_THROWS_AS(coupled_glauber_run(rng, a, c, 10), incompatible_specs);

    const EnsembleSpec hi = make_spec(0, 2, {2}, {3});
    CHECK_THROWS_AS(coupled_glauber_run(rng, hi, a, 10), incompatible_specs);

    const auto f_low = Barrier::path(make_path(0, {3, 3, 3}));
    const auto f_high = Barrier::path(make_path(0, {2, 2, 2}));
    const EnsembleSpec la = make_spec(0, 2, {0}, {1}, f_low, Barrier::minus_infinity());
    const EnsembleSpec lb = make_spec(0, 2, {0}, {1}, f_high, Barrier::minus_infinity());
    CHECK_THROWS_AS(coupled_glauber_run(rng, la, lb, 10), incompatible_specs);
}

} // TEST_SUITE
