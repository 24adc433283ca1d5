#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manelab/rng.hpp"
#include "manelab/semiconj.hpp"

#include <cmath>

using namespace manelab;

namespace {

const ToralMatrix kB = ToralMatrix::from_rows({{0, 0, 1}, {1, -6, 5}, {5, -29, 19}});

SpectralData eigendata() { return spectral_data(kB); }

TorusPoint q_point() {
    VecD v(3);
    v << 1.0 / 13.0, 12.0 / 13.0, 1.0 / 13.0;
    return TorusPoint{v};
}

SemiconjugacyEvaluator canonical_evaluator(int window = 60) {
    SpectralData S = eigendata();
    return SemiconjugacyEvaluator(build_mane_map(kB, S, default_params(S, q_point())), window);
}

TorusPoint random_point(const CounterRng& rng, std::uint64_t i) {
    VecD v(3);
    for (int c = 0; c < 3; ++c) v[c] = rng.uniform(i, static_cast<std::uint64_t>(c));
    return TorusPoint{v};
}

} // namespace

TEST_CASE("factor map is the identity when the deformation is switched off") {
    SpectralData S = eigendata();
    // b = lambda_c zeroes the shear coefficient; g falls back to the linear map.
    ManeMap trivial = build_mane_map(kB, S, default_params(S, q_point(), 0.05, S.lambda_c()));
    SemiconjugacyEvaluator E(trivial, 60);
    CounterRng rng(31, 0);
    for (std::uint64_t i = 0; i < 60; ++i) {
        TorusPoint x = random_point(rng, i);
        CHECK(toral_distance(E.pi_point(x), x) < 1e-12);
    }
}

TEST_CASE("semiconjugacy defect and displacement bound") {
    SemiconjugacyEvaluator E = canonical_evaluator();
    CHECK(E.eps_chain() > 0.0);
    CHECK(E.delta() == E.constants().kappa * E.eps_chain());
    CHECK(E.delta() < 0.5 * E.constants().expansivity); // uniqueness regime
    double defect = semiconjugacy_defect(E, 200, 77);
    CHECK(defect < 1e-8);
    CHECK(defect <= E.defect_bound());
    CounterRng rng(32, 0);
    for (std::uint64_t i = 0; i < 30; ++i) {
        TorusPoint x = random_point(rng, i);
        CHECK(toral_distance(E.pi_point(x), x) <= E.delta());
    }
}

TEST_CASE("window too small for the certified regime is rejected") {
    SpectralData S = eigendata();
    ManeMap g = build_mane_map(kB, S, default_params(S, q_point()));
    CHECK_THROWS_AS(SemiconjugacyEvaluator(g, 1), Error);
}

TEST_CASE("fiber over q matches the pitchfork width") {
    SemiconjugacyEvaluator E = canonical_evaluator();
    const ManeMap& g = E.map();
    TorusPoint q = q_point();
    FiberEstimate F = fiber_segment(E, q, 1e-5);
    // 1-d oracle: the fiber edges are the outer center-line fixed points.
    const VecD vc = g.center_vector();
    auto disp = [&](double t) {
        TorusPoint y = reduce(q.coords + t * vc);
        return nearest_diff(g.apply(y), y).dot(vc);
    };
    double lo = 1e-7, hi = g.params().tau;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (disp(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t_star = 0.5 * (lo + hi);
    CHECK(F.length == doctest::Approx(2.0 * t_star).epsilon(1e-3));
    CHECK(std::abs(F.length - 2.0 * t_star) < 1e-6);
    CHECK(F.t_plus == doctest::Approx(t_star).epsilon(1e-3));

    FiberReport rep = fiber_iterate_lengths(E, F, 8);
    REQUIRE(rep.lengths_under_iteration.size() == 9);
    for (double len : rep.lengths_under_iteration)
        CHECK(std::abs(len - rep.lengths_under_iteration[0]) < 1e-9);
    CHECK(rep.cover_slope < 0.02);
    CHECK(rep.cover_counts.front() >= 1);
}

TEST_CASE("fibers away from the support collapse to the tolerance floor") {
    SemiconjugacyEvaluator E = canonical_evaluator();
    CounterRng rng(33, 0);
    int used = 0;
    for (std::uint64_t i = 0; i < 200 && used < 10; ++i) {
        TorusPoint x = random_point(rng, i);
        if (toral_distance(x, q_point()) < 3.0 * E.map().params().rho) continue;
        ++used;
        FiberEstimate F = fiber_segment(E, x, 1e-5);
        CHECK(F.length <= 2.5e-5); // bisection resolves the edge to ~tol
    }
    CHECK(used == 10);
}

TEST_CASE("inverting the factor map") {
    SemiconjugacyEvaluator E = canonical_evaluator();
    CounterRng rng(34, 0);
    for (std::uint64_t i = 0; i < 10; ++i) {
        TorusPoint target = random_point(rng, i);
        if (toral_distance(target, q_point()) < 3.0 * E.map().params().rho) continue;
        TorusPoint y = invert_pi(E, target, 1e-6);
        CHECK(toral_distance(E.pi_point(y), target) <= 1e-6);
    }
    // Over q the preimage is the whole pitchfork interval; that must be
    // reported as ambiguous, carrying the fiber.
    try {
        invert_pi(E, q_point(), 1e-6);
        FAIL("expected AmbiguityError");
    } catch (const AmbiguityError& e) {
        CHECK(e.fiber().length > 1e-3);
    }
    CHECK_THROWS_AS(fiber_segment(E, q_point(), 1e-30), ArgumentError);
}
