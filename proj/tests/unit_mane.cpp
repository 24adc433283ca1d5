#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manelab/errors.hpp"
#include "manelab/mane.hpp"
#include "manelab/rng.hpp"

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

ManeMap canonical_map() {
    SpectralData S = eigendata();
    return build_mane_map(kB, S, default_params(S, q_point()));
}

TorusPoint random_point(const CounterRng& rng, std::uint64_t i) {
    VecD v(3);
    for (int c = 0; c < 3; ++c) v[c] = rng.uniform(i, static_cast<std::uint64_t>(c));
    return TorusPoint{v};
}

} // namespace

TEST_CASE("cutoff profile is a C1 bump") {
    CutoffProfile prof;
    CHECK(prof.sigma(0.0) == 1.0);
    CHECK(prof.sigma(1.0) == 0.0);
    CHECK(prof.sigma(1.5) == 0.0);
    CHECK(prof.dsigma(0.0) == 0.0);
    CHECK(prof.dsigma(1.0) == 0.0);
    double prev = 1.0;
    for (int i = 1; i <= 100; ++i) {
        double u = i / 100.0;
        double s = prof.sigma(u);
        CHECK(s <= prev + 1e-15); // monotone down
        prev = s;
        double fd = (prof.sigma(u + 1e-6) - prof.sigma(u - 1e-6)) / 2e-6;
        CHECK(prof.dsigma(u) == doctest::Approx(fd).epsilon(1e-6));
    }
    // Reported extremes bound a fine grid scan.
    double m1 = 0.0, ms = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double u = i / 1000.0;
        m1 = std::max(m1, std::abs(u * prof.dsigma(u)));
        ms = std::max(ms, u * prof.sigma(u));
    }
    CHECK(prof.M1 >= m1 - 1e-9);
    CHECK(prof.M1 <= m1 + 0.05);
    CHECK(prof.Ms >= ms - 1e-9);
    CHECK(prof.Ms <= ms + 0.05);
}

TEST_CASE("q is fixed to the last bit and the far field is untouched") {
    ManeMap g = canonical_map();
    TorusPoint q = q_point();
    CHECK(g.apply(q).coords == q.coords);
    CounterRng rng(3, 0);
    int far_checked = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        TorusPoint x = random_point(rng, i);
        if (toral_distance(x, q) < g.params().rho) continue;
        ++far_checked;
        CHECK(g.apply(x).coords == apply_linear(kB, x).coords); // bitwise equal
        CHECK_FALSE(g.in_support(x));
    }
    CHECK(far_checked > 150);
    CHECK(g.center_stretch(q) == 0.5);
    CHECK(g.coefficient() == doctest::Approx(g.spectral().lambda_c() - 0.5));
}

TEST_CASE("derivative matches central differences") {
    ManeMap g = canonical_map();
    TorusPoint q = q_point();
    const VecD vc = g.center_vector();
    // Third derivatives of the profile are ~1e11 at this support scale, so
    // the step must balance truncation (h^2) against cancellation (eps/h).
    const double h = 4e-9;
    std::vector<TorusPoint> where = {
        reduce(q.coords + 0.3 * g.params().tau * vc),
        reduce(q.coords + 0.9 * g.params().tau * vc),
        reduce(q.coords + VecD::Constant(3, 0.2)),
    };
    for (const TorusPoint& x : where) {
        auto [img, J] = g.apply_with_derivative(x);
        CHECK(toral_distance(img, g.apply(x)) <= 1e-15);
        for (int j = 0; j < 3; ++j) {
            VecD e = VecD::Zero(3);
            e[j] = h;
            VecD fd = nearest_diff(g.apply(reduce(x.coords + e)), g.apply(reduce(x.coords - e))) /
                      (2.0 * h);
            CHECK((J.col(j) - fd).norm() < 2e-5 * std::max(1.0, J.col(j).norm()));
        }
    }
}

TEST_CASE("inverse round-trips, including across the support boundary") {
    ManeMap g = canonical_map();
    TorusPoint q = q_point();
    const VecD vc = g.center_vector();
    CounterRng rng(9, 2);
    for (std::uint64_t i = 0; i < 50; ++i) {
        TorusPoint x = random_point(rng, i);
        CHECK(toral_distance(g.apply_inverse(g.apply(x)), x) < 1e-10);
    }
    // The center line through q crosses the steep cutoff transition where a
    // plain Newton iteration used to two-cycle.
    for (int k = -10; k <= 10; ++k) {
        TorusPoint x = reduce(q.coords + 0.21 * g.params().tau * k * vc);
        CHECK(toral_distance(g.apply_inverse(g.apply(x)), x) < 1e-10);
    }
    CHECK(g.apply_inverse(q).coords == q.coords);
}

TEST_CASE("pitchfork on the center line: one attractor between two repellers") {
    ManeMap g = canonical_map();
    TorusPoint q = q_point();
    std::vector<TorusPoint> fps = center_profile_fixed_points(g);
    REQUIRE(fps.size() == 3);
    CHECK(toral_distance(fps[1], q) == 0.0);
    CHECK(g.center_stretch(fps[1]) == 0.5);
    const VecD vc = g.center_vector();
    double t_plus = nearest_diff(fps[2], q).dot(vc);
    double t_minus = nearest_diff(fps[0], q).dot(vc);
    CHECK(t_plus > 0.0);
    CHECK(t_minus < 0.0);
    CHECK(t_plus == doctest::Approx(-t_minus).epsilon(1e-9));
    for (int i : {0, 2}) {
        CHECK(g.center_stretch(fps[static_cast<std::size_t>(i)]) > 1.0);
        CHECK(toral_distance(g.apply(fps[static_cast<std::size_t>(i)]),
                             fps[static_cast<std::size_t>(i)]) < 1e-13);
    }

    // Independent 1-d oracle: bisect the center displacement profile.
    auto disp = [&](double t) {
        TorusPoint y = reduce(q.coords + t * vc);
        return nearest_diff(g.apply(y), y).dot(vc);
    };
    double lo = 1e-7, hi = g.params().tau;
    REQUIRE(disp(lo) < 0.0);
    REQUIRE(disp(hi) > 0.0);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (disp(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(t_plus == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("ball measure and the center inequality at canonical parameters") {
    SpectralData S = eigendata();
    ManeParams params = default_params(S, q_point());
    MeasureStats st = ball_measure_and_inequality(S, params, 3.0 * params.rho);
    CHECK(st.m == doctest::Approx(4.0 * M_PI / 3.0 * std::pow(0.15, 3)).epsilon(1e-14));
    CHECK(st.inequality_value ==
          doctest::Approx(std::pow(S.lambda_c(), 1.0 - st.m) * std::pow(0.5, 2.0 * st.m))
              .epsilon(1e-14));
    CHECK(st.inequality_value > 1.0);
    // slack_sigma is the largest sigma keeping the exponent positive:
    // (1 - m - sigma) ln(lambda_c) + (2m + sigma) ln(b) = 0 at sigma = slack.
    double at_slack = (1.0 - st.m - st.slack_sigma) * std::log(S.lambda_c()) +
                      (2.0 * st.m + st.slack_sigma) * std::log(0.5);
    CHECK(at_slack == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(ball_volume(3, 0.6), GeometryError);
}

TEST_CASE("construction refuses parameters that break the inequality") {
    SpectralData S = eigendata();
    ManeParams bad = default_params(S, q_point(), 0.15, 0.05);
    MeasureStats st = ball_measure_and_inequality(S, bad, 3.0 * bad.rho);
    CHECK(st.inequality_value < 1.0);
    try {
        build_mane_map(kB, S, bad);
        FAIL("expected InequalityError");
    } catch (const InequalityError& e) {
        CHECK(e.value < 1.0);
    }
}

TEST_CASE("support bound and jitter keep the construction valid") {
    SpectralData S = eigendata();
    ManeParams params = default_params(S, q_point());
    CHECK(params.tau <= support_max_tau(S, params.rho));
    ManeParams moved = jitter_params(params, 123);
    moved.gamma = 0.02;
    ManeMap g2 = build_mane_map(kB, S, jitter_params(moved, 5));
    CHECK(g2.apply(q_point()).coords == q_point().coords);
}
