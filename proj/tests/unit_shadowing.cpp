#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manelab/rng.hpp"
#include "manelab/shadowing.hpp"

#include <cmath>

using namespace manelab;

namespace {

const ToralMatrix kB = ToralMatrix::from_rows({{0, 0, 1}, {1, -6, 5}, {5, -29, 19}});

TorusPoint random_point(const CounterRng& rng, std::uint64_t i) {
    VecD v(3);
    for (int c = 0; c < 3; ++c) v[c] = rng.uniform(i, static_cast<std::uint64_t>(c));
    return TorusPoint{v};
}

// Orbit of the linear map with per-step noise of the given amplitude.
std::vector<TorusPoint> noisy_orbit(const ToralMatrix& A, TorusPoint x0, int len, double amp,
                                    const CounterRng& noise, std::uint64_t base) {
    std::vector<TorusPoint> pts{x0};
    for (int j = 1; j < len; ++j) {
        TorusPoint next = apply_linear(A, pts.back());
        VecD n(3);
        for (int c = 0; c < 3; ++c)
            n[c] = amp * (2.0 * noise.uniform(base + static_cast<std::uint64_t>(j),
                                              static_cast<std::uint64_t>(c)) -
                          1.0);
        pts.push_back(reduce(next.coords + n));
    }
    return pts;
}

} // namespace

TEST_CASE("a true orbit shadows itself exactly") {
    SpectralData S = spectral_data(kB);
    CounterRng rng(21, 0);
    TorusPoint x = random_point(rng, 0);
    std::vector<TorusPoint> pts{x};
    for (int j = 1; j < 40; ++j) pts.push_back(apply_linear(kB, pts.back()));
    PseudoOrbit po = PseudoOrbit::from_points(pts, kB);
    CHECK(po.epsilon == 0.0);
    ShadowingResult res = shadow(po, S, 17);
    CHECK(res.delta_realized == 0.0);
    CHECK(res.anchor_index == 17);
    for (std::size_t j = 0; j < pts.size(); ++j)
        CHECK(res.corrected[j].coords == pts[j].coords);
}

TEST_CASE("noisy orbits are shadowed within kappa * epsilon") {
    SpectralData S = spectral_data(kB);
    ShadowingConstants K = shadowing_constants(S);
    CHECK(K.kappa > 1.0);
    CHECK(K.kappa < 20.0);
    CHECK(K.expansivity > 0.0);
    CounterRng rng(22, 0);
    CounterRng noise(22, 1);
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        std::vector<TorusPoint> pts =
            noisy_orbit(kB, random_point(rng, trial), 61, 1e-6, noise, trial * 1000);
        PseudoOrbit po = PseudoOrbit::from_points(pts, kB);
        CHECK(po.epsilon > 0.0);
        CHECK(po.epsilon <= std::sqrt(3.0) * 1e-6 + 1e-18);
        ShadowingResult res = shadow(po, S, 30);
        CHECK(res.delta_realized <= K.kappa * po.epsilon);
        // The corrected sequence is a true orbit away from the window edges,
        // up to the reported truncation tail.
        for (int j = 25; j < 35; ++j) {
            double gap = toral_distance(apply_linear(kB, res.corrected[static_cast<std::size_t>(j)]),
                                        res.corrected[static_cast<std::size_t>(j) + 1]);
            CHECK(gap <= 10.0 * res.truncation_bound + 1e-12);
        }
    }
}

TEST_CASE("the shadow is unique: anchors and window length do not matter") {
    SpectralData S = spectral_data(kB);
    CounterRng rng(23, 0);
    CounterRng noise(23, 1);
    std::vector<TorusPoint> pts = noisy_orbit(kB, random_point(rng, 0), 121, 1e-6, noise, 0);
    PseudoOrbit po = PseudoOrbit::from_points(pts, kB);
    ShadowingResult a = shadow(po, S, 40);
    ShadowingResult b = shadow(po, S, 80);
    for (int j = 55; j <= 65; ++j)
        CHECK(toral_distance(a.corrected[static_cast<std::size_t>(j)],
                             b.corrected[static_cast<std::size_t>(j)]) < 1e-10);

    // Doubling the window moves the interior shadow by at most the tail mass.
    std::vector<TorusPoint> head(pts.begin() + 30, pts.begin() + 91);
    PseudoOrbit po_short = PseudoOrbit::from_points(head, kB);
    ShadowingResult c = shadow(po_short, S, 30);
    CHECK(toral_distance(c.corrected[30], a.corrected[60]) <
          10.0 * (c.truncation_bound + a.truncation_bound) + 1e-12);
}

TEST_CASE("pseudo-orbit bookkeeping stores shortest closure errors") {
    CounterRng rng(24, 0);
    std::vector<TorusPoint> pts{random_point(rng, 0)};
    for (int j = 1; j < 10; ++j) pts.push_back(random_point(rng, static_cast<std::uint64_t>(j)));
    PseudoOrbit po = PseudoOrbit::from_points(pts, kB);
    REQUIRE(po.errors.size() == pts.size() - 1);
    double emax = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        VecD want = nearest_diff(pts[j + 1], apply_linear(kB, pts[j]));
        CHECK((po.errors[j] - want).norm() == 0.0);
        emax = std::max(emax, want.norm());
    }
    CHECK(po.epsilon == emax);
}
