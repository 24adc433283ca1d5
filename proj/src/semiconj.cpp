#include "manelab/semiconj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "manelab/rng.hpp"

namespace manelab {

SemiconjugacyEvaluator::SemiconjugacyEvaluator(ManeMap g, int window)
    : g_(std::move(g)), N_(window), k_(shadowing_constants(g_.spectral())) {
    if (N_ < 2) throw ArgumentError("window must be at least 2");
    const ManeParams& P = g_.params();
    // sup |g - f_A| = coef * tau * max(u sigma(u)), plus a float allowance for
    // the anchored evaluation path and the inverse-iteration tolerance.
    eps_ = g_.coefficient() * P.tau * g_.profile().Ms + 1e-13;
    delta_ = k_.kappa * eps_;
    if (!(delta_ < k_.expansivity / 3.0))
        throw RegimeError("perturbation too large for the certified shadowing regime");
    const SpectralData& S = g_.spectral();
    double trunc = 0.0;
    for (int i = 0; i < S.d; ++i) {
        const double pnorm = S.projections[static_cast<std::size_t>(i)].jacobiSvd().singularValues()(0);
        const double lam = S.eigenvalues[static_cast<std::size_t>(i)];
        trunc += (lam < 1.0) ? eps_ * pnorm * std::pow(lam, N_) / (1.0 - lam)
                             : eps_ * pnorm * std::pow(lam, -N_) / (lam - 1.0);
    }
    defect_bound_ = trunc + 1e-11;
}

TorusPoint SemiconjugacyEvaluator::pi_point(const TorusPoint& x) const {
    std::vector<TorusPoint> pts(static_cast<std::size_t>(2 * N_ + 1));
    pts[static_cast<std::size_t>(N_)] = x;
    for (int j = N_ + 1; j <= 2 * N_; ++j)
        pts[static_cast<std::size_t>(j)] = g_.apply(pts[static_cast<std::size_t>(j - 1)]);
    for (int j = N_ - 1; j >= 0; --j)
        pts[static_cast<std::size_t>(j)] = g_.apply_inverse(pts[static_cast<std::size_t>(j + 1)]);
    PseudoOrbit po = PseudoOrbit::from_points(std::move(pts), g_.matrix());
    ShadowingResult res = shadow(po, spectral(), N_);
    if (!(res.delta_realized <= k_.kappa * po.epsilon + res.truncation_bound + 1e-12))
        throw NumericError("shadowing correction exceeded its certified bound");
    return reduce(res.anchor.coords);
}

double semiconjugacy_defect(const SemiconjugacyEvaluator& E, long long sample_count,
                            std::uint64_t seed) {
    if (sample_count < 1) throw ArgumentError("need at least one sample");
    CounterRng rng(seed, 0x5c);
    const int d = E.spectral().d;
    double worst = 0.0;
    for (long long k = 0; k < sample_count; ++k) {
        VecD v(d);
        for (int i = 0; i < d; ++i)
            v[i] = rng.uniform(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
        TorusPoint x = reduce(v);
        TorusPoint lhs = E.pi_point(E.map().apply(x));
        TorusPoint rhs = apply_linear(E.map().matrix(), E.pi_point(x));
        worst = std::max(worst, toral_distance(lhs, rhs));
    }
    return worst;
}

namespace {

TorusPoint invert_core(const SemiconjugacyEvaluator& E, const TorusPoint& target, double tol) {
    TorusPoint y = target;
    TorusPoint best = y;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        VecD r = nearest_diff(E.pi_point(y), target);
        const double res = r.norm();
        if (res < best_res) {
            best_res = res;
            best = y;
        }
        if (res <= 0.5 * tol) return y;
        y = reduce(y.coords - 0.9 * r);
    }
    // The iteration stalls where the factor map is flat along the center
    // direction; refine along that leaf.
    const VecD vc = E.map().center_vector();
    const double range = 3.0 * E.delta();
    auto residual = [&](double t) {
        return toral_distance(E.pi_point(reduce(best.coords + t * vc)), target);
    };
    double t_best = 0.0;
    double r_best = best_res;
    for (int i = -16; i <= 16; ++i) {
        double t = range * i / 16.0;
        double r = residual(t);
        if (r < r_best) {
            r_best = r;
            t_best = t;
        }
    }
    double lo = t_best - range / 16.0, hi = t_best + range / 16.0;
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (residual(m1) < residual(m2))
            hi = m2;
        else
            lo = m1;
    }
    double t = 0.5 * (lo + hi);
    if (residual(t) <= tol) return reduce(best.coords + t * vc);
    throw InversionError("inversion iteration did not reach the requested tolerance");
}

FiberEstimate scan_fiber(const SemiconjugacyEvaluator& E, const TorusPoint& target,
                         const TorusPoint& mid, double tol) {
    const VecD vc = E.map().center_vector();
    auto pred = [&](double t) {
        return toral_distance(E.pi_point(reduce(mid.coords + t * vc)), target) <= tol;
    };
    if (!pred(0.0)) throw InversionError("fiber midpoint fails its own predicate");
    const double tmax = 3.0 * E.delta();
    auto edge = [&](double direction) {
        if (pred(direction * tmax)) return tmax;
        double lo = 0.0, hi = tmax;
        while (hi - lo > 1e-12) {
            double m = 0.5 * (lo + hi);
            if (pred(direction * m))
                lo = m;
            else
                hi = m;
        }
        return lo;
    };
    const double tp = edge(+1.0);
    const double tm = edge(-1.0);
    // The preimage is an interval; spot-check there are no holes.
    for (int i = 1; i < 8; ++i) {
        double tq = tp * i / 8.0;
        if (!pred(tq))
            throw AnomalyError("fiber predicate fails inside the interval at t=" +
                               std::to_string(tq));
        tq = -tm * i / 8.0;
        if (!pred(tq))
            throw AnomalyError("fiber predicate fails inside the interval at t=" +
                               std::to_string(tq));
    }

    FiberEstimate est;
    est.base = target;
    est.midpoint = mid;
    est.lower = reduce(mid.coords - tm * vc);
    est.upper = reduce(mid.coords + tp * vc);
    est.t_minus = tm;
    est.t_plus = tp;
    est.length = tm + tp;
    est.window = E.window();
    est.tolerance = tol;
    return est;
}

} // namespace

FiberEstimate fiber_segment(const SemiconjugacyEvaluator& E, const TorusPoint& x, double tol) {
    if (!(tol >= 10.0 * E.defect_bound()))
        throw ArgumentError("tolerance must be at least 10x the defect bound");
    TorusPoint y = invert_core(E, x, tol);
    return scan_fiber(E, x, y, tol);
}

FiberReport fiber_iterate_lengths(const SemiconjugacyEvaluator& E, const FiberEstimate& F,
                                  int n_max, double cover_eps, int cover_n) {
    if (n_max < 0) throw ArgumentError("n_max must be nonnegative");
    if (cover_n < 2) throw ArgumentError("cover_n must be at least 2");
    if (!(cover_eps > 0.0)) throw ArgumentError("cover_eps must be positive");
    const ManeMap& g = E.map();
    const VecD vc = g.center_vector();
    const int M = 512;
    const int depth = std::max(n_max, cover_n);
    const bool anchored = g.apply(F.midpoint).coords == F.midpoint.coords;

    // The scan locates the fiber edge only to its tolerance.  When the base
    // is a fixed point the true edges are the adjacent center-line fixed
    // points, which repel along the leaf, so any overshoot would inflate
    // exponentially under iteration; snap the edges to machine precision.
    double t_minus = F.t_minus, t_plus = F.t_plus;
    if (anchored) {
        auto refine = [&](double dir, double t0) {
            auto s = [&](double t) {
                TorusPoint y = reduce(F.midpoint.coords + dir * t * vc);
                return dir * nearest_diff(g.apply(y), y).dot(vc);
            };
            double lo = 0.5 * t0, hi = 1.5 * t0;
            if (!(s(lo) < 0.0 && s(hi) > 0.0)) return t0; // not the expected profile
            for (int i = 0; i < 200 && lo < hi; ++i) {
                double m = 0.5 * (lo + hi);
                if (m == lo || m == hi) break;
                (s(m) < 0.0 ? lo : hi) = m;
            }
            return 0.5 * (lo + hi);
        };
        t_plus = refine(+1.0, t_plus);
        t_minus = refine(-1.0, t_minus);
    }

    // An anchored fiber lies on the invariant center line through the fixed
    // base, so each image is reprojected onto that line with the dual center
    // row of the eigenbasis.  Without the reprojection the rounding noise of
    // every step feeds the unstable direction, where it grows by the unstable
    // eigenvalue per iterate and swamps the leaf geometry near n ~ 12.
    VecD ell;
    if (anchored) {
        const SpectralData& S = g.spectral();
        int c = 0;
        for (int i = 1; i < S.d; ++i)
            if (std::abs(S.V_inv.row(i).dot(vc)) > std::abs(S.V_inv.row(c).dot(vc))) c = i;
        ell = S.V_inv.row(c).transpose() / S.V_inv.row(c).dot(vc);
    }
    auto advance = [&](const TorusPoint& x) {
        TorusPoint y = g.apply(x);
        if (!anchored) return y;
        double t = ell.dot(nearest_diff(y, F.midpoint));
        return reduce(F.midpoint.coords + t * vc);
    };

    std::vector<std::vector<TorusPoint>> orbit(static_cast<std::size_t>(depth) + 1);
    orbit[0].resize(static_cast<std::size_t>(M) + 1);
    for (int k = 0; k <= M; ++k) {
        double t = -t_minus + (t_minus + t_plus) * k / M;
        orbit[0][static_cast<std::size_t>(k)] = reduce(F.midpoint.coords + t * vc);
    }
    for (int n = 1; n <= depth; ++n) {
        orbit[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(M) + 1);
        for (int k = 0; k <= M; ++k)
            orbit[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
                advance(orbit[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k)]);
    }

    FiberReport rep;
    rep.cover_eps = cover_eps;
    for (int n = 0; n <= n_max; ++n) {
        double len = 0.0;
        for (int k = 0; k < M; ++k)
            len += toral_distance(orbit[static_cast<std::size_t>(n)][static_cast<std::size_t>(k) + 1],
                                  orbit[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]);
        rep.lengths_under_iteration.push_back(len);
        rep.bound_L = std::max(rep.bound_L, len);
    }

    auto dyn_dist = [&](int a, int bidx, int n) {
        double m = 0.0;
        for (int j = 0; j <= n; ++j)
            m = std::max(m, toral_distance(orbit[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)],
                                           orbit[static_cast<std::size_t>(j)][static_cast<std::size_t>(bidx)]));
        return m;
    };
    for (int n = 1; n <= cover_n; ++n) {
        long long count = 0;
        int k = 0;
        while (k <= M) {
            ++count;
            int anchor = k;
            ++k;
            while (k <= M && dyn_dist(anchor, k, n) <= cover_eps) ++k;
        }
        rep.cover_counts.push_back(count);
    }
    // Least-squares slope of ln(count) against n.
    double sn = 0.0, sy = 0.0, snn = 0.0, sny = 0.0;
    for (int n = 1; n <= cover_n; ++n) {
        double y = std::log(static_cast<double>(rep.cover_counts[static_cast<std::size_t>(n - 1)]));
        sn += n;
        sy += y;
        snn += static_cast<double>(n) * n;
        sny += n * y;
    }
    const double m = cover_n;
    rep.cover_slope = (m * sny - sn * sy) / (m * snn - sn * sn);
    return rep;
}

TorusPoint invert_pi(const SemiconjugacyEvaluator& E, const TorusPoint& target, double tol) {
    if (!(tol >= 10.0 * E.defect_bound()))
        throw ArgumentError("tolerance must be at least 10x the defect bound");
    TorusPoint y = invert_core(E, target, tol);
    const VecD vc = E.map().center_vector();
    const double probe = std::min(50.0 * tol, 2.9 * E.delta());
    auto pred = [&](double t) {
        return toral_distance(E.pi_point(reduce(y.coords + t * vc)), target) <= tol;
    };
    if (pred(probe) || pred(-probe)) {
        FiberEstimate est = scan_fiber(E, target, y, tol);
        if (est.length > 100.0 * tol)
            throw AmbiguityError("preimage is a center interval of length " +
                                     std::to_string(est.length),
                                 est);
    }
    return y;
}

} // namespace manelab
