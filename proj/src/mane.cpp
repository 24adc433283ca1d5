#include "manelab/mane.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "manelab/rng.hpp"

namespace manelab {

namespace {

double quintic(double w) { return ((6.0 * w - 15.0) * w + 10.0) * w * w * w; }
double dquintic(double w) {
    double a = w * (1.0 - w);
    return 30.0 * a * a;
}

double center_shape(const CutoffProfile& pr, double t, double tau) {
    return t * pr.sigma(std::abs(t) / tau);
}

double center_shape_deriv(const CutoffProfile& pr, double t, double tau) {
    double u = std::abs(t) / tau;
    return pr.sigma(u) + u * pr.dsigma(u);
}

} // namespace

CutoffProfile::CutoffProfile() {
    // |u sigma'(u)| = 30 (w+1) w^2 (1-w)^2 with w = 2u-1; stationary at
    // 5w^2 + w - 2 = 0.
    const double w = (-1.0 + std::sqrt(41.0)) / 10.0;
    M1 = 30.0 * (w + 1.0) * w * w * (1.0 - w) * (1.0 - w);
    auto h = [this](double u) { return u * sigma(u); };
    double lo = 0.5, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (h(m1) < h(m2))
            lo = m1;
        else
            hi = m2;
    }
    Ms = h(0.5 * (lo + hi));
}

double CutoffProfile::sigma(double u) const {
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - quintic(2.0 * u - 1.0);
}

double CutoffProfile::dsigma(double u) const {
    if (u <= 0.5 || u >= 1.0) return 0.0;
    return -2.0 * dquintic(2.0 * u - 1.0);
}

ManeMap::ManeMap(ToralMatrix A, SpectralData S, ManeParams params)
    : A_(std::move(A)),
      S_(std::move(S)),
      params_(std::move(params)),
      coef_(S_.lambda_c() - params_.b),
      qhat_(params_.q.coords),
      vc_(S_.V.col(1)),
      Ad_(S_.d, S_.d),
      A_inv_(A_.inverse_unimodular()) {
    Ad_ = A_.to_double();
}

ManeMap::EigenCoords ManeMap::coords(const VecD& delta) const {
    EigenCoords ec;
    ec.xi = S_.V_inv * delta;
    ec.xi_c = ec.xi[c_];
    double p2 = 0.0;
    for (int i = 0; i < S_.d; ++i)
        if (i != c_) p2 += ec.xi[i] * ec.xi[i];
    ec.perp_norm = std::sqrt(p2);
    ec.inside = std::abs(ec.xi_c) < params_.tau && ec.perp_norm < params_.sigma_perp;
    return ec;
}

bool ManeMap::in_support(const TorusPoint& x) const {
    VecD delta = wrap(x.coords - qhat_);
    return coords(delta).inside;
}

TorusPoint ManeMap::apply(const TorusPoint& x) const {
    if (coef_ == 0.0) return apply_linear(A_, x);
    VecD delta = wrap(x.coords - qhat_);
    EigenCoords ec = coords(delta);
    if (!ec.inside) return apply_linear(A_, x);
    const double u = ec.perp_norm / params_.sigma_perp;
    const double amount =
        coef_ * center_shape(profile_, ec.xi_c, params_.tau) * profile_.sigma(u);
    // Anchored at q: with delta = 0 every term vanishes, so q is fixed exactly.
    return reduce(qhat_ + Ad_ * delta - amount * vc_);
}

std::pair<TorusPoint, MatD> ManeMap::apply_with_derivative(const TorusPoint& x) const {
    if (coef_ == 0.0) return {apply_linear(A_, x), Ad_};
    VecD delta = wrap(x.coords - qhat_);
    EigenCoords ec = coords(delta);
    if (!ec.inside) return {apply_linear(A_, x), Ad_};
    const double tau = params_.tau;
    const double sp = params_.sigma_perp;
    const double u = ec.perp_norm / sp;
    const double s_val = center_shape(profile_, ec.xi_c, tau);
    const double chi = profile_.sigma(u);
    const double amount = coef_ * s_val * chi;
    TorusPoint image = reduce(qhat_ + Ad_ * delta - amount * vc_);

    Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 8> grad =
        chi * center_shape_deriv(profile_, ec.xi_c, tau) * S_.V_inv.row(c_);
    if (ec.perp_norm > 0.0 && u > 0.5) {
        const double factor = s_val * profile_.dsigma(u) / (sp * ec.perp_norm);
        for (int i = 0; i < S_.d; ++i)
            if (i != c_) grad += factor * ec.xi[i] * S_.V_inv.row(i);
    }
    MatD jac = Ad_ - coef_ * (vc_ * grad);
    return {std::move(image), std::move(jac)};
}

double ManeMap::center_stretch(const TorusPoint& x) const {
    if (coef_ == 0.0) return S_.lambda_c();
    VecD delta = wrap(x.coords - qhat_);
    EigenCoords ec = coords(delta);
    if (!ec.inside) return S_.lambda_c();
    const double u = ec.perp_norm / params_.sigma_perp;
    return S_.lambda_c() -
           coef_ * center_shape_deriv(profile_, ec.xi_c, params_.tau) * profile_.sigma(u);
}

TorusPoint ManeMap::apply_inverse(const TorusPoint& y) const {
    if (apply(y).coords == y.coords) return y; // fixed points invert exactly
    TorusPoint x = apply_linear(A_inv_, y);
    double rn = nearest_diff(y, apply(x)).norm();
    for (int it = 0; it < 100 && rn >= 1e-14; ++it) {
        auto [image, jac] = apply_with_derivative(x);
        VecD step = jac.partialPivLu().solve(nearest_diff(y, image));
        // Backtrack on the residual norm: the cutoff makes Dg vary by a
        // factor ~10 across the support boundary and full steps can 2-cycle.
        double scale = 1.0;
        for (int h = 0; h < 48; ++h) {
            TorusPoint xn = reduce(x.coords + scale * step);
            double rn_new = nearest_diff(y, apply(xn)).norm();
            if (rn_new <= (1.0 - 0.5 * scale) * rn) {
                x = std::move(xn);
                rn = rn_new;
                break;
            }
            scale *= 0.5;
        }
    }
    if (rn < 1e-12) return x;
    throw InversionError("inverse iteration did not converge");
}

namespace {

void validate_on_grid(const ManeMap& g) {
    const SpectralData& S = g.spectral();
    const ManeParams& P = g.params();
    const double lc = S.lambda_c();
    const double hi_bound = lc + g.coefficient() * g.profile().M1 + 1e-9;
    const double lo_bound = std::min(P.b, lc) - 1e-9;
    CounterRng rng(0x6d616e65, 0);

    // Support-box sample in eigen coordinates plus ambient random points.
    std::vector<TorusPoint> probes;
    for (int i = -6; i <= 6; ++i)
        for (int j = -6; j <= 6; ++j) {
            double t = P.tau * i / 6.0;
            double r = P.sigma_perp * std::abs(j) / 6.0;
            VecD xi = VecD::Zero(S.d);
            xi[1] = t;
            xi[0] = r * ((j >= 0) ? 0.6 : -0.6);
            xi[S.d - 1] = r * 0.8;
            probes.push_back(reduce(g.q() + S.V * xi));
        }
    for (int k = 0; k < 200; ++k) {
        VecD v(S.d);
        for (int i = 0; i < S.d; ++i)
            v[i] = rng.uniform(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
        probes.push_back(reduce(v));
    }

    for (const auto& x : probes) {
        double stretch = g.center_stretch(x);
        if (!(stretch >= lo_bound && stretch <= hi_bound))
            throw NumericError("center stretch out of the guaranteed range");
        auto [image, jac] = g.apply_with_derivative(x);
        (void)image;
        if (!(jac.determinant() > 0.0))
            throw NumericError("Jacobian determinant is not positive");
    }

    // Center lines map to center lines.
    const VecD vc = g.center_vector();
    MatD perp_proj = MatD::Identity(S.d, S.d) - vc * vc.transpose();
    for (int k = 0; k < 200; ++k) {
        std::uint64_t idx = 1000 + static_cast<std::uint64_t>(k);
        VecD v(S.d);
        for (int i = 0; i < S.d; ++i) v[i] = rng.uniform(idx, static_cast<std::uint64_t>(i));
        TorusPoint x = reduce(g.q() + 0.5 * P.rho * (v.array() - 0.5).matrix());
        double t = (rng.uniform(idx, 7) - 0.5) * 2.0 * P.tau;
        TorusPoint xt = reduce(x.coords + t * vc);
        VecD diff = nearest_diff(g.apply(xt), g.apply(x));
        if (!((perp_proj * diff).norm() < 1e-12))
            throw NumericError("center foliation is not preserved");
    }

    // Bit-identical linear path outside the support.
    for (int k = 0; k < 64; ++k) {
        VecD v(S.d);
        for (int i = 0; i < S.d; ++i)
            v[i] = rng.uniform(2000 + static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
        TorusPoint x = reduce(v);
        if (g.in_support(x)) continue;
        TorusPoint lin = apply_linear(g.matrix(), x);
        if (g.apply(x).coords != lin.coords)
            throw NumericError("evaluation path differs from the linear map outside the support");
    }
}

} // namespace

ManeMap build_mane_map(const ToralMatrix& A, const SpectralData& S, const ManeParams& params) {
    if (S.d < 3) throw ArgumentError("construction needs dimension >= 3 (stable, center, unstable)");
    const double lc = S.lambda_c();
    const bool trivial = std::abs(params.b - lc) < 1e-12;
    if (!trivial && !(params.b > 0.0 && params.b < 1.0))
        throw ArgumentError("b must lie in (0,1), or equal lambda_c for the undeformed map");
    if (!(params.rho > 0.0)) throw ArgumentError("rho must be positive");
    if (!(params.tau > 0.0) || !(params.sigma_perp > 0.0))
        throw ArgumentError("tau and sigma_perp must be positive");
    if (!(params.gamma >= 0.0)) throw ArgumentError("gamma must be nonnegative");
    if (static_cast<int>(params.q.coords.size()) != S.d)
        throw ArgumentError("q dimension mismatch");
    if (toral_distance(apply_linear(A, params.q), params.q) > 1e-12)
        throw ArgumentError("q is not a fixed point of the linear map");

    // Support box must fit inside B(q, rho/2): |x - q| <= tau + |V_perp| sigma_perp.
    MatD Vperp(S.d, S.d - 1);
    int col = 0;
    for (int i = 0; i < S.d; ++i) {
        if (i == 1) continue;
        Vperp.col(col++) = S.V.col(i);
    }
    const double vperp_norm = Vperp.jacobiSvd().singularValues()(0);
    if (!(params.tau + vperp_norm * params.sigma_perp < 0.5 * params.rho))
        throw GeometryError("support box does not fit inside B(q, rho/2)");

    MeasureStats stats = ball_measure_and_inequality(S, params, 3.0 * params.rho);
    if (!(stats.inequality_value > 1.0))
        throw InequalityError("center inequality violated", stats.inequality_value);

    // Domination: the center stretch never reaches the slowest unstable rate.
    const double coef = trivial ? 0.0 : lc - params.b;
    if (!(lc + coef * CutoffProfile().M1 < S.lambda_u_min()))
        throw GeometryError("center stretch bound exceeds the slowest unstable rate");

    ManeParams fixed = params;
    if (trivial) fixed.b = lc; // exact zero coefficient
    ManeMap g(A, S, fixed);
    validate_on_grid(g);
    return g;
}

std::pair<TorusPoint, MatD> evaluate_with_derivative(const ManeMap& g, const TorusPoint& x) {
    return g.apply_with_derivative(x);
}

std::vector<TorusPoint> center_profile_fixed_points(const ManeMap& g) {
    const ManeParams& P = g.params();
    const double lc = g.spectral().lambda_c();
    if (!(P.b < 1.0)) throw ArgumentError("pitchfork requires b < 1");
    const double ratio = (lc - 1.0) / (lc - P.b);
    const CutoffProfile& pr = g.profile();
    if (!(pr.sigma(0.5) > ratio && pr.sigma(1.0) < ratio))
        throw ProfileError("pitchfork equation is not bracketed");
    double lo = 0.5, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (pr.sigma(mid) > ratio)
            lo = mid;
        else
            hi = mid;
    }
    const double tstar = 0.5 * (lo + hi) * P.tau;

    const VecD vc = g.center_vector();
    std::vector<TorusPoint> pts{reduce(g.q() - tstar * vc), reduce(g.q()),
                                reduce(g.q() + tstar * vc)};
    for (const auto& p : pts)
        if (!(toral_distance(g.apply(p), p) < 1e-10))
            throw ProfileError("pitchfork point is not fixed to tolerance");
    if (!(std::abs(g.center_stretch(pts[1]) - P.b) < 1e-9))
        throw ProfileError("center stretch at q is not b");
    if (!(g.center_stretch(pts[0]) > 1.0 && g.center_stretch(pts[2]) > 1.0))
        throw ProfileError("outer pitchfork points are not center-expanding");
    return pts;
}

CenterExtremes center_derivative_extremes(const ManeMap& g, long long samples) {
    if (samples < 1000) throw ArgumentError("need at least 1000 samples");
    const SpectralData& S = g.spectral();
    const ManeParams& P = g.params();
    const TorusPoint q = reduce(g.q());

    CenterExtremes ex;
    ex.a_g = ex.b_g = std::numeric_limits<double>::infinity();
    auto feed = [&](const TorusPoint& x) {
        double stretch = g.center_stretch(x);
        if (toral_distance(x, q) < P.rho)
            ex.b_g = std::min(ex.b_g, stretch);
        else
            ex.a_g = std::min(ex.a_g, stretch);
    };

    // Kronecker low-discrepancy sweep of the whole torus.
    static const double primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
    VecD x(S.d);
    for (long long k = 0; k < samples; ++k) {
        for (int i = 0; i < S.d; ++i)
            x[i] = reduce_scalar(0.5 + static_cast<double>(k + 1) * std::sqrt(primes[i]));
        feed(reduce(x));
    }
    // The support region is tiny; probe it (and q itself) explicitly.
    feed(q);
    const VecD vc = g.center_vector();
    for (int i = -120; i <= 120; ++i) {
        double t = P.tau * i / 100.0;
        feed(reduce(g.q() + t * vc));
        VecD xi = VecD::Zero(S.d);
        xi[1] = t;
        xi[0] = 0.4 * P.sigma_perp;
        xi[S.d - 1] = 0.5 * P.sigma_perp;
        feed(reduce(g.q() + S.V * xi));
    }
    if (!(ex.b_g <= ex.a_g + 1e-15)) throw NumericError("extremes violate b_g <= a_g");
    return ex;
}

double ball_volume(int d, double radius) {
    if (!(radius > 0.0 && radius < 0.5))
        throw GeometryError("ball radius must lie in (0, 1/2) to embed in the torus");
    const double half_d = 0.5 * static_cast<double>(d);
    return std::pow(std::numbers::pi, half_d) / std::tgamma(half_d + 1.0) *
           std::pow(radius, d);
}

MeasureStats ball_measure_and_inequality(const SpectralData& S, const ManeParams& params,
                                         double radius) {
    MeasureStats st;
    st.radius_used = radius;
    st.m = ball_volume(S.d, radius);
    const double lc = S.lambda_c();
    st.inequality_value = std::pow(lc, 1.0 - st.m) * std::pow(params.b, 2.0 * st.m);
    if (!(st.inequality_value > 1.0)) {
        st.slack_sigma = 0.0;
        return st;
    }
    // Largest sigma with (1 - m - sigma) ln lc + (2m + sigma) ln b > 0; the
    // expression is nonincreasing in sigma, capped at 1 - m so the expansion
    // exponent stays nonnegative.
    auto positive = [&](double s) {
        return (1.0 - st.m - s) * std::log(lc) + (2.0 * st.m + s) * std::log(params.b) > 0.0;
    };
    double hi = 1.0 - st.m;
    if (positive(hi)) {
        st.slack_sigma = hi;
        return st;
    }
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (positive(mid))
            lo = mid;
        else
            hi = mid;
    }
    st.slack_sigma = lo;
    return st;
}

double support_max_tau(const SpectralData& S, double rho) {
    if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
    MatD Vperp(S.d, S.d - 1);
    int col = 0;
    for (int i = 0; i < S.d; ++i) {
        if (i == 1) continue;
        Vperp.col(col++) = S.V.col(i);
    }
    const double vperp_norm = Vperp.jacobiSvd().singularValues()(0);
    return 0.5 * rho / (1.0 + vperp_norm);
}

ManeParams default_params(const SpectralData& S, const TorusPoint& q, double rho, double b,
                          double tau_fraction, double gamma) {
    if (!(tau_fraction > 0.0 && tau_fraction < 1.0))
        throw ArgumentError("tau_fraction must lie in (0,1)");
    ManeParams p;
    p.q = q;
    p.rho = rho;
    p.b = b;
    p.tau = p.sigma_perp = tau_fraction * support_max_tau(S, rho);
    p.gamma = gamma;
    return p;
}

ManeParams jitter_params(const ManeParams& params, std::uint64_t seed) {
    ManeParams out = params;
    if (params.gamma == 0.0) return out;
    CounterRng rng(seed, 0xfa417);
    if (params.b < 1.0) {
        out.b = params.b * (1.0 + rng.symmetric(params.gamma, 0, 0));
        out.b = std::min(std::max(out.b, 1e-6), 1.0 - 1e-6);
    }
    out.tau = params.tau * (1.0 + rng.symmetric(params.gamma, 0, 1));
    out.sigma_perp = params.sigma_perp * (1.0 + rng.symmetric(params.gamma, 0, 2));
    return out;
}

} // namespace manelab
