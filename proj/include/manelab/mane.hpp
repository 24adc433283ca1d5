#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "manelab/spectral.hpp"
#include "manelab/torus.hpp"

namespace manelab {

// C^2 quintic cutoff shape: 1 on [0,1/2], 0 on [1,inf), smoothstep between.
struct CutoffProfile {
    CutoffProfile();
    double sigma(double u) const;
    double dsigma(double u) const;
    double M1; // max over u of |u sigma'(u)|
    double Ms; // max over u of u sigma(u)
};

struct ManeParams {
    TorusPoint q;        // deformed fixed point
    double rho = 0.0;    // ball scale
    double b = 0.0;      // center stretch at q; in (0,1), or lambda_c for no deformation
    double tau = 0.0;    // center half-width of the support, eigen-coordinates
    double sigma_perp = 0.0; // transverse support radius, eigen-coordinates
    double gamma = 0.0;  // jitter budget for nearby family members
};

struct CenterExtremes {
    double a_g = 0.0; // min center stretch outside B(q, rho)
    double b_g = 0.0; // min center stretch inside B(q, rho)
};

struct MeasureStats {
    double m = 0.0;
    double radius_used = 0.0;
    double inequality_value = 0.0; // lambda_c^(1-m) * b^(2m)
    double slack_sigma = 0.0;      // largest sigma keeping the exponent positive
};

// Rank-one shear of f_A along the center eigendirection, supported in a small
// box around the fixed point q:
//   g(x) = f_A(x) - (lambda_c - b) * s(xi_c) * sigma(|xi_perp|/sigma_perp) * v_c
// with xi = V^-1 (x - q) in nearest-lift coordinates, s(t) = t sigma(|t|/tau).
// Inside the support the image is evaluated anchored at q, so q is fixed to
// the last bit; outside, the evaluation path is bit-identical to f_A.
class ManeMap {
public:
    ManeMap(ToralMatrix A, SpectralData S, ManeParams params);

    const ToralMatrix& matrix() const { return A_; }
    const SpectralData& spectral() const { return S_; }
    const ManeParams& params() const { return params_; }
    const CutoffProfile& profile() const { return profile_; }
    double coefficient() const { return coef_; } // lambda_c - b
    const VecD& q() const { return qhat_; }
    const VecD& center_vector() const { return vc_; }

    TorusPoint apply(const TorusPoint& x) const;
    std::pair<TorusPoint, MatD> apply_with_derivative(const TorusPoint& x) const;
    TorusPoint apply_inverse(const TorusPoint& y) const;

    // |Dg v_c| / |v_c|; closed form lambda_c - coef * s'(xi_c) * sigma(u).
    double center_stretch(const TorusPoint& x) const;
    bool in_support(const TorusPoint& x) const;

private:
    struct EigenCoords {
        VecD xi;
        double xi_c;
        double perp_norm;
        bool inside;
    };
    EigenCoords coords(const VecD& delta) const;

    ToralMatrix A_;
    SpectralData S_;
    ManeParams params_;
    CutoffProfile profile_;
    double coef_;
    VecD qhat_;
    VecD vc_;
    MatD Ad_;
    ToralMatrix A_inv_;
    int c_ = 1; // center index in ascending eigen order
};

// Validates parameters (q fixed, support fits in B(q, rho/2), b admissible,
// center-inequality margin) and the map invariants on a deterministic grid.
ManeMap build_mane_map(const ToralMatrix& A, const SpectralData& S, const ManeParams& params);

std::pair<TorusPoint, MatD> evaluate_with_derivative(const ManeMap& g, const TorusPoint& x);

// {q - t* v_c, q, q + t* v_c}: the three fixed points on the center leaf
// through q after the pitchfork.
std::vector<TorusPoint> center_profile_fixed_points(const ManeMap& g);

CenterExtremes center_derivative_extremes(const ManeMap& g, long long samples);

// Euclidean volume of B(0, radius) in R^d; requires radius < 1/2 so the ball
// embeds in the torus.
double ball_volume(int d, double radius);

MeasureStats ball_measure_and_inequality(const SpectralData& S, const ManeParams& params,
                                         double radius);

// Largest tau = sigma_perp for which the support box provably fits inside
// B(q, rho/2): tau * (1 + |V_perp|) = rho / 2.
double support_max_tau(const SpectralData& S, double rho);

// tau_fraction is measured against support_max_tau; the default keeps
// kappa * sup|g - f_A| below a third of the expansivity scale with margin.
ManeParams default_params(const SpectralData& S, const TorusPoint& q, double rho = 0.05,
                          double b = 0.5, double tau_fraction = 0.12, double gamma = 0.0);

// Nearby family member: multiplicative jitter of (b, tau, sigma_perp) within
// the budget params.gamma; the center foliation stays linear by construction.
ManeParams jitter_params(const ManeParams& params, std::uint64_t seed);

} // namespace manelab
