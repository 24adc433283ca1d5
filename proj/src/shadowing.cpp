#include "manelab/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace manelab {

PseudoOrbit PseudoOrbit::from_points(std::vector<TorusPoint> pts, const ToralMatrix& A) {
    if (pts.size() < 2) throw ArgumentError("pseudo-orbit needs at least 2 points");
    PseudoOrbit po;
    po.points = std::move(pts);
    po.errors.reserve(po.points.size() - 1);
    po.epsilon = 0.0;
    for (std::size_t j = 0; j + 1 < po.points.size(); ++j) {
        VecD e = nearest_diff(po.points[j + 1], apply_linear(A, po.points[j]));
        po.epsilon = std::max(po.epsilon, e.norm());
        po.errors.push_back(std::move(e));
    }
    return po;
}

ShadowingConstants shadowing_constants(const SpectralData& S) {
    ShadowingConstants k;
    double norm_sum = 0.0;
    for (int i = 0; i < S.d; ++i) {
        const double pnorm = S.projections[static_cast<std::size_t>(i)].jacobiSvd().singularValues()(0);
        const double lam = S.eigenvalues[static_cast<std::size_t>(i)];
        k.kappa += pnorm * (lam < 1.0 ? 1.0 / (1.0 - lam) : 1.0 / (lam - 1.0));
        norm_sum += pnorm;
    }
    double min_gap = std::numeric_limits<double>::infinity();
    for (double lam : S.eigenvalues) min_gap = std::min(min_gap, std::abs(lam - 1.0));
    k.expansivity = std::min(0.25, min_gap / (2.0 * norm_sum));
    return k;
}

ShadowingResult shadow(const PseudoOrbit& po, const SpectralData& S, int anchor_index) {
    const int L = static_cast<int>(po.points.size());
    if (L < 2) throw ArgumentError("pseudo-orbit window too short");
    if (anchor_index < 0 || anchor_index >= L) throw ArgumentError("anchor index out of window");
    const ShadowingConstants k = shadowing_constants(S);
    if (!(po.epsilon * k.kappa < k.expansivity / 3.0))
        throw RegimeError("pseudo-orbit too coarse for certified unique shadowing");

    const int d = S.d;
    // Scalar error components per eigendirection.
    std::vector<std::vector<double>> eta(static_cast<std::size_t>(d),
                                         std::vector<double>(static_cast<std::size_t>(L - 1)));
    for (int j = 0; j < L - 1; ++j) {
        VecD comps = S.V_inv * po.errors[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) eta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = comps[i];
    }

    // omega_i solves omega_{j+1} = lambda_i omega_j - eta_{i,j}; the bounded
    // branch runs forward from 0 when contracting, backward when expanding.
    std::vector<std::vector<double>> omega(static_cast<std::size_t>(d),
                                           std::vector<double>(static_cast<std::size_t>(L), 0.0));
    for (int i = 0; i < d; ++i) {
        const double lam = S.eigenvalues[static_cast<std::size_t>(i)];
        auto& w = omega[static_cast<std::size_t>(i)];
        const auto& h = eta[static_cast<std::size_t>(i)];
        if (lam < 1.0) {
            for (int j = 0; j + 1 < L; ++j)
                w[static_cast<std::size_t>(j) + 1] = lam * w[static_cast<std::size_t>(j)] - h[static_cast<std::size_t>(j)];
        } else {
            for (int j = L - 2; j >= 0; --j)
                w[static_cast<std::size_t>(j)] = (w[static_cast<std::size_t>(j) + 1] + h[static_cast<std::size_t>(j)]) / lam;
        }
    }

    ShadowingResult res;
    res.anchor_index = anchor_index;
    res.corrected.reserve(static_cast<std::size_t>(L));
    res.delta_realized = 0.0;
    VecD anchor_correction = VecD::Zero(d);
    for (int j = 0; j < L; ++j) {
        VecD wj = VecD::Zero(d);
        for (int i = 0; i < d; ++i) wj += omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * S.V.col(i);
        res.delta_realized = std::max(res.delta_realized, wj.norm());
        if (j == anchor_index) anchor_correction = wj;
        res.corrected.push_back(reduce(po.points[static_cast<std::size_t>(j)].coords + wj));
    }
    res.anchor.coords = po.points[static_cast<std::size_t>(anchor_index)].coords + anchor_correction;

    res.truncation_bound = 0.0;
    for (int i = 0; i < d; ++i) {
        const double pnorm = S.projections[static_cast<std::size_t>(i)].jacobiSvd().singularValues()(0);
        const double lam = S.eigenvalues[static_cast<std::size_t>(i)];
        if (lam < 1.0)
            res.truncation_bound +=
                po.epsilon * pnorm * std::pow(lam, anchor_index) / (1.0 - lam);
        else
            res.truncation_bound +=
                po.epsilon * pnorm * std::pow(lam, -(L - 1 - anchor_index)) / (lam - 1.0);
    }
    return res;
}

} // namespace manelab
