#pragma once

#include <vector>

#include "manelab/spectral.hpp"
#include "manelab/torus.hpp"

namespace manelab {

// Finite window of near-orbit points for the linear map.  Points are stored
// reduced; the per-step closure errors e_j = x_{j+1} - A x_j are kept as the
// shortest representatives, which stays stable over long windows where raw
// chained lifts would drown in floating-point magnitude.
struct PseudoOrbit {
    std::vector<TorusPoint> points;
    std::vector<VecD> errors; // size points.size() - 1
    double epsilon = 0.0;     // max_j |e_j|_2

    static PseudoOrbit from_points(std::vector<TorusPoint> pts, const ToralMatrix& A);
};

struct ShadowingConstants {
    double kappa = 0.0;       // delta / epsilon ratio
    double expansivity = 0.0; // conservative separation constant
};

ShadowingConstants shadowing_constants(const SpectralData& S);

struct ShadowingResult {
    Lift anchor;                       // corrected point at anchor_index
    int anchor_index = 0;
    double delta_realized = 0.0;       // max_j |y_j - x_j|
    double truncation_bound = 0.0;     // tail mass cut by the finite window
    std::vector<TorusPoint> corrected; // the true orbit y_j, reduced
};

// Unique bounded solution of the correction recursion, truncated to the
// window: contracting components accumulate forward, expanding ones backward.
ShadowingResult shadow(const PseudoOrbit& po, const SpectralData& S, int anchor_index = 0);

} // namespace manelab
