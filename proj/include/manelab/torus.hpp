#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "manelab/matrix.hpp"

namespace manelab {

// Point on the d-torus; every coordinate lies in [0, 1).
struct TorusPoint {
    VecD coords;
    int dim() const { return static_cast<int>(coords.size()); }
};

// Representative in R^d.
struct Lift {
    VecD coords;
};

// Dyadic point with coordinates c/2^64; the linear action is exact here.
struct LatticePoint {
    int d = 0;
    std::array<std::uint64_t, 8> c{};
};

double reduce_scalar(double v);
TorusPoint reduce(const VecD& v);

// Per-coordinate representative of u mod 1 in (-1/2, 1/2]; ties go to +1/2.
double wrap_scalar(double u);
VecD wrap(const VecD& u);

// Lift of x whose coordinates lie in (base_i - 1/2, base_i + 1/2].
Lift nearest_lift(const TorusPoint& x, const Lift& base);

// Shortest displacement from y to x, one coordinate at a time.
VecD nearest_diff(const TorusPoint& x, const TorusPoint& y);

double toral_distance(const TorusPoint& x, const TorusPoint& y);

TorusPoint apply_linear(const ToralMatrix& A, const TorusPoint& x);
LatticePoint apply_linear(const ToralMatrix& A, const LatticePoint& x);

TorusPoint lattice_to_point(const LatticePoint& x);
LatticePoint lattice_from_point(const TorusPoint& x);

// All solutions of (A - I)x in Z^d as exact rationals in [0,1)^d, sorted
// lexicographically; count equals |det(A - I)|.
std::vector<std::vector<Rational>> fixed_points_exact(const ToralMatrix& A);
std::vector<TorusPoint> fixed_points(const ToralMatrix& A);

} // namespace manelab
