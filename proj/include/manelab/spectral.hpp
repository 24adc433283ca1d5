#pragma once

#include <vector>

#include "manelab/matrix.hpp"

namespace manelab {

// Full eigendata of an admissible toral automorphism.  Eigenvalues are sorted
// ascending, so index 0 is the contracting direction, index 1 the weakest
// expanding one, and the rest expand strictly faster.
struct SpectralData {
    int d = 0;
    std::vector<double> eigenvalues;
    MatD V;                        // columns are unit eigenvectors, ascending order
    MatD V_inv;
    std::vector<MatD> projections; // P_i = v_i * row_i(V_inv)
    double entropy_exact = 0.0;    // sum of ln(lambda) over lambda > 1
    double condition_number = 0.0; // of V

    double lambda_s() const { return eigenvalues.front(); }
    double lambda_c() const { return eigenvalues[1]; }
    double lambda_u_min() const { return eigenvalues[d > 2 ? 2 : 1]; }
    VecD eigenvector(int i) const { return V.col(i); }
};

// Eigendata with certified-real, simple, positive spectrum; throws
// AdmissibilityError naming the violated condition otherwise.
SpectralData spectral_data(const ToralMatrix& A, double tol = 1e-12);

// Every monic integer polynomial of the given degree with |coefficients| <=
// coeff_bound, constant term +1 or -1, all roots real, positive, simple,
// irrational, exactly one root inside (0,1) and none equal to 1.  Sorted
// lexicographically by coefficient sequence.
std::vector<IntPolynomial> search_admissible_polynomials(int d, long long coeff_bound);

double linear_entropy(const SpectralData& S);

} // namespace manelab
