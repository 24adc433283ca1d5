#pragma once

#include <vector>

#include "manelab/errors.hpp"
#include "manelab/linalg.hpp"
#include "manelab/poly.hpp"

namespace manelab {

// Square integer matrix acting on the torus R^d / Z^d.  All arithmetic is
// exact; any operation whose result would not fit in 64 bits throws.
class ToralMatrix {
public:
    ToralMatrix(int d, std::vector<long long> entries);
    static ToralMatrix identity(int d);
    static ToralMatrix from_rows(const std::vector<std::vector<long long>>& rows);

    int dim() const { return d_; }
    long long at(int i, int j) const { return e_[static_cast<std::size_t>(i) * d_ + j]; }
    long long& at(int i, int j) { return e_[static_cast<std::size_t>(i) * d_ + j]; }

    ToralMatrix multiply(const ToralMatrix& other) const;
    ToralMatrix add(const ToralMatrix& other) const;
    ToralMatrix subtract_identity() const;
    BigInt determinant() const;
    bool is_unimodular() const;
    // Exact inverse; requires |det| = 1 so the inverse is again integral.
    ToralMatrix inverse_unimodular() const;
    IntPolynomial characteristic_polynomial() const;
    MatD to_double() const;

    bool operator==(const ToralMatrix& other) const { return d_ == other.d_ && e_ == other.e_; }

private:
    int d_;
    std::vector<long long> e_; // row-major
};

ToralMatrix companion_matrix(const IntPolynomial& p);
ToralMatrix matrix_power(const ToralMatrix& A, int k);

} // namespace manelab
