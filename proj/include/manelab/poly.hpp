#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "manelab/errors.hpp"

namespace manelab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Monic integer polynomial, coefficients stored low degree first.
struct IntPolynomial {
    std::vector<long long> coeffs;

    static IntPolynomial from_coeffs(std::vector<long long> c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    long long constant_term() const { return coeffs.front(); }
    bool unimodular_constant() const {
        return constant_term() == 1 || constant_term() == -1;
    }

    double evaluate(double x) const;
    double derivative_at(double x) const;
    Rational evaluate_exact(const Rational& x) const;

    /// Cauchy bound: all roots have |r| < bound.
    double root_bound() const;

    bool operator==(const IntPolynomial& other) const { return coeffs == other.coeffs; }
    bool operator<(const IntPolynomial& other) const { return coeffs < other.coeffs; }
};

/// Sturm chain of p over exact rationals.  Both counting queries below are
/// exact; intervals are open on the left, closed on the right: (a, b].
class SturmChain {
public:
    explicit SturmChain(const IntPolynomial& p);

    /// Number of distinct real roots in (a, b].
    int count(const Rational& a, const Rational& b) const;

    /// Number of distinct real roots on the whole line.
    int count_all() const;

    /// Degree of gcd(p, p'); zero iff p is squarefree.
    int gcd_degree() const { return gcd_degree_; }

private:
    int sign_changes(const Rational& x) const;
    int sign_changes_at_infinity(int direction) const;

    std::vector<std::vector<Rational>> chain_;
    int gcd_degree_ = 0;
};

bool is_squarefree(const IntPolynomial& p);

/// All real roots, ascending, each within tol of a true root.  The count is
/// certified by Sturm sign changes; each root is isolated by exact bisection
/// and polished by Newton in doubles.
std::vector<double> real_roots(const IntPolynomial& p, double tol = 1e-12);

/// Heuristic rationality test: true iff x is within tol of a fraction with
/// denominator at most max_den (continued-fraction convergents).
bool near_small_rational(double x, long long max_den, double tol);

/// The first continued-fraction convergent of x within tol, if any has
/// denominator at most max_den.
std::optional<Rational> nearest_small_rational(double x, long long max_den, double tol);

} // namespace manelab
