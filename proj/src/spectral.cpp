#include "manelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace manelab {

namespace {

// Right singular vector of (A - lambda I) for its smallest singular value.
VecD kernel_vector(const MatD& Ad, double lambda) {
    const int d = static_cast<int>(Ad.rows());
    MatD shifted = Ad;
    for (int i = 0; i < d; ++i) shifted(i, i) -= lambda;
    Eigen::JacobiSVD<MatD> svd(shifted, Eigen::ComputeFullV);
    VecD v = svd.matrixV().col(d - 1);
    v.normalize();
    // Deterministic orientation: the largest-magnitude entry is positive.
    int arg = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0) v = -v;
    return v;
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

SpectralData spectral_data(const ToralMatrix& A, double tol) {
    if (!A.is_unimodular())
        throw AdmissibilityError("determinant is not +1 or -1");
    const int d = A.dim();
    IntPolynomial p = A.characteristic_polynomial();

    SturmChain chain(p);
    if (chain.gcd_degree() > 0) throw AdmissibilityError("repeated eigenvalue");
    if (chain.count_all() < d) throw AdmissibilityError("complex eigenvalue");
    const Rational big(static_cast<long long>(std::ceil(p.root_bound())) + 1);
    if (chain.count(-big, Rational(0)) > 0) throw AdmissibilityError("negative eigenvalue");
    if (p.evaluate_exact(Rational(1)) == 0) throw AdmissibilityError("eigenvalue equal to 1");
    const int inside = chain.count(Rational(0), Rational(1));
    if (inside != 1)
        throw AdmissibilityError("expected exactly one eigenvalue in (0,1), found " +
                                 std::to_string(inside));

    SpectralData S;
    S.d = d;
    S.eigenvalues = real_roots(p, tol);
    for (double lam : S.eigenvalues)
        if (std::abs(lam - 1.0) <= 1e-9) throw AdmissibilityError("eigenvalue equal to 1");

    const MatD Ad = A.to_double();
    S.V.resize(d, d);
    for (int i = 0; i < d; ++i) S.V.col(i) = kernel_vector(Ad, S.eigenvalues[i]);

    Eigen::JacobiSVD<MatD> svd(S.V);
    S.condition_number = svd.singularValues()(0) / svd.singularValues()(d - 1);
    if (!(S.condition_number < 1e6))
        throw AdmissibilityError("eigenvector matrix ill-conditioned");
    S.V_inv = S.V.inverse();

    S.projections.reserve(d);
    for (int i = 0; i < d; ++i)
        S.projections.push_back(S.V.col(i) * S.V_inv.row(i));

    S.entropy_exact = 0.0;
    for (double lam : S.eigenvalues)
        if (lam > 1.0) S.entropy_exact += std::log(lam);

    // Internal consistency; failures here indicate a numerics bug, not an
    // inadmissible input.
    for (int i = 0; i < d; ++i) {
        double residual = (Ad * S.V.col(i) - S.eigenvalues[i] * S.V.col(i)).norm();
        if (!(residual <= 1e-9)) throw NumericError("eigenvector residual exceeds 1e-9");
    }
    MatD sum = MatD::Zero(d, d);
    for (const auto& P : S.projections) sum += P;
    if (!((sum - MatD::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10))
        throw NumericError("projections do not sum to identity");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            if (!((S.projections[i] * S.projections[j]).cwiseAbs().maxCoeff() <= 1e-10))
                throw NumericError("projections are not mutually annihilating");
        }
    double prod = 1.0;
    for (double lam : S.eigenvalues) prod *= lam;
    if (!(std::abs(prod - 1.0) <= 1e-9)) throw NumericError("eigenvalue product is not 1");
    if (!(std::abs(S.entropy_exact + std::log(S.eigenvalues.front())) <= 1e-9))
        throw NumericError("entropy identity violated");
    return S;
}

std::vector<IntPolynomial> search_admissible_polynomials(int d, long long coeff_bound) {
    if (d < 2 || d > 6) throw ArgumentError("search degree must be in [2, 6]");
    if (coeff_bound < 1 || coeff_bound > 50)
        throw ArgumentError("coefficient bound must be in [1, 50]");

    // All roots real, positive, with product 1 forces p(0) = (-1)^d and
    // strictly alternating coefficient signs c_{d-k} = (-1)^k e_k with
    // elementary symmetric e_k >= binomial(d,k) (Maclaurin, product = 1).
    std::vector<IntPolynomial> found;
    std::vector<long long> e(static_cast<std::size_t>(d) + 1, 0);
    e[0] = 1;
    e[d] = 1;

    auto admissible = [&](const IntPolynomial& p) {
        SturmChain chain(p);
        if (chain.gcd_degree() > 0) return false;
        const Rational big(static_cast<long long>(std::ceil(p.root_bound())) + 1);
        if (chain.count(Rational(0), big) != d) return false; // all real and positive
        if (p.evaluate_exact(Rational(1)) == 0) return false;
        if (chain.count(Rational(0), Rational(1)) != 1) return false;
        // A convergent within 1e-12 is common for any irrational (best
        // approximations reach 1/q^2), so a nearby ratio only disqualifies
        // the root when it solves p exactly.
        for (double r : real_roots(p, 1e-12))
            if (auto cand = nearest_small_rational(r, 1000000, 1e-12))
                if (p.evaluate_exact(*cand) == 0) return false;
        return true;
    };

    // Newton's inequalities p_k^2 >= p_{k-1} p_{k+1} (p_k = e_k / C(d,k)) are
    // necessary for an all-real root set; checked with slack before Sturm.
    auto newton_ok = [&]() {
        for (int k = 1; k < d; ++k) {
            double pk = static_cast<double>(e[k]) / static_cast<double>(binomial(d, k));
            double pm = static_cast<double>(e[k - 1]) / static_cast<double>(binomial(d, k - 1));
            double pp = static_cast<double>(e[k + 1]) / static_cast<double>(binomial(d, k + 1));
            if (pk * pk < pm * pp - 1e-9) return false;
        }
        return true;
    };

    std::function<void(int)> enumerate = [&](int k) {
        if (k == d) {
            if (!newton_ok()) return;
            std::vector<long long> coeffs(static_cast<std::size_t>(d) + 1);
            for (int j = 0; j <= d; ++j) {
                long long c = e[d - j];
                if ((d - j) % 2 != 0) c = -c;
                coeffs[j] = c;
            }
            IntPolynomial p = IntPolynomial::from_coeffs(std::move(coeffs));
            if (admissible(p)) found.push_back(std::move(p));
            return;
        }
        for (long long v = binomial(d, k); v <= coeff_bound; ++v) {
            e[k] = v;
            enumerate(k + 1);
        }
    };
    enumerate(1);

    std::sort(found.begin(), found.end());
    return found;
}

double linear_entropy(const SpectralData& S) { return S.entropy_exact; }

} // namespace manelab
