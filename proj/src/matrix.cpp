#include "manelab/matrix.hpp"

#include <limits>
#include <string>

namespace manelab {

namespace {

long long checked_narrow(const BigInt& v, const char* what) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw NumericError(std::string(what) + ": value exceeds 64-bit range");
    return static_cast<long long>(v);
}

} // namespace

ToralMatrix::ToralMatrix(int d, std::vector<long long> entries) : d_(d), e_(std::move(entries)) {
    if (d < 1 || d > 8) throw ArgumentError("matrix dimension must be in [1, 8]");
    if (e_.size() != static_cast<std::size_t>(d) * d)
        throw ArgumentError("entry count does not match dimension");
}

ToralMatrix ToralMatrix::identity(int d) {
    std::vector<long long> e(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i) * d + i] = 1;
    return ToralMatrix(d, std::move(e));
}

ToralMatrix ToralMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
    const int d = static_cast<int>(rows.size());
    std::vector<long long> e;
    e.reserve(static_cast<std::size_t>(d) * d);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != d) throw ArgumentError("matrix rows must form a square");
        e.insert(e.end(), r.begin(), r.end());
    }
    return ToralMatrix(d, std::move(e));
}

ToralMatrix ToralMatrix::multiply(const ToralMatrix& other) const {
    if (d_ != other.d_) throw ArgumentError("matrix dimensions differ");
    std::vector<long long> out(static_cast<std::size_t>(d_) * d_);
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            __int128 acc = 0;
            for (int k = 0; k < d_; ++k)
                acc += static_cast<__int128>(at(i, k)) * other.at(k, j);
            if (acc > std::numeric_limits<long long>::max() ||
                acc < std::numeric_limits<long long>::min())
                throw NumericError("matrix multiply overflow at entry (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
            out[static_cast<std::size_t>(i) * d_ + j] = static_cast<long long>(acc);
        }
    }
    return ToralMatrix(d_, std::move(out));
}

ToralMatrix ToralMatrix::add(const ToralMatrix& other) const {
    if (d_ != other.d_) throw ArgumentError("matrix dimensions differ");
    std::vector<long long> out(e_);
    for (std::size_t i = 0; i < out.size(); ++i) {
        __int128 acc = static_cast<__int128>(out[i]) + other.e_[i];
        if (acc > std::numeric_limits<long long>::max() ||
            acc < std::numeric_limits<long long>::min())
            throw NumericError("matrix add overflow");
        out[i] = static_cast<long long>(acc);
    }
    return ToralMatrix(d_, std::move(out));
}

ToralMatrix ToralMatrix::subtract_identity() const {
    ToralMatrix out = *this;
    for (int i = 0; i < d_; ++i) out.at(i, i) -= 1;
    return out;
}

BigInt ToralMatrix::determinant() const {
    // Bareiss fraction-free elimination; every division below is exact.
    const int d = d_;
    std::vector<BigInt> m(e_.begin(), e_.end());
    auto idx = [d](int i, int j) { return static_cast<std::size_t>(i) * d + j; };
    BigInt sign = 1;
    BigInt prev = 1;
    for (int k = 0; k + 1 < d; ++k) {
        if (m[idx(k, k)] == 0) {
            int swap_row = -1;
            for (int i = k + 1; i < d; ++i)
                if (m[idx(i, k)] != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row < 0) return 0;
            for (int j = 0; j < d; ++j) std::swap(m[idx(k, j)], m[idx(swap_row, j)]);
            sign = -sign;
        }
        for (int i = k + 1; i < d; ++i) {
            for (int j = k + 1; j < d; ++j) {
                m[idx(i, j)] = (m[idx(k, k)] * m[idx(i, j)] - m[idx(i, k)] * m[idx(k, j)]) / prev;
            }
            m[idx(i, k)] = 0;
        }
        prev = m[idx(k, k)];
    }
    return sign * m[idx(d - 1, d - 1)];
}

bool ToralMatrix::is_unimodular() const {
    BigInt det = determinant();
    return det == 1 || det == -1;
}

ToralMatrix ToralMatrix::inverse_unimodular() const {
    BigInt det = determinant();
    if (det != 1 && det != -1)
        throw ArgumentError("inverse requires determinant +1 or -1");
    const int d = d_;
    std::vector<long long> out(static_cast<std::size_t>(d) * d);
    if (d == 1) {
        out[0] = checked_narrow(det, "matrix inverse");
        return ToralMatrix(1, std::move(out));
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            // Cofactor C_ji: minor with row j and column i deleted.
            std::vector<long long> minor;
            minor.reserve(static_cast<std::size_t>(d - 1) * (d - 1));
            for (int r = 0; r < d; ++r) {
                if (r == j) continue;
                for (int c = 0; c < d; ++c) {
                    if (c == i) continue;
                    minor.push_back(at(r, c));
                }
            }
            BigInt cof = ToralMatrix(d - 1, std::move(minor)).determinant();
            if ((i + j) % 2 != 0) cof = -cof;
            out[static_cast<std::size_t>(i) * d + j] = checked_narrow(cof * det, "matrix inverse");
        }
    }
    return ToralMatrix(d, std::move(out));
}

IntPolynomial ToralMatrix::characteristic_polynomial() const {
    // Leverrier-Faddeev over exact integers; the division by k is exact.
    const int d = d_;
    std::vector<BigInt> A(e_.begin(), e_.end());
    auto idx = [d](int i, int j) { return static_cast<std::size_t>(i) * d + j; };
    std::vector<BigInt> M(A);
    std::vector<BigInt> coeffs(static_cast<std::size_t>(d) + 1);
    coeffs[d] = 1;
    BigInt tr = 0;
    for (int i = 0; i < d; ++i) tr += M[idx(i, i)];
    coeffs[d - 1] = -tr;
    for (int k = 2; k <= d; ++k) {
        std::vector<BigInt> N(M);
        for (int i = 0; i < d; ++i) N[idx(i, i)] += coeffs[d - k + 1];
        std::vector<BigInt> next(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                BigInt acc = 0;
                for (int l = 0; l < d; ++l) acc += A[idx(i, l)] * N[idx(l, j)];
                next[idx(i, j)] = acc;
            }
        M = std::move(next);
        tr = 0;
        for (int i = 0; i < d; ++i) tr += M[idx(i, i)];
        coeffs[d - k] = -tr / k;
    }
    std::vector<long long> small(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        small[i] = checked_narrow(coeffs[i], "characteristic polynomial coefficient");
    return IntPolynomial{std::move(small)};
}

MatD ToralMatrix::to_double() const {
    MatD out(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) out(i, j) = static_cast<double>(at(i, j));
    return out;
}

ToralMatrix companion_matrix(const IntPolynomial& p) {
    const int d = p.degree();
    if (d < 1) throw ArgumentError("companion matrix needs degree >= 1");
    if (!p.unimodular_constant())
        throw ArgumentError("companion matrix requires constant term +1 or -1");
    std::vector<long long> e(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i + 1 < d; ++i) e[static_cast<std::size_t>(i) * d + i + 1] = 1;
    for (int j = 0; j < d; ++j) e[static_cast<std::size_t>(d - 1) * d + j] = -p.coeffs[j];
    return ToralMatrix(d, std::move(e));
}

ToralMatrix matrix_power(const ToralMatrix& A, int k) {
    if (k < 1 || k > 16) throw ArgumentError("matrix power exponent must be in [1, 16]");
    ToralMatrix result = A;
    for (int i = 1; i < k; ++i) result = result.multiply(A);
    return result;
}

} // namespace manelab
