#include "manelab/torus.hpp"

#include <algorithm>
#include <cmath>

namespace manelab {

double reduce_scalar(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r -= 1.0; // floor rounding can land exactly on 1
    return r + 0.0;         // clean -0
}

TorusPoint reduce(const VecD& v) {
    TorusPoint out;
    out.coords.resize(v.size());
    for (int i = 0; i < v.size(); ++i) out.coords[i] = reduce_scalar(v[i]);
    return out;
}

double wrap_scalar(double u) { return u - std::ceil(u - 0.5); }

VecD wrap(const VecD& u) {
    VecD out(u.size());
    for (int i = 0; i < u.size(); ++i) out[i] = wrap_scalar(u[i]);
    return out;
}

Lift nearest_lift(const TorusPoint& x, const Lift& base) {
    Lift out;
    out.coords.resize(x.coords.size());
    for (int i = 0; i < x.coords.size(); ++i) {
        double u = x.coords[i] - base.coords[i];
        out.coords[i] = base.coords[i] + wrap_scalar(u);
    }
    return out;
}

VecD nearest_diff(const TorusPoint& x, const TorusPoint& y) {
    return wrap(x.coords - y.coords);
}

double toral_distance(const TorusPoint& x, const TorusPoint& y) {
    return nearest_diff(x, y).norm();
}

TorusPoint apply_linear(const ToralMatrix& A, const TorusPoint& x) {
    const int d = A.dim();
    VecD y(d);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += static_cast<double>(A.at(i, j)) * x.coords[j];
        y[i] = acc;
    }
    return reduce(y);
}

LatticePoint apply_linear(const ToralMatrix& A, const LatticePoint& x) {
    const int d = A.dim();
    LatticePoint y;
    y.d = d;
    for (int i = 0; i < d; ++i) {
        std::uint64_t acc = 0;
        for (int j = 0; j < d; ++j)
            acc += static_cast<std::uint64_t>(A.at(i, j)) * x.c[static_cast<std::size_t>(j)];
        y.c[static_cast<std::size_t>(i)] = acc; // wraparound is the mod-1 action
    }
    return y;
}

TorusPoint lattice_to_point(const LatticePoint& x) {
    TorusPoint out;
    out.coords.resize(x.d);
    for (int i = 0; i < x.d; ++i)
        out.coords[i] = static_cast<double>(x.c[static_cast<std::size_t>(i)] >> 11) * 0x1.0p-53;
    return out;
}

LatticePoint lattice_from_point(const TorusPoint& x) {
    LatticePoint out;
    out.d = x.dim();
    for (int i = 0; i < out.d; ++i)
        out.c[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(x.coords[i] * 0x1.0p64);
    return out;
}

namespace {

// Diagonalize M by unimodular row and column operations: S = U * M * V.
// Only V is tracked; solutions of M x in Z^d are x = V z with z_i = k_i / s_i.
struct Diagonalized {
    std::vector<BigInt> diag;
    std::vector<std::vector<BigInt>> V;
};

Diagonalized diagonalize(const ToralMatrix& M) {
    const int d = M.dim();
    std::vector<std::vector<BigInt>> S(d, std::vector<BigInt>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M.at(i, j);
    std::vector<std::vector<BigInt>> V(d, std::vector<BigInt>(d, 0));
    for (int i = 0; i < d; ++i) V[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;

    auto swap_rows = [&](int a, int b) { std::swap(S[static_cast<std::size_t>(a)], S[static_cast<std::size_t>(b)]); };
    auto swap_cols = [&](int a, int b) {
        for (int i = 0; i < d; ++i) std::swap(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)], S[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]);
        for (int i = 0; i < d; ++i) std::swap(V[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)], V[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]);
    };
    auto add_row = [&](int dst, int src, const BigInt& f) {
        for (int j = 0; j < d; ++j) S[static_cast<std::size_t>(dst)][static_cast<std::size_t>(j)] += f * S[static_cast<std::size_t>(src)][static_cast<std::size_t>(j)];
    };
    auto add_col = [&](int dst, int src, const BigInt& f) {
        for (int i = 0; i < d; ++i) S[static_cast<std::size_t>(i)][static_cast<std::size_t>(dst)] += f * S[static_cast<std::size_t>(i)][static_cast<std::size_t>(src)];
        for (int i = 0; i < d; ++i) V[static_cast<std::size_t>(i)][static_cast<std::size_t>(dst)] += f * V[static_cast<std::size_t>(i)][static_cast<std::size_t>(src)];
    };

    for (int k = 0; k < d; ++k) {
        for (;;) {
            int pi = -1, pj = -1;
            BigInt best = 0;
            for (int i = k; i < d; ++i)
                for (int j = k; j < d; ++j) {
                    BigInt a = abs(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                    if (a != 0 && (pi < 0 || a < best)) {
                        best = a;
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0) throw DegeneracyError("matrix is singular: no fixed-point lattice");
            if (pi != k) swap_rows(pi, k);
            if (pj != k) swap_cols(pj, k);
            bool clean = true;
            const BigInt pivot = S[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
            for (int i = k + 1; i < d; ++i) {
                BigInt q = S[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] / pivot;
                if (q != 0) add_row(i, k, -q);
                if (S[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) clean = false;
            }
            for (int j = k + 1; j < d; ++j) {
                BigInt q = S[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] / pivot;
                if (q != 0) add_col(j, k, -q);
                if (S[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] != 0) clean = false;
            }
            if (clean) break;
        }
    }

    Diagonalized out;
    out.diag.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) out.diag[static_cast<std::size_t>(i)] = abs(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
    out.V = std::move(V);
    return out;
}

Rational frac_part(const Rational& r) {
    BigInt num = numerator(r), den = denominator(r);
    BigInt m = num % den;
    if (m < 0) m += den;
    return Rational(m, den);
}

} // namespace

std::vector<std::vector<Rational>> fixed_points_exact(const ToralMatrix& A) {
    const ToralMatrix M = A.subtract_identity();
    if (M.determinant() == 0) throw DegeneracyError("A - I is singular");
    const int d = A.dim();
    Diagonalized D = diagonalize(M);

    long long count = 1;
    for (const auto& s : D.diag) {
        if (s > 100000) throw NumericError("fixed-point count too large to enumerate");
        count *= static_cast<long long>(s);
        if (count > 100000) throw NumericError("fixed-point count too large to enumerate");
    }

    std::vector<std::vector<Rational>> points;
    points.reserve(static_cast<std::size_t>(count));
    std::vector<long long> k(static_cast<std::size_t>(d), 0);
    for (long long n = 0; n < count; ++n) {
        long long rem = n;
        for (int i = 0; i < d; ++i) {
            long long s = static_cast<long long>(D.diag[static_cast<std::size_t>(i)]);
            k[static_cast<std::size_t>(i)] = rem % s;
            rem /= s;
        }
        std::vector<Rational> x(static_cast<std::size_t>(d), Rational(0));
        for (int i = 0; i < d; ++i) {
            Rational acc = 0;
            for (int j = 0; j < d; ++j)
                acc += Rational(D.V[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)],
                                D.diag[static_cast<std::size_t>(j)]);
            x[static_cast<std::size_t>(i)] = frac_part(acc);
        }
        points.push_back(std::move(x));
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (static_cast<long long>(points.size()) != count)
        throw NumericError("fixed-point enumeration produced duplicates");
    return points;
}

std::vector<TorusPoint> fixed_points(const ToralMatrix& A) {
    auto exact = fixed_points_exact(A);
    std::vector<TorusPoint> out;
    out.reserve(exact.size());
    for (const auto& xr : exact) {
        TorusPoint p;
        p.coords.resize(static_cast<int>(xr.size()));
        for (std::size_t i = 0; i < xr.size(); ++i)
            p.coords[static_cast<int>(i)] = reduce_scalar(static_cast<double>(xr[i]));
        out.push_back(std::move(p));
    }
    for (const auto& p : out) {
        TorusPoint image = apply_linear(A, p);
        if (toral_distance(image, p) > 1e-12)
            throw NumericError("enumerated fixed point fails verification");
    }
    return out;
}

} // namespace manelab
