#include "manelab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace manelab {

namespace {

using RatPoly = std::vector<Rational>; // low degree first, normalized (no high zeros)

void trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

RatPoly derivative(const RatPoly& p) {
    RatPoly d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<int>(k));
    trim(d);
    return d;
}

Rational eval(const RatPoly& p, const Rational& x) {
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Remainder of a by b (b nonzero).
RatPoly remainder(RatPoly a, const RatPoly& b) {
    trim(a);
    while (degree(a) >= degree(b) && !a.empty()) {
        Rational factor = a.back() / b.back();
        int shift = degree(a) - degree(b);
        for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] -= factor * b[k];
        a.pop_back();
        trim(a);
    }
    return a;
}

int sign_of(const Rational& x) {
    if (x > 0) return 1;
    if (x < 0) return -1;
    return 0;
}

} // namespace

IntPolynomial IntPolynomial::from_coeffs(std::vector<long long> c) {
    if (c.size() < 2) throw ArgumentError("polynomial must have degree >= 1");
    if (c.back() != 1) throw ArgumentError("polynomial must be monic (last coefficient 1)");
    return IntPolynomial{std::move(c)};
}

double IntPolynomial::evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + static_cast<double>(*it);
    return acc;
}

double IntPolynomial::derivative_at(double x) const {
    double acc = 0.0;
    for (int k = degree(); k >= 1; --k)
        acc = acc * x + static_cast<double>(k) * static_cast<double>(coeffs[k]);
    return acc;
}

Rational IntPolynomial::evaluate_exact(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double IntPolynomial::root_bound() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs.size(); ++k)
        m = std::max(m, std::abs(static_cast<double>(coeffs[k])));
    return 1.0 + m;
}

SturmChain::SturmChain(const IntPolynomial& p) {
    RatPoly p0(p.coeffs.begin(), p.coeffs.end());
    trim(p0);
    RatPoly p1 = derivative(p0);
    chain_.push_back(p0);
    if (!p1.empty()) chain_.push_back(p1);
    while (chain_.size() >= 2) {
        RatPoly r = remainder(chain_[chain_.size() - 2], chain_.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        chain_.push_back(std::move(r));
    }
    gcd_degree_ = degree(chain_.back());
}

int SturmChain::sign_changes(const Rational& x) const {
    int changes = 0;
    int prev = 0;
    for (const auto& q : chain_) {
        int s = sign_of(eval(q, x));
        if (s != 0) {
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
    }
    return changes;
}

int SturmChain::sign_changes_at_infinity(int direction) const {
    int changes = 0;
    int prev = 0;
    for (const auto& q : chain_) {
        int s = sign_of(q.back());
        if (direction < 0 && degree(q) % 2 == 1) s = -s;
        if (s != 0) {
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
    }
    return changes;
}

int SturmChain::count(const Rational& a, const Rational& b) const {
    return sign_changes(a) - sign_changes(b);
}

int SturmChain::count_all() const {
    return sign_changes_at_infinity(-1) - sign_changes_at_infinity(+1);
}

bool is_squarefree(const IntPolynomial& p) {
    return SturmChain(p).gcd_degree() == 0;
}

namespace {

struct Interval {
    Rational lo, hi;
};

} // namespace

std::vector<double> real_roots(const IntPolynomial& p, double tol) {
    if (!(tol > 0.0) || tol > 1e-6) throw ArgumentError("real_roots: tol must lie in (0, 1e-6]");
    if (p.coeffs.back() != 1) throw ArgumentError("real_roots: polynomial must be monic");

    // Repeated roots would break the single-root bisection below; count on the
    // squarefree structure certified by the chain itself.
    SturmChain chain(p);
    const int total = chain.count_all();
    if (total == 0) return {};

    const double bound_d = p.root_bound();
    const Rational bound(static_cast<long long>(std::ceil(bound_d)) + 1);

    std::vector<Interval> pending{{-bound, bound}};
    std::vector<Interval> isolated;
    // Exact bisection until every interval holds one root.  Width 2^-40 is far
    // below the separation of any admissible system here; the budget guards
    // against clustered roots of non-squarefree inputs.
    int budget = 4096;
    while (!pending.empty()) {
        if (--budget < 0) throw NumericError("real_roots: isolation budget exhausted");
        Interval iv = pending.back();
        pending.pop_back();
        int c = chain.count(iv.lo, iv.hi);
        if (c == 0) continue;
        if (c == 1) {
            isolated.push_back(iv);
            continue;
        }
        Rational mid = (iv.lo + iv.hi) / 2;
        pending.push_back({iv.lo, mid});
        pending.push_back({mid, iv.hi});
    }
    if (static_cast<int>(isolated.size()) != total)
        throw NumericError("real_roots: isolation count mismatch");

    std::vector<double> roots;
    roots.reserve(isolated.size());
    for (auto& iv : isolated) {
        // Shrink the certified bracket, then polish with Newton.
        for (int it = 0; it < 60; ++it) {
            Rational width = iv.hi - iv.lo;
            if (width < Rational(1, 1000000)) break;
            Rational mid = (iv.lo + iv.hi) / 2;
            if (chain.count(iv.lo, mid) == 1)
                iv.hi = mid;
            else
                iv.lo = mid;
        }
        double lo = static_cast<double>(iv.lo);
        double hi = static_cast<double>(iv.hi);
        double x = 0.5 * (lo + hi);
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            double f = p.evaluate(x);
            double df = p.derivative_at(x);
            if (df == 0.0) break;
            double step = f / df;
            double next = x - step;
            if (next < lo - 1.0 || next > hi + 1.0) break; // Newton escaped; fall back
            x = next;
            if (std::abs(step) < 0.25 * tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            // Plain double bisection on the sign of p.
            double flo = p.evaluate(lo);
            for (int it = 0; it < 200 && hi - lo > 0.5 * tol; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = p.evaluate(mid);
                if ((flo <= 0.0) == (fm <= 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            x = 0.5 * (lo + hi);
            if (hi - lo > tol) throw NumericError("real_roots: bisection failed to converge");
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::optional<Rational> nearest_small_rational(double x, long long max_den, double tol) {
    // Continued-fraction convergents of x; stop once denominators pass max_den.
    double frac = x;
    long long p_prev = 1, q_prev = 0;
    long long p_cur = static_cast<long long>(std::floor(frac)), q_cur = 1;
    if (std::abs(x - static_cast<double>(p_cur)) <= tol) return Rational(p_cur);
    for (int it = 0; it < 64; ++it) {
        double rem = frac - std::floor(frac);
        if (rem < 1e-18) break;
        frac = 1.0 / rem;
        long long a = static_cast<long long>(std::floor(frac));
        long long p_next = a * p_cur + p_prev;
        long long q_next = a * q_cur + q_prev;
        if (q_next > max_den || q_next <= 0) break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if (std::abs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur)) <= tol)
            return Rational(p_cur, q_cur);
    }
    return std::nullopt;
}

bool near_small_rational(double x, long long max_den, double tol) {
    return nearest_small_rational(x, max_den, tol).has_value();
}

} // namespace manelab
