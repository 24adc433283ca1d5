#include "manelab/ergodic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "manelab/parallel.hpp"
#include "manelab/rng.hpp"

namespace manelab {

namespace {

struct LineFit {
    double slope = 0.0;
    double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return f;
    f.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (intercept + f.slope * xs[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

double fit_intercept(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return sy / n;
    const double slope = (n * sxy - sx * sy) / denom;
    return (sy - slope * sx) / n;
}

// Greedy maximal separated net (hence a spanning net) in the Bowen metric
// over a cached orbit table.  Candidate neighbors are bucketed by the pair
// (time-0 cell, time-n cell) of an eps-wide grid; a point within Bowen
// distance eps must lie in one of the 3^d x 3^d adjacent pairs.  The greedy
// result depends only on the sample order, never on the bucket layout.
long long build_net(const std::vector<float>& orbits, long long sample_size, int d, double eps,
                    int n) {
    const int C = std::max(1, static_cast<int>(std::floor(1.0 / eps)));
    const float eps2 = static_cast<float>(eps * eps);
    const auto at = [&](int k, long long i) {
        return &orbits[(static_cast<std::size_t>(k) * static_cast<std::size_t>(sample_size) +
                        static_cast<std::size_t>(i)) *
                       static_cast<std::size_t>(d)];
    };
    const auto blocked_by = [&](long long i, long long j) {
        // true iff d_n(i, j) <= eps
        for (int k = n; k >= 0; --k) { // later times separate fastest
            const float* a = at(k, i);
            const float* b = at(k, j);
            float dist2 = 0.0f;
            for (int c = 0; c < d; ++c) {
                float u = std::fabs(a[c] - b[c]);
                if (u > 0.5f) u = 1.0f - u;
                dist2 += u * u;
            }
            if (dist2 > eps2) return false;
        }
        return true;
    };

    const auto cell_of = [&](float v) {
        int idx = static_cast<int>(v * static_cast<float>(C));
        return std::min(C - 1, std::max(0, idx));
    };
    long long cells_per_chart = 1;
    for (int c = 0; c < d; ++c) cells_per_chart *= C;
    const int combos = static_cast<int>(std::pow(3.0, d) + 0.5);

    // Flat pair-indexed buckets when the table fits; otherwise a hash map.
    const bool flat = cells_per_chart * cells_per_chart <= (1 << 24);
    std::vector<std::vector<std::int32_t>> table(
        flat ? static_cast<std::size_t>(cells_per_chart * cells_per_chart) : 0);
    std::unordered_map<long long, std::vector<std::int32_t>> sparse;
    if (!flat) sparse.reserve(1 << 16);
    const auto bucket_at = [&](long long pair) -> std::vector<std::int32_t>* {
        if (flat) {
            auto& b = table[static_cast<std::size_t>(pair)];
            return b.empty() ? nullptr : &b;
        }
        auto it = sparse.find(pair);
        return it == sparse.end() ? nullptr : &it->second;
    };

    std::vector<long long> idx0(static_cast<std::size_t>(combos));
    std::vector<long long> idxn(static_cast<std::size_t>(combos));
    std::vector<int> cells(static_cast<std::size_t>(d));
    long long net_size = 0;

    for (long long i = 0; i < sample_size; ++i) {
        for (int half = 0; half < 2; ++half) {
            const float* pt = at(half == 0 ? 0 : n, i);
            for (int c = 0; c < d; ++c) cells[static_cast<std::size_t>(c)] = cell_of(pt[c]);
            auto& out = half == 0 ? idx0 : idxn;
            for (int combo = 0; combo < combos; ++combo) {
                long long key = 0;
                int rest = combo;
                for (int c = 0; c < d; ++c) {
                    int off = rest % 3 - 1;
                    rest /= 3;
                    key = key * C + (cells[static_cast<std::size_t>(c)] + off + C) % C;
                }
                out[static_cast<std::size_t>(combo)] = key;
            }
        }

        bool blocked = false;
        for (int a = 0; a < combos && !blocked; ++a) {
            const long long base = idx0[static_cast<std::size_t>(a)] * cells_per_chart;
            for (int b = 0; b < combos && !blocked; ++b) {
                const std::vector<std::int32_t>* bucket =
                    bucket_at(base + idxn[static_cast<std::size_t>(b)]);
                if (!bucket) continue;
                for (std::int32_t j : *bucket)
                    if (blocked_by(i, j)) {
                        blocked = true;
                        break;
                    }
            }
        }
        if (!blocked) {
            // digits-all-1 combo is the zero offset, i.e. the home cell
            int home = 0, pow3 = 1;
            for (int c = 0; c < d; ++c) {
                home += pow3;
                pow3 *= 3;
            }
            const long long pair = idx0[static_cast<std::size_t>(home)] * cells_per_chart +
                                   idxn[static_cast<std::size_t>(home)];
            if (flat)
                table[static_cast<std::size_t>(pair)].push_back(static_cast<std::int32_t>(i));
            else
                sparse[pair].push_back(static_cast<std::int32_t>(i));
            ++net_size;
        }
    }
    return net_size;
}

} // namespace

EntropyEstimate entropy_estimate(const std::function<TorusPoint(const TorusPoint&)>& map, int d,
                                 const std::vector<double>& eps_list,
                                 const std::vector<int>& n_list, long long sample_size,
                                 std::uint64_t seed) {
    if (d < 1 || d > 6) throw ArgumentError("dimension must be in [1, 6]");
    if (eps_list.empty() || n_list.empty()) throw ArgumentError("eps and n lists must be nonempty");
    for (double e : eps_list)
        if (!(e >= 0.05)) throw ArgumentError("eps below the supported resolution 0.05");
    for (int n : n_list)
        if (n < 0 || n > 6) throw ArgumentError("n must lie in [0, 6]");
    if (sample_size < 1 || sample_size > 10000000)
        throw ArgumentError("sample_size must lie in [1, 1e7]");

    const int n_max = *std::max_element(n_list.begin(), n_list.end());

    // Shared orbit cache in float32: depths 0..n_max for every sample.
    std::vector<float> orbits(static_cast<std::size_t>(n_max + 1) *
                              static_cast<std::size_t>(sample_size) * static_cast<std::size_t>(d));
    const CounterRng rng(seed, 0);
    const std::size_t stride = static_cast<std::size_t>(sample_size) * static_cast<std::size_t>(d);
    parallel_chunks(sample_size, 4096, [&](long long lo, long long hi) {
        VecD v(d);
        for (long long i = lo; i < hi; ++i) {
            for (int c = 0; c < d; ++c)
                v[c] = rng.uniform(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(c));
            TorusPoint x = reduce(v);
            for (int k = 0; k <= n_max; ++k) {
                for (int c = 0; c < d; ++c)
                    orbits[static_cast<std::size_t>(k) * stride +
                           static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                           static_cast<std::size_t>(c)] = static_cast<float>(x.coords[c]);
                if (k < n_max) x = map(x);
            }
        }
    });

    EntropyEstimate est;
    est.eps_list = eps_list;
    est.n_list = n_list;
    est.sample_size = sample_size;
    est.counts.assign(eps_list.size(), std::vector<long long>(n_list.size(), 0));

    struct Cell {
        std::size_t ei, ni;
    };
    std::vector<Cell> cells;
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei)
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) cells.push_back({ei, ni});
    std::atomic<bool> saturated{false};
    parallel_chunks(static_cast<long long>(cells.size()), 1, [&](long long lo, long long hi) {
        for (long long c = lo; c < hi; ++c) {
            const Cell& cell = cells[static_cast<std::size_t>(c)];
            long long s = build_net(orbits, sample_size, d, eps_list[cell.ei], n_list[cell.ni]);
            est.counts[cell.ei][cell.ni] = s;
            if (s == sample_size) saturated = true;
        }
    });
    est.saturation_warning = saturated.load();

    // Per-eps slope over the largest three n, then linear extrapolation to
    // eps -> 0.
    std::vector<std::size_t> order(n_list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return n_list[a] < n_list[b]; });
    const std::size_t use = std::min<std::size_t>(3, order.size());
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        std::vector<double> xs, ys;
        for (std::size_t k = order.size() - use; k < order.size(); ++k) {
            xs.push_back(static_cast<double>(n_list[order[k]]));
            ys.push_back(std::log(static_cast<double>(est.counts[ei][order[k]])));
        }
        LineFit f = fit_line(xs, ys);
        est.per_eps_slopes.push_back(f.slope);
        est.per_eps_residuals.push_back(f.rms);
    }
    if (eps_list.size() == 1) {
        est.slope = est.per_eps_slopes[0];
    } else {
        est.slope = fit_intercept(eps_list, est.per_eps_slopes);
    }
    est.slope = std::max(0.0, est.slope);
    return est;
}

BirkhoffResult birkhoff_indicator_average(const ToralMatrix& A, const TorusPoint& q, double radius,
                                          long long n, std::uint64_t seed) {
    if (n < 1 || n > 100000000) throw ArgumentError("n must lie in [1, 1e8]");
    BirkhoffResult res;
    res.n = n;
    res.radius = radius;
    res.target_m = ball_volume(A.dim(), radius);
    CounterRng rng(seed, 0xb1);
    LatticePoint x;
    x.d = A.dim();
    for (int i = 0; i < x.d; ++i) x.c[static_cast<std::size_t>(i)] = rng.raw(0, static_cast<std::uint64_t>(i));
    const double r2 = radius * radius;
    long long hits = 0;
    for (long long k = 0; k < n; ++k) {
        TorusPoint p = lattice_to_point(x);
        if (nearest_diff(p, q).squaredNorm() <= r2) ++hits;
        x = apply_linear(A, x);
    }
    res.average = static_cast<double>(hits) / static_cast<double>(n);
    return res;
}

BirkhoffResult birkhoff_indicator_average(const ToralMatrix& A, const std::vector<Rational>& start,
                                          const TorusPoint& q, double radius, long long n) {
    if (n < 1 || n > 100000000) throw ArgumentError("n must lie in [1, 1e8]");
    const int d = A.dim();
    if (static_cast<int>(start.size()) != d) throw ArgumentError("start dimension mismatch");
    BirkhoffResult res;
    res.n = n;
    res.radius = radius;
    res.target_m = ball_volume(d, radius);

    // Common denominator; the orbit lives on the (1/den) lattice exactly.
    BigInt den_big = 1;
    for (const auto& r : start) {
        BigInt db = denominator(r);
        den_big = den_big / gcd(den_big, db) * db;
    }
    if (den_big > 1000000) throw ArgumentError("start denominator too large for the exact orbit");
    const long long den = static_cast<long long>(den_big);
    std::vector<long long> num(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        BigInt v = numerator(start[static_cast<std::size_t>(i)]) *
                   (den_big / denominator(start[static_cast<std::size_t>(i)]));
        BigInt m = v % den_big;
        if (m < 0) m += den_big;
        num[static_cast<std::size_t>(i)] = static_cast<long long>(m);
    }

    const double r2 = radius * radius;
    long long hits = 0;
    std::vector<long long> next(static_cast<std::size_t>(d));
    TorusPoint p;
    p.coords.resize(d);
    for (long long k = 0; k < n; ++k) {
        for (int i = 0; i < d; ++i)
            p.coords[i] = static_cast<double>(num[static_cast<std::size_t>(i)]) /
                          static_cast<double>(den);
        if (nearest_diff(p, q).squaredNorm() <= r2) ++hits;
        for (int i = 0; i < d; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < d; ++j)
                acc += static_cast<__int128>(A.at(i, j)) * num[static_cast<std::size_t>(j)];
            long long m = static_cast<long long>(acc % den);
            if (m < 0) m += den;
            next[static_cast<std::size_t>(i)] = m;
        }
        num.swap(next);
    }
    res.average = static_cast<double>(hits) / static_cast<double>(n);
    return res;
}

BirkhoffResult birkhoff_indicator_average(const ManeMap& g, const TorusPoint& start,
                                          const TorusPoint& q, double radius, long long n) {
    if (n < 1 || n > 100000000) throw ArgumentError("n must lie in [1, 1e8]");
    BirkhoffResult res;
    res.n = n;
    res.radius = radius;
    res.target_m = ball_volume(g.spectral().d, radius);
    const double r2 = radius * radius;
    long long hits = 0;
    TorusPoint x = start;
    for (long long k = 0; k < n; ++k) {
        if (nearest_diff(x, q).squaredNorm() <= r2) ++hits;
        x = g.apply(x);
    }
    res.average = static_cast<double>(hits) / static_cast<double>(n);
    return res;
}

CenterExpansionReport center_expansion_exponent(const ManeMap& g, const TorusPoint& x,
                                                long long n, double sigma) {
    if (n < 1000) throw ArgumentError("n must be at least 1000");
    // Kahan summation: at a fixed point the same term repeats n times and
    // naive accumulation would drift by ~n/2 ulps.
    double acc = 0.0, comp = 0.0;
    TorusPoint p = x;
    for (long long k = 0; k < n; ++k) {
        double term = std::log(g.center_stretch(p)) - comp;
        double t = acc + term;
        comp = (t - acc) - term;
        acc = t;
        p = g.apply(p);
    }
    CenterExpansionReport rep;
    rep.exponent = acc / static_cast<double>(n);
    MeasureStats stats =
        ball_measure_and_inequality(g.spectral(), g.params(), 3.0 * g.params().rho);
    CenterExtremes ex = center_derivative_extremes(g, 1000);
    rep.slack_sigma = sigma < 0.0 ? 0.5 * stats.slack_sigma : sigma;
    rep.lower_bound = (1.0 - stats.m - rep.slack_sigma) * std::log(ex.a_g) +
                      (2.0 * stats.m + rep.slack_sigma) * std::log(ex.b_g);
    rep.prefactor_note =
        "finite-orbit prefactor absorbed into the n-step average; only the exponent is asserted";
    return rep;
}

MmeSample sample_mme(const SemiconjugacyEvaluator& E, long long count, std::uint64_t seed) {
    if (count < 1 || count > 100000) throw ArgumentError("count must lie in [1, 1e5]");
    MmeSample out;
    out.seed = seed;
    out.window = E.window();
    out.tolerance = std::max(1e-9, 100.0 * E.defect_bound());
    out.points.reserve(static_cast<std::size_t>(count));
    CounterRng rng(seed, 0x33e);
    const int d = E.spectral().d;
    for (long long i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
            VecD v(d);
            for (int c = 0; c < d; ++c)
                v[c] = rng.uniform(static_cast<std::uint64_t>(i),
                                   static_cast<std::uint64_t>(attempt * 8 + c));
            try {
                out.points.push_back(invert_pi(E, reduce(v), out.tolerance));
                placed = true;
            } catch (const AmbiguityError&) {
                ++out.resample_count;
            }
        }
        if (!placed) throw AnomalyError("resample budget exhausted at sample " + std::to_string(i));
    }
    if (static_cast<double>(out.resample_count) > 0.01 * static_cast<double>(count))
        throw AnomalyError("ambiguous-fiber resample rate above 1%");
    return out;
}

double ks_uniform(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("ks_uniform needs at least one value");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d = std::max(d, values[i] - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - values[i]);
    }
    return d;
}

} // namespace manelab
