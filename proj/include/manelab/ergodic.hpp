#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "manelab/semiconj.hpp"

namespace manelab {

struct EntropyEstimate {
    std::vector<double> eps_list;
    std::vector<int> n_list;
    std::vector<std::vector<long long>> counts; // counts[eps_index][n_index]
    std::vector<double> per_eps_slopes;
    std::vector<double> per_eps_residuals; // rms of the per-eps fit
    double slope = 0.0;                    // extrapolated to eps -> 0
    long long sample_size = 0;
    bool saturation_warning = false;
};

// Greedy separated/spanning net sizes in the Bowen metric over a seeded
// uniform sample, with a least-squares growth slope.  Deterministic for a
// given seed, independent of thread count.
EntropyEstimate entropy_estimate(const std::function<TorusPoint(const TorusPoint&)>& map, int d,
                                 const std::vector<double>& eps_list,
                                 const std::vector<int>& n_list, long long sample_size,
                                 std::uint64_t seed);

struct BirkhoffResult {
    long long n = 0;
    double average = 0.0;
    double target_m = 0.0;
    double radius = 0.0;
};

// Occupation fraction of B(q, radius).  The linear-map variants use exact
// arithmetic (64-bit dyadic lattice for random starts, modular rationals for
// rational starts), since double orbits of an expanding integer matrix lose
// every mantissa bit within a few dozen steps.
BirkhoffResult birkhoff_indicator_average(const ToralMatrix& A, const TorusPoint& q, double radius,
                                          long long n, std::uint64_t seed);
BirkhoffResult birkhoff_indicator_average(const ToralMatrix& A, const std::vector<Rational>& start,
                                          const TorusPoint& q, double radius, long long n);
BirkhoffResult birkhoff_indicator_average(const ManeMap& g, const TorusPoint& start,
                                          const TorusPoint& q, double radius, long long n);

struct CenterExpansionReport {
    double exponent = 0.0;
    double lower_bound = 0.0;
    double slack_sigma = 0.0;
    std::string prefactor_note;
};

// Time average of ln(center stretch) along the forward orbit of x, compared
// against the certified pointwise rate (1-m-sigma) ln a_g + (2m+sigma) ln b_g.
// sigma < 0 selects the default: half the maximal certified slack.
CenterExpansionReport center_expansion_exponent(const ManeMap& g, const TorusPoint& x,
                                                long long n, double sigma = -1.0);

struct MmeSample {
    std::vector<TorusPoint> points;
    std::uint64_t seed = 0;
    int window = 0;
    long long resample_count = 0;
    double tolerance = 0.0;
};

// Pulls seeded uniform points back through the factor map; draws that land on
// an ambiguous fiber are resampled from a per-index stream.
MmeSample sample_mme(const SemiconjugacyEvaluator& E, long long count, std::uint64_t seed);

// Kolmogorov-Smirnov statistic of values against the uniform law on [0,1).
double ks_uniform(std::vector<double> values);

} // namespace manelab
