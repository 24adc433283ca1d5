#pragma once

#include <cstdint>
#include <vector>

#include "manelab/mane.hpp"
#include "manelab/shadowing.hpp"

namespace manelab {

// Center-leaf interval mapping to (within tolerance of) a single point
// downstairs.
struct FiberEstimate {
    TorusPoint base;     // the point downstairs
    TorusPoint midpoint; // the located preimage
    TorusPoint lower;    // midpoint - t_minus * v_c
    TorusPoint upper;    // midpoint + t_plus * v_c
    double t_minus = 0.0;
    double t_plus = 0.0;
    double length = 0.0;
    int window = 0;
    double tolerance = 0.0;
};

// Raised when the preimage is a whole interval rather than a point.
class AmbiguityError : public Error {
public:
    AmbiguityError(const std::string& msg, FiberEstimate fiber)
        : Error(msg), fiber_(std::move(fiber)) {}
    const FiberEstimate& fiber() const { return fiber_; }

private:
    FiberEstimate fiber_;
};

struct FiberReport {
    std::vector<double> lengths_under_iteration; // lengths of g^n(segment)
    double bound_L = 0.0;
    double cover_eps = 0.0;
    std::vector<long long> cover_counts; // dynamical cover counts, n = 1..
    double cover_slope = 0.0;            // least-squares slope of ln(count) vs n
};

// Factor map onto the linear system: the g-orbit of x is a pseudo-orbit for
// the linear map, and pi(x) is the center point of its unique shadowing orbit.
class SemiconjugacyEvaluator {
public:
    SemiconjugacyEvaluator(ManeMap g, int window);

    const ManeMap& map() const { return g_; }
    const SpectralData& spectral() const { return g_.spectral(); }
    int window() const { return N_; }
    const ShadowingConstants& constants() const { return k_; }
    double eps_chain() const { return eps_; }      // certified sup |g - f_A|
    double delta() const { return delta_; }        // kappa * eps_chain
    double defect_bound() const { return defect_bound_; }

    TorusPoint pi_point(const TorusPoint& x) const;

private:
    ManeMap g_;
    int N_;
    ShadowingConstants k_;
    double eps_ = 0.0;
    double delta_ = 0.0;
    double defect_bound_ = 0.0;
};

// Max over seeded samples of d(pi(g x), f_A(pi x)).
double semiconjugacy_defect(const SemiconjugacyEvaluator& E, long long sample_count,
                            std::uint64_t seed);

// Maximal center-leaf interval through invert_pi(x) whose points all map
// within tol of x.
FiberEstimate fiber_segment(const SemiconjugacyEvaluator& E, const TorusPoint& x, double tol);

// Lengths of the iterated segment plus a dynamical cover-count slope of the
// segment itself (zero-entropy check for the fiber).  When the base is a
// fixed point the iteration runs along the invariant center line, so there
// is no round-off blow-up and the window can be long; cover counts stop
// growing once the sample grid has resolved the repelling edge structure,
// and over the default window the log-count slope sits far below any
// exponential rate.
FiberReport fiber_iterate_lengths(const SemiconjugacyEvaluator& E, const FiberEstimate& F,
                                  int n_max, double cover_eps = 1e-3, int cover_n = 120);

// A point y with d(pi(y), target) <= tol; throws AmbiguityError carrying the
// fiber when the preimage is an interval longer than 100 * tol.
TorusPoint invert_pi(const SemiconjugacyEvaluator& E, const TorusPoint& target, double tol);

} // namespace manelab
