#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "manelab/config.hpp"
#include "manelab/ergodic.hpp"
#include "manelab/mane.hpp"
#include "manelab/poly.hpp"
#include "manelab/semiconj.hpp"
#include "manelab/shadowing.hpp"
#include "manelab/spectral.hpp"
#include "manelab/torus.hpp"

namespace py = pybind11;
using namespace manelab;

namespace {

TorusPoint to_point(const std::vector<double>& v) {
    VecD x(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
    return reduce(x);
}

std::vector<double> from_point(const TorusPoint& p) {
    std::vector<double> out(static_cast<std::size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i) out[static_cast<std::size_t>(i)] = p.coords[i];
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deformed toral automorphisms: construction, factor map, and ergodic checks";

    py::register_exception<Error>(m, "Error");

    py::class_<ToralMatrix>(m, "ToralMatrix")
        .def_static("from_rows", &ToralMatrix::from_rows)
        .def("dim", &ToralMatrix::dim)
        .def("entry", [](const ToralMatrix& a, int i, int j) { return a.at(i, j); })
        .def("determinant",
             [](const ToralMatrix& a) { return a.determinant().convert_to<long long>(); })
        .def("char_poly",
             [](const ToralMatrix& a) { return a.characteristic_polynomial().coeffs; })
        .def("__repr__", [](const ToralMatrix& a) {
            return "<ToralMatrix dim=" + std::to_string(a.dim()) + ">";
        });

    m.def("make_system", [](const std::vector<long long>& coeffs, int power) {
        return matrix_power(companion_matrix(IntPolynomial::from_coeffs(coeffs)), power);
    }, py::arg("coeffs"), py::arg("power") = 1,
       "Companion matrix of a monic integer polynomial, raised to a power");

    m.def("search_polynomials", [](int d, long long bound) {
        std::vector<std::vector<long long>> out;
        for (const IntPolynomial& p : search_admissible_polynomials(d, bound))
            out.push_back(p.coeffs);
        return out;
    }, py::arg("d"), py::arg("coeff_bound"));

    py::class_<SpectralData>(m, "SpectralData")
        .def_readonly("eigenvalues", &SpectralData::eigenvalues)
        .def_readonly("entropy_exact", &SpectralData::entropy_exact)
        .def_readonly("condition_number", &SpectralData::condition_number)
        .def_property_readonly("lambda_c", &SpectralData::lambda_c);

    m.def("spectral_data", [](const ToralMatrix& a) { return spectral_data(a); }, py::arg("A"));

    m.def("fixed_points", [](const ToralMatrix& a) {
        std::vector<std::vector<double>> out;
        for (const TorusPoint& p : fixed_points(a)) out.push_back(from_point(p));
        return out;
    }, py::arg("A"));

    py::class_<ShadowingConstants>(m, "ShadowingConstants")
        .def_readonly("kappa", &ShadowingConstants::kappa)
        .def_readonly("expansivity", &ShadowingConstants::expansivity);
    m.def("shadowing_constants", &shadowing_constants, py::arg("S"));

    py::class_<ManeParams>(m, "ManeParams")
        .def_readwrite("rho", &ManeParams::rho)
        .def_readwrite("b", &ManeParams::b)
        .def_readwrite("tau", &ManeParams::tau)
        .def_readwrite("sigma_perp", &ManeParams::sigma_perp)
        .def_readwrite("gamma", &ManeParams::gamma);

    m.def("default_params", [](const SpectralData& S, const std::vector<double>& q, double rho,
                               double b, double tau_fraction, double gamma) {
        return default_params(S, to_point(q), rho, b, tau_fraction, gamma);
    }, py::arg("S"), py::arg("q"), py::arg("rho") = 0.05, py::arg("b") = 0.5,
       py::arg("tau_fraction") = 0.12, py::arg("gamma") = 0.0);

    py::class_<ManeMap>(m, "ManeMap")
        .def("apply", [](const ManeMap& g, const std::vector<double>& x) {
            return from_point(g.apply(to_point(x)));
        })
        .def("apply_inverse", [](const ManeMap& g, const std::vector<double>& x) {
            return from_point(g.apply_inverse(to_point(x)));
        })
        .def("center_stretch", [](const ManeMap& g, const std::vector<double>& x) {
            return g.center_stretch(to_point(x));
        })
        .def("in_support", [](const ManeMap& g, const std::vector<double>& x) {
            return g.in_support(to_point(x));
        })
        .def_property_readonly("q", [](const ManeMap& g) { return from_point(TorusPoint{g.q()}); })
        .def_property_readonly("params", &ManeMap::params);

    m.def("build_mane_map", &build_mane_map, py::arg("A"), py::arg("S"), py::arg("params"));

    m.def("center_profile_fixed_points", [](const ManeMap& g) {
        std::vector<std::vector<double>> out;
        for (const TorusPoint& p : center_profile_fixed_points(g)) out.push_back(from_point(p));
        return out;
    }, py::arg("g"));

    py::class_<MeasureStats>(m, "MeasureStats")
        .def_readonly("m", &MeasureStats::m)
        .def_readonly("inequality_value", &MeasureStats::inequality_value)
        .def_readonly("slack_sigma", &MeasureStats::slack_sigma);
    m.def("ball_measure_and_inequality", &ball_measure_and_inequality, py::arg("S"),
          py::arg("params"), py::arg("radius"));

    py::class_<FiberEstimate>(m, "FiberEstimate")
        .def_readonly("length", &FiberEstimate::length)
        .def_readonly("t_minus", &FiberEstimate::t_minus)
        .def_readonly("t_plus", &FiberEstimate::t_plus)
        .def_readonly("window", &FiberEstimate::window)
        .def_property_readonly("midpoint", [](const FiberEstimate& f) {
            return from_point(f.midpoint);
        });

    py::class_<FiberReport>(m, "FiberReport")
        .def_readonly("lengths_under_iteration", &FiberReport::lengths_under_iteration)
        .def_readonly("cover_counts", &FiberReport::cover_counts)
        .def_readonly("cover_slope", &FiberReport::cover_slope);

    py::class_<SemiconjugacyEvaluator>(m, "SemiconjugacyEvaluator")
        .def(py::init<ManeMap, int>(), py::arg("g"), py::arg("window"))
        .def("pi", [](const SemiconjugacyEvaluator& E, const std::vector<double>& x) {
            return from_point(E.pi_point(to_point(x)));
        })
        .def("window", &SemiconjugacyEvaluator::window)
        .def("eps_chain", &SemiconjugacyEvaluator::eps_chain)
        .def("delta", &SemiconjugacyEvaluator::delta)
        .def("defect_bound", &SemiconjugacyEvaluator::defect_bound);

    m.def("semiconjugacy_defect", &semiconjugacy_defect, py::arg("E"), py::arg("samples"),
          py::arg("seed"));

    m.def("fiber_segment", [](const SemiconjugacyEvaluator& E, const std::vector<double>& x,
                              double tol) { return fiber_segment(E, to_point(x), tol); },
          py::arg("E"), py::arg("x"), py::arg("tol"));

    m.def("fiber_iterate_lengths", &fiber_iterate_lengths, py::arg("E"), py::arg("fiber"),
          py::arg("n_max"), py::arg("cover_eps") = 1e-3, py::arg("cover_n") = 120);

    m.def("invert_pi", [](const SemiconjugacyEvaluator& E, const std::vector<double>& target,
                          double tol) { return from_point(invert_pi(E, to_point(target), tol)); },
          py::arg("E"), py::arg("target"), py::arg("tol"));

    py::class_<EntropyEstimate>(m, "EntropyEstimate")
        .def_readonly("counts", &EntropyEstimate::counts)
        .def_readonly("per_eps_slopes", &EntropyEstimate::per_eps_slopes)
        .def_readonly("slope", &EntropyEstimate::slope)
        .def_readonly("saturation_warning", &EntropyEstimate::saturation_warning);

    m.def("entropy_linear", [](const ToralMatrix& A, const std::vector<double>& eps,
                               const std::vector<int>& ns, long long samples, std::uint64_t seed) {
        auto map = [A](const TorusPoint& x) { return apply_linear(A, x); };
        return entropy_estimate(map, A.dim(), eps, ns, samples, seed);
    }, py::arg("A"), py::arg("eps"), py::arg("n"), py::arg("samples"), py::arg("seed"));

    m.def("entropy_deformed", [](const ManeMap& g, const std::vector<double>& eps,
                                 const std::vector<int>& ns, long long samples,
                                 std::uint64_t seed) {
        auto map = [g](const TorusPoint& x) { return g.apply(x); };
        return entropy_estimate(map, g.matrix().dim(), eps, ns, samples, seed);
    }, py::arg("g"), py::arg("eps"), py::arg("n"), py::arg("samples"), py::arg("seed"));

    py::class_<BirkhoffResult>(m, "BirkhoffResult")
        .def_readonly("n", &BirkhoffResult::n)
        .def_readonly("average", &BirkhoffResult::average)
        .def_readonly("target_m", &BirkhoffResult::target_m);

    m.def("birkhoff_lattice", [](const ToralMatrix& A, const std::vector<double>& q, double radius,
                                 long long n, std::uint64_t seed) {
        return birkhoff_indicator_average(A, to_point(q), radius, n, seed);
    }, py::arg("A"), py::arg("q"), py::arg("radius"), py::arg("n"), py::arg("seed"));

    m.def("birkhoff_exact", [](const ToralMatrix& A,
                               const std::vector<std::pair<long long, long long>>& start,
                               const std::vector<double>& q, double radius, long long n) {
        std::vector<Rational> s;
        for (const auto& [num, den] : start) s.emplace_back(num, den);
        return birkhoff_indicator_average(A, s, to_point(q), radius, n);
    }, py::arg("A"), py::arg("start"), py::arg("q"), py::arg("radius"), py::arg("n"));

    m.def("birkhoff_deformed", [](const ManeMap& g, const std::vector<double>& start,
                                  const std::vector<double>& q, double radius, long long n) {
        return birkhoff_indicator_average(g, to_point(start), to_point(q), radius, n);
    }, py::arg("g"), py::arg("start"), py::arg("q"), py::arg("radius"), py::arg("n"));

    py::class_<CenterExpansionReport>(m, "CenterExpansionReport")
        .def_readonly("exponent", &CenterExpansionReport::exponent)
        .def_readonly("lower_bound", &CenterExpansionReport::lower_bound)
        .def_readonly("slack_sigma", &CenterExpansionReport::slack_sigma);

    m.def("center_expansion_exponent", [](const ManeMap& g, const std::vector<double>& x,
                                          long long n, double sigma) {
        return center_expansion_exponent(g, to_point(x), n, sigma);
    }, py::arg("g"), py::arg("x"), py::arg("n"), py::arg("sigma") = -1.0);

    m.def("sample_mme", [](const SemiconjugacyEvaluator& E, long long count, std::uint64_t seed) {
        MmeSample s = sample_mme(E, count, seed);
        std::vector<std::vector<double>> pts;
        for (const TorusPoint& p : s.points) pts.push_back(from_point(p));
        return py::make_tuple(pts, s.resample_count);
    }, py::arg("E"), py::arg("count"), py::arg("seed"));

    m.def("ks_uniform", &ks_uniform, py::arg("values"));
}
