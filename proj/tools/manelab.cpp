// Config-driven experiment runner: builds the deformed torus map, checks the
// shadowing semiconjugacy onto its linear factor, and runs the entropy,
// Birkhoff, center-expansion and maximal-measure sampling experiments.
// Reports are a JSON summary plus fixed-schema CSV files; identical
// (config, seed) reproduce identical bytes except for the timings block.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "manelab/config.hpp"
#include "manelab/ergodic.hpp"
#include "manelab/parallel.hpp"
#include "manelab/report.hpp"
#include "manelab/rng.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace manelab;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

struct PendingFile {
    std::string name;
    std::string content;
};

struct Runner {
    ExperimentConfig cfg;
    std::string out_dir = ".";
    bool plot = false;
    bool no_timings = false;

    json summary;
    std::vector<PendingFile> files;
    std::vector<std::string> flushed;

    // Lazily built system objects shared across experiments.
    std::optional<ToralMatrix> B;
    std::optional<SpectralData> S;
    std::vector<TorusPoint> fps;
    std::optional<TorusPoint> q;
    std::optional<ManeMap> g;
    std::optional<SemiconjugacyEvaluator> E;

    void note_timing(const std::string& key, Clock::time_point start) {
        if (no_timings) return;
        summary["timings"][key + "_seconds"] =
            std::chrono::duration<double>(Clock::now() - start).count();
    }

    void add_csv(const std::string& name, const CsvTable& table, const std::string& using_spec,
                 const std::string& xlabel, const std::string& ylabel) {
        files.push_back({name, table.text()});
        if (plot) {
            std::string base = name.substr(0, name.rfind('.'));
            files.push_back({base + ".gnuplot", plot_script(name, using_spec, xlabel, ylabel)});
        }
    }

    void flush() {
        files.push_back({"summary.json", summary.dump(2) + "\n"});
        std::filesystem::create_directories(out_dir);
        for (const auto& f : files) {
            std::string path = (std::filesystem::path(out_dir) / f.name).string();
            write_text_file(path, f.content);
            flushed.push_back(path);
        }
    }

    void remove_flushed() {
        std::error_code ec;
        for (const auto& p : flushed) std::filesystem::remove(p, ec);
    }
};

ToralMatrix system_matrix(const ExperimentConfig& cfg) {
    ToralMatrix C = companion_matrix(IntPolynomial::from_coeffs(cfg.poly));
    return cfg.power == 1 ? C : matrix_power(C, cfg.power);
}

void ensure_system(Runner& R) {
    if (R.S) return;
    R.B = system_matrix(R.cfg);
    R.S = spectral_data(*R.B);

    json sys;
    sys["version"] = kVersion;
    sys["poly"] = R.cfg.poly;
    sys["power"] = R.cfg.power;
    sys["dim"] = R.B->dim();
    std::vector<std::vector<long long>> rows;
    for (int i = 0; i < R.B->dim(); ++i) {
        std::vector<long long> row;
        for (int j = 0; j < R.B->dim(); ++j) row.push_back(R.B->at(i, j));
        rows.push_back(std::move(row));
    }
    sys["matrix"] = rows;
    sys["seed"] = R.cfg.seed;
    R.summary["system"] = sys;

    ShadowingConstants K = shadowing_constants(*R.S);
    json c;
    c["eigenvalues"] = R.S->eigenvalues;
    c["entropy_exact"] = R.S->entropy_exact;
    c["condition_number"] = R.S->condition_number;
    c["kappa"] = K.kappa;
    c["expansivity"] = K.expansivity;
    R.summary["constants"] = c;
}

void ensure_map(Runner& R) {
    ensure_system(R);
    if (R.g) return;
    R.fps = fixed_points(*R.B);
    if (R.cfg.q_index >= static_cast<int>(R.fps.size()))
        throw ConfigError("[mane] q_index " + std::to_string(R.cfg.q_index) +
                          " out of range: the system has " + std::to_string(R.fps.size()) +
                          " fixed points");
    R.q = R.fps[static_cast<std::size_t>(R.cfg.q_index)];
    ManeParams params = default_params(*R.S, *R.q, R.cfg.rho, R.cfg.b, R.cfg.tau_fraction,
                                       R.cfg.gamma);
    if (R.cfg.gamma > 0.0) params = jitter_params(params, R.cfg.seed);
    R.g = build_mane_map(*R.B, *R.S, params);

    MeasureStats ms = ball_measure_and_inequality(*R.S, params, 3.0 * params.rho);
    auto pf = center_profile_fixed_points(*R.g);
    json& c = R.summary["constants"];
    c["rho"] = params.rho;
    c["b"] = params.b;
    c["tau"] = params.tau;
    c["sigma_perp"] = params.sigma_perp;
    c["m"] = ms.m;
    c["inequality_value"] = ms.inequality_value;
    c["slack_sigma"] = ms.slack_sigma;
    c["t_star"] = toral_distance(pf[2], *R.q);
    c["q"] = std::vector<double>(R.q->coords.begin(), R.q->coords.end());
}

void ensure_evaluator(Runner& R) {
    ensure_map(R);
    if (R.E) return;
    R.E.emplace(*R.g, R.cfg.window);
    json& c = R.summary["constants"];
    c["window"] = R.E->window();
    c["eps_chain"] = R.E->eps_chain();
    c["delta"] = R.E->delta();
    c["defect_bound"] = R.E->defect_bound();
}

TorusPoint random_point(const CounterRng& rng, int d, std::uint64_t index) {
    VecD v(d);
    for (int c = 0; c < d; ++c) v[c] = rng.uniform(index, static_cast<std::uint64_t>(c));
    return reduce(v);
}

void run_search(Runner& R, int dim, long long bound) {
    auto t0 = Clock::now();
    auto polys = search_admissible_polynomials(dim, bound);
    json res;
    res["dim"] = dim;
    res["bound"] = bound;
    res["count"] = polys.size();
    std::vector<std::vector<long long>> list;
    for (const auto& p : polys) list.push_back(p.coeffs);
    res["polynomials"] = list;
    R.summary["results"]["search"] = res;
    R.note_timing("search", t0);
}

void run_spectral(Runner& R) {
    auto t0 = Clock::now();
    ensure_system(R);
    double sum_unstable = 0.0;
    for (double lam : R.S->eigenvalues)
        if (lam > 1.0) sum_unstable += std::log(lam);
    json res;
    res["eigenvalues"] = R.S->eigenvalues;
    res["entropy"] = R.S->entropy_exact;
    res["sum_log_unstable"] = sum_unstable;
    res["fixed_point_count"] = fixed_points(*R.B).size();
    R.summary["results"]["spectral"] = res;
    R.note_timing("spectral", t0);
}

void run_build(Runner& R) {
    auto t0 = Clock::now();
    ensure_map(R);
    auto pf = center_profile_fixed_points(*R.g);
    CenterExtremes ex = center_derivative_extremes(*R.g, 1000);
    json res;
    res["stretch_at_q"] = R.g->center_stretch(*R.q);
    json pitch = json::array();
    for (const auto& p : pf) {
        json row;
        row["point"] = std::vector<double>(p.coords.begin(), p.coords.end());
        row["stretch"] = R.g->center_stretch(p);
        pitch.push_back(row);
    }
    res["pitchfork"] = pitch;
    res["a_g"] = ex.a_g;
    res["b_g"] = ex.b_g;
    R.summary["results"]["build"] = res;
    R.note_timing("build", t0);
}

void run_shadow(Runner& R) {
    auto t0 = Clock::now();
    ensure_system(R);
    ShadowingConstants K = shadowing_constants(*R.S);
    CounterRng rng(R.cfg.seed, 0x5a);
    const int d = R.B->dim();
    const int len = R.cfg.window;
    double max_delta = 0.0, max_eps = 0.0;
    long long violations = 0;
    for (long long s = 0; s < R.cfg.shadow_samples; ++s) {
        std::vector<TorusPoint> pts{random_point(rng, d, s * (len + 1))};
        for (int j = 0; j < len; ++j) {
            TorusPoint nx = apply_linear(*R.B, pts.back());
            VecD w = nx.coords;
            for (int c = 0; c < d; ++c)
                w[c] += rng.symmetric(R.cfg.noise, s * (len + 1) + 1 + j,
                                      static_cast<std::uint64_t>(c));
            pts.push_back(reduce(w));
        }
        PseudoOrbit po = PseudoOrbit::from_points(pts, *R.B);
        ShadowingResult sr = shadow(po, *R.S, 0);
        max_delta = std::max(max_delta, sr.delta_realized);
        max_eps = std::max(max_eps, po.epsilon);
        if (sr.delta_realized > K.kappa * po.epsilon + sr.truncation_bound + 1e-12) ++violations;
    }
    // noiseless control: the bound must be met with delta exactly zero
    std::vector<TorusPoint> pts{random_point(rng, d, 0)};
    for (int j = 0; j < len; ++j) pts.push_back(apply_linear(*R.B, pts.back()));
    ShadowingResult sr0 = shadow(PseudoOrbit::from_points(pts, *R.B), *R.S, 0);
    json res;
    res["samples"] = R.cfg.shadow_samples;
    res["orbit_length"] = len;
    res["noise"] = R.cfg.noise;
    res["max_epsilon"] = max_eps;
    res["max_delta_realized"] = max_delta;
    res["bound_violations"] = violations;
    res["noiseless_delta"] = sr0.delta_realized;
    R.summary["results"]["shadow"] = res;
    R.note_timing("shadow", t0);
}

void run_pi(Runner& R) {
    auto t0 = Clock::now();
    ensure_evaluator(R);
    CounterRng rng(R.cfg.seed, 0x91);
    const int d = R.B->dim();
    CsvTable csv("sample_id,defect");
    double max_defect = 0.0, max_disp = 0.0;
    for (long long s = 0; s < R.cfg.shadow_samples; ++s) {
        TorusPoint x = random_point(rng, d, s);
        TorusPoint px = R.E->pi_point(x);
        TorusPoint lhs = R.E->pi_point(R.g->apply(x));
        TorusPoint rhs = apply_linear(*R.B, px);
        double defect = toral_distance(lhs, rhs);
        max_defect = std::max(max_defect, defect);
        max_disp = std::max(max_disp, toral_distance(px, x));
        csv.add({std::to_string(s), format_double(defect)});
    }
    R.add_csv("defect.csv", csv, "1:2", "sample", "defect");
    json res;
    res["samples"] = R.cfg.shadow_samples;
    res["max_defect"] = max_defect;
    res["defect_bound"] = R.E->defect_bound();
    res["max_displacement"] = max_disp;
    res["delta"] = R.E->delta();
    R.summary["results"]["pi"] = res;
    R.note_timing("pi", t0);
}

void run_fibers(Runner& R) {
    auto t0 = Clock::now();
    ensure_evaluator(R);
    CounterRng rng(R.cfg.seed, 0xf1);
    const int d = R.B->dim();
    const double tol = std::max(R.cfg.fiber_tol / 10.0, 10.0 * R.E->defect_bound());
    CsvTable csv("x1,x2,x3,length,window");
    double max_random = 0.0;
    for (int s = 0; s < R.cfg.birkhoff_starts; ++s) {
        TorusPoint x = random_point(rng, d, static_cast<std::uint64_t>(s));
        FiberEstimate f = fiber_segment(R.E.value(), x, tol);
        max_random = std::max(max_random, f.length);
        csv.add({format_double(x.coords[0]), format_double(x.coords[1]),
                 format_double(x.coords[2]), format_double(f.length),
                 std::to_string(f.window)});
    }
    FiberEstimate fq = fiber_segment(R.E.value(), *R.q, tol);
    csv.add({format_double(R.q->coords[0]), format_double(R.q->coords[1]),
             format_double(R.q->coords[2]), format_double(fq.length),
             std::to_string(fq.window)});
    R.add_csv("fibers.csv", csv, "4", "fiber", "length");
    FiberReport it = fiber_iterate_lengths(R.E.value(), fq, 8);
    json res;
    res["random_fibers"] = R.cfg.birkhoff_starts;
    res["max_random_length"] = max_random;
    res["q_fiber_length"] = fq.length;
    res["two_t_star"] = 2.0 * R.summary["constants"]["t_star"].get<double>();
    res["iterate_lengths"] = it.lengths_under_iteration;
    res["cover_counts"] = it.cover_counts;
    res["cover_slope"] = it.cover_slope;
    R.summary["results"]["fibers"] = res;
    R.note_timing("fibers", t0);
}

void run_entropy(Runner& R) {
    auto t0 = Clock::now();
    ensure_map(R);
    const ToralMatrix& B = *R.B;
    const ManeMap& g = *R.g;
    auto fa = [&B](const TorusPoint& x) { return apply_linear(B, x); };
    auto gm = [&g](const TorusPoint& x) { return g.apply(x); };
    EntropyEstimate eg = entropy_estimate(gm, B.dim(), R.cfg.entropy_eps, R.cfg.entropy_n,
                                          R.cfg.entropy_samples, R.cfg.seed);
    EntropyEstimate el = entropy_estimate(fa, B.dim(), R.cfg.entropy_eps, R.cfg.entropy_n,
                                          R.cfg.entropy_samples, R.cfg.seed);
    auto emit = [&](const char* name, const EntropyEstimate& e) {
        CsvTable csv("eps,n,count");
        for (std::size_t i = 0; i < e.eps_list.size(); ++i)
            for (std::size_t j = 0; j < e.n_list.size(); ++j)
                csv.add({format_double(e.eps_list[i]), std::to_string(e.n_list[j]),
                         std::to_string(e.counts[i][j])});
        R.add_csv(name, csv, "2:(log($3))", "n", "ln count");
    };
    emit("entropy.csv", eg);
    emit("entropy_linear.csv", el);
    auto block = [](const EntropyEstimate& e) {
        json b;
        b["slope"] = e.slope;
        b["per_eps_slopes"] = e.per_eps_slopes;
        b["per_eps_residuals"] = e.per_eps_residuals;
        b["saturation_warning"] = e.saturation_warning;
        return b;
    };
    json res;
    res["samples"] = R.cfg.entropy_samples;
    res["deformed"] = block(eg);
    res["linear"] = block(el);
    res["slope_difference"] = eg.slope - el.slope;
    res["entropy_exact"] = R.S->entropy_exact;
    R.summary["results"]["entropy"] = res;
    R.note_timing("entropy", t0);
}

void run_birkhoff(Runner& R) {
    auto t0 = Clock::now();
    ensure_map(R);
    CsvTable csv("start_id,n,average,target_m");
    json averages = json::array();
    for (int s = 0; s < R.cfg.birkhoff_starts; ++s) {
        BirkhoffResult br = birkhoff_indicator_average(
            *R.B, *R.q, R.cfg.birkhoff_radius, R.cfg.birkhoff_n,
            R.cfg.seed + 1000003ull * static_cast<std::uint64_t>(s));
        csv.add({std::to_string(s), std::to_string(br.n), format_double(br.average),
                 format_double(br.target_m)});
        averages.push_back(br.average);
    }
    // distinguished starts: the exact rational fixed point under the linear
    // map, then the same point under the deformed map
    auto exact = fixed_points_exact(*R.B);
    BirkhoffResult bq = birkhoff_indicator_average(
        *R.B, exact[static_cast<std::size_t>(R.cfg.q_index)], *R.q, R.cfg.birkhoff_radius,
        R.cfg.birkhoff_n);
    csv.add({std::to_string(R.cfg.birkhoff_starts), std::to_string(bq.n),
             format_double(bq.average), format_double(bq.target_m)});
    BirkhoffResult bg = birkhoff_indicator_average(*R.g, *R.q, *R.q, R.cfg.birkhoff_radius,
                                                   R.cfg.birkhoff_n);
    csv.add({std::to_string(R.cfg.birkhoff_starts + 1), std::to_string(bg.n),
             format_double(bg.average), format_double(bg.target_m)});
    R.add_csv("birkhoff.csv", csv, "1:3", "start", "average");
    json res;
    res["n"] = R.cfg.birkhoff_n;
    res["radius"] = R.cfg.birkhoff_radius;
    res["target_m"] = bq.target_m;
    res["random_start_averages"] = averages;
    res["fixed_start_average_linear"] = bq.average;
    res["fixed_start_average_deformed"] = bg.average;
    R.summary["results"]["birkhoff"] = res;
    R.note_timing("birkhoff", t0);
}

void run_exponent(Runner& R) {
    auto t0 = Clock::now();
    ensure_map(R);
    CounterRng rng(R.cfg.seed, 0xe1);
    const int d = R.B->dim();
    const long long n = std::max<long long>(1000, R.cfg.birkhoff_n);
    CsvTable csv("sample_id,n,exponent,lower_bound");
    double min_exp = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    for (int s = 0; s < R.cfg.birkhoff_starts; ++s) {
        TorusPoint x = random_point(rng, d, static_cast<std::uint64_t>(s));
        CenterExpansionReport ce = center_expansion_exponent(*R.g, x, n);
        min_exp = std::min(min_exp, ce.exponent);
        lower = ce.lower_bound;
        csv.add({std::to_string(s), std::to_string(n), format_double(ce.exponent),
                 format_double(ce.lower_bound)});
    }
    CenterExpansionReport cq = center_expansion_exponent(*R.g, *R.q, n);
    csv.add({std::to_string(R.cfg.birkhoff_starts), std::to_string(n),
             format_double(cq.exponent), format_double(cq.lower_bound)});
    R.add_csv("exponent.csv", csv, "1:3", "start", "exponent");
    json res;
    res["n"] = n;
    res["min_random_exponent"] = min_exp;
    res["lower_bound"] = lower;
    res["exponent_at_q"] = cq.exponent;
    res["log_b"] = std::log(R.cfg.b);
    R.summary["results"]["exponent"] = res;
    R.note_timing("exponent", t0);
}

void run_mme(Runner& R) {
    auto t0 = Clock::now();
    ensure_evaluator(R);
    MmeSample mm = sample_mme(R.E.value(), R.cfg.shadow_samples, R.cfg.seed);
    CsvTable csv("sample_id,x1,x2,x3");
    for (std::size_t i = 0; i < mm.points.size(); ++i)
        csv.add({std::to_string(i), format_double(mm.points[i].coords[0]),
                 format_double(mm.points[i].coords[1]), format_double(mm.points[i].coords[2])});
    R.add_csv("mme.csv", csv, "2:3", "x1", "x2");
    json res;
    res["count"] = R.cfg.shadow_samples;
    res["resample_count"] = mm.resample_count;
    res["tolerance"] = mm.tolerance;
    std::vector<double> ks;
    for (int c = 0; c < R.B->dim(); ++c) {
        std::vector<double> vals;
        vals.reserve(mm.points.size());
        for (const auto& p : mm.points) vals.push_back(p.coords[c]);
        ks.push_back(ks_uniform(std::move(vals)));
    }
    res["ks_per_coordinate"] = ks;
    R.summary["results"]["mme"] = res;
    R.note_timing("mme", t0);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deformed toral automorphisms: shadowing semiconjugacy and entropy experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", poly_text;
    int power = 0;
    std::uint64_t seed = 0;
    bool plot = false, no_timings = false;
    app.add_option("--config", config_path, "Experiment config file (INI sections)");
    app.add_option("--out", out_dir, "Output directory for reports");
    app.add_option("--poly", poly_text, "Override [system] poly, comma-separated ascending");
    app.add_option("--power", power, "Override [system] power");
    auto* seed_opt = app.add_option("--seed", seed, "Override [rng] seed");
    app.add_flag("--plot", plot, "Emit a gnuplot script next to each CSV");
    app.add_flag("--no-timings", no_timings, "Keep the timings block empty for byte-stable output");

    int search_dim = 3;
    long long search_bound = 8;
    CLI::App* sub_search = app.add_subcommand("search", "Enumerate admissible polynomials");
    sub_search->add_option("--dim", search_dim, "Polynomial degree");
    sub_search->add_option("--bound", search_bound, "Coefficient bound");
    CLI::App* sub_spectral = app.add_subcommand("spectral", "Eigendata and entropy of the system");
    CLI::App* sub_build = app.add_subcommand("build", "Construct and certify the deformed map");
    CLI::App* sub_shadow = app.add_subcommand("shadow", "Shadow noisy pseudo-orbits");
    CLI::App* sub_pi = app.add_subcommand("pi", "Semiconjugacy defect per sample");
    CLI::App* sub_fibers = app.add_subcommand("fibers", "Fiber segments of the factor map");
    CLI::App* sub_entropy = app.add_subcommand("entropy", "Paired entropy estimate");
    CLI::App* sub_birkhoff = app.add_subcommand("birkhoff", "Occupation averages near q");
    CLI::App* sub_exponent = app.add_subcommand("exponent", "Center expansion exponents");
    CLI::App* sub_mme = app.add_subcommand("mme", "Sample the pulled-back uniform measure");
    CLI::App* sub_all = app.add_subcommand("all", "Run every experiment");
    for (CLI::App* sub : {sub_search, sub_spectral, sub_build, sub_shadow, sub_pi, sub_fibers,
                          sub_entropy, sub_birkhoff, sub_exponent, sub_mme, sub_all})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Runner R;
    try {
        thread_budget(); // validate MANELAB_THREADS early
        if (!config_path.empty()) R.cfg = load_config(config_path);
        if (!poly_text.empty()) R.cfg.poly = parse_int_list(poly_text);
        if (power != 0) R.cfg.power = power;
        if (seed_opt->count() > 0) R.cfg.seed = seed;
        validate_config(R.cfg);
        R.out_dir = out_dir;
        R.plot = plot;
        R.no_timings = no_timings;
        R.summary["system"] = json::object();
        R.summary["constants"] = json::object();
        R.summary["results"] = json::object();
        R.summary["timings"] = json::object();

        if (sub_search->parsed()) run_search(R, search_dim, search_bound);
        if (sub_spectral->parsed()) run_spectral(R);
        if (sub_build->parsed()) run_build(R);
        if (sub_shadow->parsed()) run_shadow(R);
        if (sub_pi->parsed()) run_pi(R);
        if (sub_fibers->parsed()) run_fibers(R);
        if (sub_entropy->parsed()) run_entropy(R);
        if (sub_birkhoff->parsed()) run_birkhoff(R);
        if (sub_exponent->parsed()) run_exponent(R);
        if (sub_mme->parsed()) run_mme(R);
        if (sub_all->parsed()) {
            run_search(R, search_dim, search_bound);
            run_spectral(R);
            run_build(R);
            run_shadow(R);
            run_pi(R);
            run_fibers(R);
            run_entropy(R);
            run_birkhoff(R);
            run_exponent(R);
            run_mme(R);
        }
        R.flush();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        R.remove_flushed();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        R.remove_flushed();
        return 3;
    }
    return 0;
}
