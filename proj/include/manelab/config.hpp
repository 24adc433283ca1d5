#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace manelab {

// Flat INI-style experiment description: `[section]` headers, `key = value`
// lines, `#`/`;` comments, lists comma-separated.  Unknown sections or keys
// are rejected so a typo cannot silently fall back to a default.
struct ExperimentConfig {
    // [system]
    std::vector<long long> poly{-1, 6, -5, 1}; // ascending, monic
    int power = 2;

    // [mane]
    int q_index = 1;
    double rho = 0.05;
    double b = 0.5;
    double tau_fraction = 0.12;
    double gamma = 0.0;

    // [shadow]
    int window = 60;
    double noise = 1e-6;
    long long shadow_samples = 1000;
    double fiber_tol = 1e-4;

    // [entropy]
    std::vector<double> entropy_eps{0.2, 0.25, 0.3};
    std::vector<int> entropy_n{0, 1, 2, 3};
    long long entropy_samples = 1000000;

    // [birkhoff]
    double birkhoff_radius = 0.15;
    long long birkhoff_n = 1000000;
    int birkhoff_starts = 4;

    // [rng]
    std::uint64_t seed = 42;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Shared syntax for the --poly override and the config key.
std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Range checks mirroring the module preconditions that can be caught before
// any computation starts; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

} // namespace manelab
