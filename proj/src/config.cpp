#include "manelab/config.hpp"

#include <cstddef>
#include <fstream>
#include <sstream>

#include "manelab/errors.hpp"

namespace manelab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::stringstream ss(text);
    while (std::getline(ss, cur, ',')) parts.push_back(trim(cur));
    if (parts.empty()) throw ConfigError("empty list value");
    return parts;
}

long long to_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("trailing characters in integer '" + s + "'");
    return v;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("trailing characters in number '" + s + "'");
    return v;
}

} // namespace

std::vector<long long> parse_int_list(const std::string& text) {
    std::vector<long long> out;
    for (const auto& p : split_commas(text)) out.push_back(to_int(p));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split_commas(text)) out.push_back(to_double(p));
    return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    bool saw_system = false;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string at = " (line " + std::to_string(lineno) + ")";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header" + at);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "system" && section != "mane" && section != "shadow" &&
                section != "entropy" && section != "birkhoff" && section != "rng")
                throw ConfigError("unknown section [" + section + "]" + at);
            if (section == "system") saw_system = true;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value" + at);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError("empty key or value" + at);
        if (section.empty()) throw ConfigError("key before any section" + at);

        if (section == "system") {
            if (key == "poly")
                cfg.poly = parse_int_list(val);
            else if (key == "power")
                cfg.power = static_cast<int>(to_int(val));
            else
                throw ConfigError("unknown key '" + key + "' in [system]" + at);
        } else if (section == "mane") {
            if (key == "q_index")
                cfg.q_index = static_cast<int>(to_int(val));
            else if (key == "rho")
                cfg.rho = to_double(val);
            else if (key == "b")
                cfg.b = to_double(val);
            else if (key == "tau_fraction")
                cfg.tau_fraction = to_double(val);
            else if (key == "gamma")
                cfg.gamma = to_double(val);
            else
                throw ConfigError("unknown key '" + key + "' in [mane]" + at);
        } else if (section == "shadow") {
            if (key == "window")
                cfg.window = static_cast<int>(to_int(val));
            else if (key == "noise")
                cfg.noise = to_double(val);
            else if (key == "samples")
                cfg.shadow_samples = to_int(val);
            else if (key == "fiber_tol")
                cfg.fiber_tol = to_double(val);
            else
                throw ConfigError("unknown key '" + key + "' in [shadow]" + at);
        } else if (section == "entropy") {
            if (key == "eps")
                cfg.entropy_eps = parse_double_list(val);
            else if (key == "n") {
                cfg.entropy_n.clear();
                for (long long v : parse_int_list(val)) cfg.entropy_n.push_back(static_cast<int>(v));
            } else if (key == "samples")
                cfg.entropy_samples = to_int(val);
            else
                throw ConfigError("unknown key '" + key + "' in [entropy]" + at);
        } else if (section == "birkhoff") {
            if (key == "radius")
                cfg.birkhoff_radius = to_double(val);
            else if (key == "n")
                cfg.birkhoff_n = to_int(val);
            else if (key == "starts")
                cfg.birkhoff_starts = static_cast<int>(to_int(val));
            else
                throw ConfigError("unknown key '" + key + "' in [birkhoff]" + at);
        } else { // rng
            if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(to_int(val));
            else
                throw ConfigError("unknown key '" + key + "' in [rng]" + at);
        }
    }
    if (!saw_system) throw ConfigError("config is missing the [system] section");
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.poly.size() < 2) throw ConfigError("[system] poly needs at least two coefficients");
    if (cfg.poly.back() != 1) throw ConfigError("[system] poly must be monic (last entry 1)");
    if (cfg.power < 1 || cfg.power > 16) throw ConfigError("[system] power must lie in [1, 16]");
    if (cfg.q_index < 0) throw ConfigError("[mane] q_index must be nonnegative");
    if (!(cfg.rho > 0.0 && cfg.rho < 0.5)) throw ConfigError("[mane] rho must lie in (0, 1/2)");
    if (!(cfg.b > 0.0)) throw ConfigError("[mane] b must be positive");
    if (!(cfg.tau_fraction > 0.0 && cfg.tau_fraction <= 1.0))
        throw ConfigError("[mane] tau_fraction must lie in (0, 1]");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("[mane] gamma must lie in [0, 1)");
    if (cfg.window < 2) throw ConfigError("[shadow] window must be at least 2");
    if (!(cfg.noise >= 0.0)) throw ConfigError("[shadow] noise must be nonnegative");
    if (cfg.shadow_samples < 1) throw ConfigError("[shadow] samples must be positive");
    if (!(cfg.fiber_tol > 0.0)) throw ConfigError("[shadow] fiber_tol must be positive");
    if (cfg.entropy_eps.empty()) throw ConfigError("[entropy] eps list must be nonempty");
    for (double e : cfg.entropy_eps)
        if (!(e >= 0.05)) throw ConfigError("[entropy] eps entries must be at least 0.05");
    if (cfg.entropy_n.empty()) throw ConfigError("[entropy] n list must be nonempty");
    for (int n : cfg.entropy_n)
        if (n < 0 || n > 6) throw ConfigError("[entropy] n entries must lie in [0, 6]");
    if (cfg.entropy_samples < 1 || cfg.entropy_samples > 10000000)
        throw ConfigError("[entropy] samples must lie in [1, 1e7]");
    if (!(cfg.birkhoff_radius > 0.0 && cfg.birkhoff_radius < 0.5))
        throw ConfigError("[birkhoff] radius must lie in (0, 1/2)");
    if (cfg.birkhoff_n < 1 || cfg.birkhoff_n > 100000000)
        throw ConfigError("[birkhoff] n must lie in [1, 1e8]");
    if (cfg.birkhoff_starts < 1 || cfg.birkhoff_starts > 1000)
        throw ConfigError("[birkhoff] starts must lie in [1, 1000]");
}

} // namespace manelab
