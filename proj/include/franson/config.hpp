#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "franson/circuits.hpp"
#include "franson/measurement.hpp"
#include "franson/montecarlo.hpp"

// Experiment configuration: a small INI-style text format with bracketed
// section headers and one `key = value` per line. Unknown sections and keys
// are rejected; omitted keys fall back to the nominal setup (19-bin delay at
// 0.1 ns per bin, 1.0 ns coincidence window, equal-superposition input).

namespace franson {

inline constexpr double kSpeedOfLightMps = 299792458.0;

inline double path_difference_to_ns(double meters) { return meters / kSpeedOfLightMps * 1e9; }

/// Nearest-bin rounding; *rel_err (optional) receives the relative rounding
/// error against the requested duration.
inline int ns_to_bins(double ns, double bin_ns, double* rel_err = nullptr) {
    if (bin_ns <= 0.0) throw ConfigError("bin_ns must be > 0");
    const long long bins = std::llround(ns / bin_ns);
    if (rel_err) *rel_err = ns != 0.0 ? std::abs(bins * bin_ns - ns) / std::abs(ns) : 0.0;
    return static_cast<int>(bins);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ExperimentConfig {
    GateConfig gate;
    double bin_ns = 0.1;
    double delta_t_ns = 1.0;
    JonesVector input{Complex{std::numbers::sqrt2 / 2.0, 0.0},
                      Complex{std::numbers::sqrt2 / 2.0, 0.0}};
    Polarization target_pol = Polarization::H;
    NoiseConfig noise;
    double nm_per_volt = 69.0;
    double wavelength_nm = 840.0;
    bool has_cascade = false;
    std::vector<int> cascade_delays;
    std::uint64_t config_hash = fnv1a64("");
    std::vector<std::string> warnings;

    int window_bins() const { return ns_to_bins(delta_t_ns, bin_ns); }
    CoincidenceWindow window() const { return {window_bins()}; }
    double bin_s() const { return bin_ns * 1e-9; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline ConfigError parse_error(int line, const std::string& what) {
    return ConfigError("config line " + std::to_string(line) + ": " + what);
}

inline double parse_double(std::string_view value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::string text(value);
        const double x = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw parse_error(line, "value for '" + key + "' is not a number");
    }
}

inline std::uint64_t parse_u64(std::string_view value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::string text(value);
        const std::uint64_t x = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw parse_error(line, "value for '" + key + "' is not an unsigned integer");
    }
}

inline int parse_int(std::string_view value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::string text(value);
        const int x = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw parse_error(line, "value for '" + key + "' is not an integer");
    }
}

inline std::vector<int> parse_int_list(std::string_view value, int line, const std::string& key) {
    std::vector<int> out;
    std::string text(value);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto trimmed = trim(item);
        if (trimmed.empty()) throw parse_error(line, "empty entry in list '" + key + "'");
        out.push_back(parse_int(trimmed, line, key));
    }
    if (out.empty()) throw parse_error(line, "list '" + key + "' is empty");
    return out;
}

}  // namespace detail

/// Parses and fully validates a configuration text. Throws ConfigError with
/// the offending line number or key name.
inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    cfg.config_hash = fnv1a64(text);

    std::optional<double> path_difference_m;
    bool delay_bins_given = false;

    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw detail::parse_error(line_no, "unterminated section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "gate" && section != "window" && section != "input" &&
                section != "noise" && section != "pzt" && section != "cascade")
                throw detail::parse_error(line_no, "unknown section [" + section + "]");
            if (section == "cascade") cfg.has_cascade = true;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw detail::parse_error(line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw detail::parse_error(line_no, "missing key before '='");
        if (value.empty()) throw detail::parse_error(line_no, "missing value for '" + key + "'");
        if (section.empty())
            throw detail::parse_error(line_no, "key '" + key + "' appears before any section");

        if (section == "gate") {
            if (key == "delay_bins") {
                cfg.gate.delay_bins = detail::parse_int(value, line_no, key);
                delay_bins_given = true;
            } else if (key == "theta1_rad") {
                cfg.gate.theta1 = detail::parse_double(value, line_no, key);
            } else if (key == "theta2_rad") {
                cfg.gate.theta2 = detail::parse_double(value, line_no, key);
            } else if (key == "path_difference_m") {
                path_difference_m = detail::parse_double(value, line_no, key);
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [gate]");
            }
        } else if (section == "window") {
            if (key == "delta_t_ns") {
                cfg.delta_t_ns = detail::parse_double(value, line_no, key);
            } else if (key == "bin_ns") {
                cfg.bin_ns = detail::parse_double(value, line_no, key);
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [window]");
            }
        } else if (section == "input") {
            if (key == "alpha_re") {
                cfg.input.alpha.real(detail::parse_double(value, line_no, key));
            } else if (key == "alpha_im") {
                cfg.input.alpha.imag(detail::parse_double(value, line_no, key));
            } else if (key == "beta_re") {
                cfg.input.beta.real(detail::parse_double(value, line_no, key));
            } else if (key == "beta_im") {
                cfg.input.beta.imag(detail::parse_double(value, line_no, key));
            } else if (key == "target_pol") {
                if (value == "H")
                    cfg.target_pol = Polarization::H;
                else if (value == "V")
                    cfg.target_pol = Polarization::V;
                else
                    throw detail::parse_error(line_no, "target_pol must be H or V");
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [input]");
            }
        } else if (section == "noise") {
            if (key == "pair_rate") {
                cfg.noise.pair_rate = detail::parse_double(value, line_no, key);
            } else if (key == "efficiency_1") {
                cfg.noise.efficiency_1 = detail::parse_double(value, line_no, key);
            } else if (key == "efficiency_2") {
                cfg.noise.efficiency_2 = detail::parse_double(value, line_no, key);
            } else if (key == "dark_rate_1") {
                cfg.noise.dark_rate_1 = detail::parse_double(value, line_no, key);
            } else if (key == "dark_rate_2") {
                cfg.noise.dark_rate_2 = detail::parse_double(value, line_no, key);
            } else if (key == "phase_jitter_sigma") {
                cfg.noise.phase_jitter_sigma = detail::parse_double(value, line_no, key);
            } else if (key == "leakage") {
                cfg.noise.leakage = detail::parse_double(value, line_no, key);
            } else if (key == "integration_s") {
                cfg.noise.integration_s = detail::parse_double(value, line_no, key);
            } else if (key == "seed") {
                cfg.noise.seed = detail::parse_u64(value, line_no, key);
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [noise]");
            }
        } else if (section == "pzt") {
            if (key == "nm_per_volt") {
                cfg.nm_per_volt = detail::parse_double(value, line_no, key);
            } else if (key == "wavelength_nm") {
                cfg.wavelength_nm = detail::parse_double(value, line_no, key);
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [pzt]");
            }
        } else if (section == "cascade") {
            if (key == "delays_bins") {
                cfg.cascade_delays = detail::parse_int_list(value, line_no, key);
            } else {
                throw detail::parse_error(line_no, "unknown key '" + key + "' in [cascade]");
            }
        }
    }

    // Resolve the gate delay, possibly from a physical path difference.
    if (path_difference_m) {
        if (delay_bins_given)
            throw ConfigError("specify either delay_bins or path_difference_m, not both");
        if (*path_difference_m <= 0.0) throw ConfigError("path_difference_m must be > 0");
        double rel_err = 0.0;
        const double ns = path_difference_to_ns(*path_difference_m);
        cfg.gate.delay_bins = ns_to_bins(ns, cfg.bin_ns, &rel_err);
        if (rel_err > 0.01) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "path_difference_m %g m = %.4g ns rounds to %d bins (%.2g%% off)",
                          *path_difference_m, ns, cfg.gate.delay_bins, rel_err * 100.0);
            cfg.warnings.emplace_back(buf);
        }
    }

    // Cross-field validation.
    if (cfg.bin_ns <= 0.0) throw ConfigError("bin_ns must be > 0");
    if (cfg.delta_t_ns <= 0.0) throw ConfigError("delta_t_ns must be > 0");
    validate(cfg.gate);
    if (cfg.delta_t_ns >= cfg.gate.delay_bins * cfg.bin_ns)
        throw ConfigError("delta_t_ns must be smaller than the gate delay (delay_bins * bin_ns)");
    if (cfg.window_bins() < 1) throw ConfigError("delta_t_ns is below one time bin");

    const double input_norm = cfg.input.squared_norm();
    if (std::abs(input_norm - 1.0) > 1e-6)
        throw ConfigError("input alpha/beta must satisfy |alpha|^2 + |beta|^2 = 1");
    const double scale = 1.0 / std::sqrt(input_norm);
    cfg.input.alpha *= scale;
    cfg.input.beta *= scale;

    validate(cfg.noise);
    if (cfg.nm_per_volt <= 0.0) throw ConfigError("nm_per_volt must be > 0");
    if (cfg.wavelength_nm <= 0.0) throw ConfigError("wavelength_nm must be > 0");
    if (cfg.has_cascade) {
        if (cfg.cascade_delays.empty())
            throw ConfigError("[cascade] section needs a delays_bins list");
        for (int d : cfg.cascade_delays)
            if (d < 1) throw ConfigError("cascade delays_bins entries must be >= 1");
    }
    return cfg;
}

/// Loads a config file; a missing or unreadable file is a ConfigError.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace franson
