#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "franson/config.hpp"
#include "franson/report.hpp"

// Command implementations behind the CLI front end. Each command reads a
// validated ExperimentConfig, writes its output files under the given
// prefix, logs a short summary, and returns the process exit code
// (0 success, 1 validation, 2 runtime); ConfigError propagates to the
// caller, which maps it to exit code 1.

namespace franson {

/// Inclusive start:stop:step sweep, either in PZT volts or in radians of
/// total phase.
struct SweepSpec {
    double start = 0.0;
    double stop = 2.0 * std::numbers::pi;
    double step = 2.0 * std::numbers::pi / 24.0;
    bool in_volts = false;
};

inline std::vector<double> expand_sweep(const SweepSpec& sweep) {
    if (sweep.step <= 0.0) throw ConfigError("sweep step must be > 0");
    if (sweep.stop < sweep.start) throw ConfigError("sweep stop must be >= start");
    std::vector<double> out;
    const double tol = sweep.step * 1e-9;
    for (double x = sweep.start; x <= sweep.stop + tol; x += sweep.step) out.push_back(x);
    return out;
}

inline int cmd_truth_table(const ExperimentConfig& cfg, bool montecarlo,
                           const std::string& out_prefix, std::ostream& log) {
    const std::string path = out_prefix + "_truth.csv";
    if (montecarlo) {
        const auto exp =
            run_truth_table_experiment(cfg.gate, cfg.window(), cfg.noise, cfg.bin_s());
        write_text_file(path, truth_csv(exp, cfg.config_hash, cfg.noise.seed));
        log << "truth-table (montecarlo): wrote " << path << "\n";
        for (int i = 0; i < 4; ++i) {
            log << "  " << kOutcomeLabels[i] << ":";
            for (int o = 0; o < 4; ++o)
                log << " " << kOutcomeLabels[o] << "=" << exp.renormalized[i][o];
            log << "\n";
        }
    } else {
        const auto table = truth_table(cfg.gate, cfg.window());
        write_text_file(path, truth_csv(table, cfg.config_hash, cfg.noise.seed));
        log << "truth-table (ideal): wrote " << path << "\n";
    }
    return 0;
}

inline int cmd_entangle(const ExperimentConfig& cfg, const std::string& out_prefix,
                        std::ostream& log) {
    const auto joint = prepare_pair(cfg.input, cfg.target_pol);
    const auto ps = coincidence_postselect(cnot_apply(joint, cfg.gate), cfg.gate.detector_port_1,
                                           cfg.gate.detector_port_2, cfg.window());
    if (ps.kept.empty()) throw ConfigError("post-selection kept no amplitude");
    const auto hist = polarization_histogram(ps.kept);
    const auto kept_normalized = normalized(ps.kept);
    const double conc = concurrence(polarization_amplitudes(kept_normalized));

    const std::string path = out_prefix + "_entangle.csv";
    write_text_file(path, entangle_csv(ps.probability, hist, conc, kept_normalized,
                                       cfg.config_hash, cfg.noise.seed));
    log << "entangle: wrote " << path << "\n";
    log << "  success_probability=" << ps.probability << " concurrence=" << conc << "\n";
    log << "  histogram HH=" << hist[0] << " HV=" << hist[1] << " VH=" << hist[2]
        << " VV=" << hist[3] << "\n";
    return 0;
}

inline int cmd_fringe(const ExperimentConfig& cfg, const SweepSpec& sweep, bool montecarlo,
                      const std::string& out_prefix, std::ostream& log) {
    const std::vector<double> xs = expand_sweep(sweep);
    const double volts_per_rad =
        cfg.wavelength_nm / (2.0 * std::numbers::pi * cfg.nm_per_volt);

    std::vector<FringeRow> rows;
    rows.reserve(xs.size());
    std::vector<std::pair<double, double>> fit_samples;
    fit_samples.reserve(xs.size());

    if (montecarlo) {
        std::vector<double> volts(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            volts[i] = sweep.in_volts ? xs[i] : xs[i] * volts_per_rad;
        const auto samples = run_fringe_experiment(cfg.gate, volts, cfg.noise, cfg.nm_per_volt,
                                                   cfg.wavelength_nm, cfg.window(), cfg.bin_s());
        for (const auto& s : samples) {
            rows.push_back({s.volts, s.theta, s.probability, s.counts,
                            std::sqrt(static_cast<double>(s.counts))});
            fit_samples.emplace_back(s.theta, static_cast<double>(s.counts));
        }
    } else {
        std::vector<double> thetas(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            thetas[i] = sweep.in_volts
                            ? pzt_volts_to_phase(xs[i], cfg.nm_per_volt, cfg.wavelength_nm)
                            : xs[i];
        const auto scan = fringe_scan(cfg.gate, thetas, cfg.window());
        for (std::size_t i = 0; i < scan.size(); ++i) {
            rows.push_back({scan[i].first * volts_per_rad, scan[i].first, scan[i].second, 0, 0.0});
            fit_samples.push_back(scan[i]);
        }
    }

    std::optional<FringeFit> fit;
    std::string fit_note;
    try {
        fit = fit_fringe(fit_samples);
    } catch (const FitError& e) {
        fit_note = e.what();
    }

    const std::string mode = montecarlo ? "montecarlo" : "ideal";
    const std::string csv_path = out_prefix + "_fringe.csv";
    const std::string svg_path = out_prefix + "_fringe.svg";
    write_text_file(csv_path, fringe_csv(rows, fit, fit_note, cfg.config_hash, cfg.noise.seed,
                                         mode));
    write_text_file(svg_path, fringe_svg(rows, fit ? &*fit : nullptr, montecarlo));
    log << "fringe (" << mode << "): wrote " << csv_path << " and " << svg_path << "\n";
    if (fit)
        log << "  A,V,phi = " << fit->amplitude << "," << fit->visibility << "," << fit->phase
            << "\n";
    else
        log << "  fit unavailable: " << fit_note << "\n";
    return 0;
}

inline int cmd_cascade_check(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.has_cascade || cfg.cascade_delays.empty())
        throw ConfigError("cascade-check needs a [cascade] section with delays_bins");
    CascadeConfig cascade;
    cascade.window_bins = cfg.window_bins();
    for (int d : cfg.cascade_delays) {
        GateConfig g = cfg.gate;
        g.delay_bins = d;
        cascade.gates.push_back(g);
    }
    const auto conflicts = validate_cascade_timing(cascade);

    log << "gates:";
    for (int d : cfg.cascade_delays) log << " " << d;
    log << " bins\nwindow: " << cascade.window_bins << " bins\n";
    if (conflicts.empty()) {
        log << "SAFE\n";
        return 0;
    }
    const std::size_t n = cascade.gates.size();
    for (const auto& c : conflicts)
        log << "conflict: photon1=" << branch_label(c.branch1, n)
            << " photon2=" << branch_label(c.branch2, n) << " |dt|=" << c.delta_bins << " bins\n";
    log << "UNSAFE: " << conflicts.size() << " conflicting branch pair"
        << (conflicts.size() == 1 ? "" : "s") << "\n";
    return 1;
}

}  // namespace franson
