#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "franson/cli.hpp"

// franson: simulator of a post-selected linear-optical CNOT gate built from
// a polarization interferometer (control arm) and a time-bin interferometer
// (target arm), with coincidence-window post-selection.
//
// Exit codes: 0 success, 1 validation failure (or unsafe cascade),
// 2 runtime/IO failure.

namespace {

franson::SweepSpec parse_sweep(const std::string& text, bool in_volts) {
    franson::SweepSpec sweep;
    sweep.in_volts = in_volts;
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw franson::ConfigError("sweep must be start:stop:step, got '" + text + "'");
    try {
        sweep.start = std::stod(text.substr(0, first));
        sweep.stop = std::stod(text.substr(first + 1, second - first - 1));
        sweep.step = std::stod(text.substr(second + 1));
    } catch (const std::exception&) {
        throw franson::ConfigError("sweep values must be numbers: '" + text + "'");
    }
    return sweep;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator of a post-selected linear-optical CNOT gate"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_prefix = "franson";
    std::optional<std::uint64_t> seed_override;
    app.add_option("--config", config_path, "experiment config file (INI-style)");
    app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--out", out_prefix, "output file prefix");

    auto* truth = app.add_subcommand("truth-table", "gate transformation probabilities");
    bool truth_ideal = false, truth_mc = false;
    truth->add_flag("--ideal", truth_ideal, "exact amplitudes (default)");
    truth->add_flag("--montecarlo", truth_mc, "seeded counting experiment");

    auto* entangle = app.add_subcommand("entangle", "post-selected state, histogram, concurrence");

    auto* fringe = app.add_subcommand("fringe", "two-photon interference scan and fit");
    std::string volts_sweep, theta_sweep;
    bool fringe_ideal = false, fringe_mc = false;
    fringe->add_option("--volts", volts_sweep, "PZT sweep start:stop:step in volts");
    fringe->add_option("--theta", theta_sweep, "phase sweep start:stop:step in radians");
    fringe->add_flag("--ideal", fringe_ideal, "exact probabilities (default)");
    fringe->add_flag("--montecarlo", fringe_mc, "seeded counting experiment");

    auto* cascade = app.add_subcommand("cascade-check", "timing safety of a gate cascade");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        franson::ExperimentConfig cfg =
            config_path.empty() ? franson::parse_config("") : franson::load_config(config_path);
        if (seed_override) cfg.noise.seed = *seed_override;
        for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

        if (truth->parsed()) {
            if (truth_ideal && truth_mc)
                throw franson::ConfigError("choose one of --ideal or --montecarlo");
            return franson::cmd_truth_table(cfg, truth_mc, out_prefix, std::cout);
        }
        if (entangle->parsed()) return franson::cmd_entangle(cfg, out_prefix, std::cout);
        if (fringe->parsed()) {
            if (fringe_ideal && fringe_mc)
                throw franson::ConfigError("choose one of --ideal or --montecarlo");
            if (!volts_sweep.empty() && !theta_sweep.empty())
                throw franson::ConfigError("choose one of --volts or --theta");
            franson::SweepSpec sweep;  // default: one full phase turn, 25 points
            if (!volts_sweep.empty())
                sweep = parse_sweep(volts_sweep, true);
            else if (!theta_sweep.empty())
                sweep = parse_sweep(theta_sweep, false);
            return franson::cmd_fringe(cfg, sweep, fringe_mc, out_prefix, std::cout);
        }
        if (cascade->parsed()) return franson::cmd_cascade_check(cfg, std::cout);
        return 1;
    } catch (const franson::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
