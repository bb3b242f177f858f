#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "franson/measurement.hpp"

// Emulation of the counting experiment: ideal probabilities from the
// measurement layer become Poisson-sampled coincidence counts with detector
// efficiency, dark/accidental background, polarization cross-talk, and
// phase jitter.
//
// Reproducibility contract: every sampled cell draws from its own substream,
// derived from (seed, stream tag, cell index) via splitmix64 and fed to a
// std::mt19937_64. Uniforms come from the top 53 engine bits and the Poisson
// sampler below is hand-rolled, so identical configs give identical counts
// on every platform and release. Cells are independent; evaluating them in
// any order (or in parallel) cannot change the results.

namespace franson {

struct NoiseConfig {
    double pair_rate = 2000.0;  // photon pairs per second entering the gate
    double efficiency_1 = 1.0;
    double efficiency_2 = 1.0;
    double dark_rate_1 = 0.0;  // counts per second
    double dark_rate_2 = 0.0;
    double phase_jitter_sigma = 0.0;  // Gaussian std of theta1 + theta2, radians
    double leakage = 0.0;             // per-photon recorded-polarization flip probability
    double integration_s = 10.0;
    std::uint64_t seed = 1;
};

inline void validate(const NoiseConfig& n) {
    if (n.pair_rate < 0 || n.dark_rate_1 < 0 || n.dark_rate_2 < 0 || n.integration_s < 0)
        throw ConfigError("noise rates and integration time must be >= 0");
    if (n.efficiency_1 <= 0 || n.efficiency_1 > 1 || n.efficiency_2 <= 0 || n.efficiency_2 > 1)
        throw ConfigError("detector efficiencies must lie in (0, 1]");
    if (n.leakage < 0 || n.leakage >= 1) throw ConfigError("leakage must lie in [0, 1)");
    if (n.phase_jitter_sigma < 0) throw ConfigError("phase_jitter_sigma must be >= 0");
}

struct CountRecord {
    std::string label;
    std::int64_t counts = 0;
    double integration_s = 0.0;
    std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Substream seed for one sampled cell. Streams keep the truth-table and
/// fringe experiments from sharing draws even under one master seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

inline constexpr std::uint64_t kTruthStream = 0x74727574u;   // "trut"
inline constexpr std::uint64_t kFringeStream = 0x6672696eu;  // "frin"

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of the engine.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Poisson sample. Below mean 12: Knuth's product-of-uniforms inversion.
/// From 12 up: rejection from a Cauchy envelope (the classic poidev
/// construction), exact for all means and O(1) draws per sample.
inline std::int64_t poisson(std::mt19937_64& eng, double mean) {
    if (mean < 12.0) {
        const double threshold = std::exp(-mean);
        std::int64_t k = -1;
        double product = 1.0;
        do {
            ++k;
            product *= uniform01(eng);
        } while (product > threshold);
        return k;
    }
    const double sq = std::sqrt(2.0 * mean);
    const double log_mean = std::log(mean);
    const double g = mean * log_mean - std::lgamma(mean + 1.0);
    double em, t;
    do {
        double y;
        do {
            y = std::tan(std::numbers::pi * uniform01(eng));
            em = sq * y + mean;
        } while (em < 0.0);
        em = std::floor(em);
        t = 0.9 * (1.0 + y * y) * std::exp(em * log_mean - std::lgamma(em + 1.0) - g);
    } while (uniform01(eng) > t);
    return static_cast<std::int64_t>(em);
}

}  // namespace detail

/// Deterministic Poisson draw from the substream identified by `seed`.
inline std::int64_t sample_counts(double mean, std::uint64_t seed) {
    if (mean < 0.0) throw std::domain_error("sample_counts: mean must be >= 0");
    if (mean == 0.0) return 0;
    std::mt19937_64 eng(seed);
    return detail::poisson(eng, mean);
}

/// Expected coincidence count for one cell: detected signal pairs plus the
/// accidental background rate1 * rate2 * window * integration, where each
/// singles rate includes its dark counts.
inline double expected_coincidences(double p, const NoiseConfig& n, double window_s) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("expected_coincidences: p must lie in [0, 1]");
    if (window_s < 0.0) throw std::domain_error("expected_coincidences: window must be >= 0");
    const double signal = n.pair_rate * n.integration_s * p * n.efficiency_1 * n.efficiency_2;
    const double singles_1 = n.pair_rate * n.efficiency_1 + n.dark_rate_1;
    const double singles_2 = n.pair_rate * n.efficiency_2 + n.dark_rate_2;
    return signal + singles_1 * singles_2 * window_s * n.integration_s;
}

struct TruthExperiment {
    std::array<std::array<double, 4>, 4> ideal{};         // unconditional probabilities
    std::array<std::array<CountRecord, 4>, 4> cells{};    // sampled counts per input/outcome
    std::array<std::array<double, 4>, 4> renormalized{};  // counts / row total per input
};

/// Runs the 16-setting truth-table experiment: ideal probabilities, degraded
/// by independent per-photon recorded-polarization flips (leakage) and the
/// accidental floor, Poisson-sampled per cell, then renormalized per input
/// row the way the counting experiment reports it.
inline TruthExperiment run_truth_table_experiment(const GateConfig& cfg, CoincidenceWindow w,
                                                  const NoiseConfig& n, double bin_s) {
    validate(n);
    if (bin_s <= 0.0) throw ConfigError("bin duration must be > 0");
    const double window_s = w.window_bins * bin_s;
    TruthExperiment out;
    out.ideal = truth_table(cfg, w).p;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> leaked{};
        for (int actual = 0; actual < 4; ++actual) {
            const double p = out.ideal[i][actual];
            if (p == 0.0) continue;
            for (int rec = 0; rec < 4; ++rec) {
                const bool flip1 = (actual >= 2) != (rec >= 2);
                const bool flip2 = (actual % 2) != (rec % 2);
                const double w1 = flip1 ? n.leakage : 1.0 - n.leakage;
                const double w2 = flip2 ? n.leakage : 1.0 - n.leakage;
                leaked[rec] += p * w1 * w2;
            }
        }
        double row_total = 0.0;
        for (int o = 0; o < 4; ++o) {
            const double mean = expected_coincidences(leaked[o], n, window_s);
            const std::uint64_t cell_seed =
                substream_seed(n.seed, kTruthStream, static_cast<std::uint64_t>(4 * i + o));
            CountRecord rec;
            rec.label = std::string(kOutcomeLabels[i]) + "->" + kOutcomeLabels[o];
            rec.counts = sample_counts(mean, cell_seed);
            rec.integration_s = n.integration_s;
            rec.seed = cell_seed;
            row_total += static_cast<double>(rec.counts);
            out.cells[i][o] = std::move(rec);
        }
        for (int o = 0; o < 4; ++o)
            out.renormalized[i][o] =
                row_total > 0.0 ? static_cast<double>(out.cells[i][o].counts) / row_total : 0.0;
    }
    return out;
}

struct FringeSample {
    double volts = 0.0;
    double theta = 0.0;
    double probability = 0.0;  // jitter-damped signal probability
    double expected = 0.0;     // expected counts including accidentals
    std::int64_t counts = 0;
};

/// Runs the piezo-scan experiment: each voltage maps to a total phase, the
/// ideal fringe from the measurement layer is damped by phase jitter
/// (visibility factor exp(-sigma^2/2); same expectation as per-event phase
/// sampling, but exactly testable), the accidental floor is added, and each
/// point is Poisson-sampled from its own substream.
inline std::vector<FringeSample> run_fringe_experiment(const GateConfig& cfg,
                                                       std::span<const double> volts,
                                                       const NoiseConfig& n, double nm_per_volt,
                                                       double wavelength_nm, CoincidenceWindow w,
                                                       double bin_s) {
    validate(n);
    if (bin_s <= 0.0) throw ConfigError("bin duration must be > 0");
    const double window_s = w.window_bins * bin_s;

    // The fringe is harmonic in the total phase, so three probes pin its
    // mean and first-harmonic coefficients exactly.
    const std::array<double, 3> probes = {0.0, std::numbers::pi / 2.0, std::numbers::pi};
    const auto probe_vals = fringe_scan(cfg, probes, w);
    const double mean_level = (probe_vals[0].second + probe_vals[2].second) / 2.0;
    const double cos_coeff = (probe_vals[0].second - probe_vals[2].second) / 2.0;
    const double sin_coeff = probe_vals[1].second - mean_level;
    const double damping = std::exp(-n.phase_jitter_sigma * n.phase_jitter_sigma / 2.0);

    std::vector<FringeSample> out;
    out.reserve(volts.size());
    for (std::size_t i = 0; i < volts.size(); ++i) {
        FringeSample s;
        s.volts = volts[i];
        s.theta = pzt_volts_to_phase(volts[i], nm_per_volt, wavelength_nm);
        s.probability =
            mean_level + damping * (cos_coeff * std::cos(s.theta) + sin_coeff * std::sin(s.theta));
        s.expected = expected_coincidences(s.probability, n, window_s);
        s.counts = sample_counts(s.expected, substream_seed(n.seed, kFringeStream, i));
        out.push_back(s);
    }
    return out;
}

}  // namespace franson
