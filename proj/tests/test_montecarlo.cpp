#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "franson/montecarlo.hpp"

using namespace franson;
using Catch::Approx;

namespace {
NoiseConfig quiet_noise(double pair_rate, double integration_s, std::uint64_t seed) {
    NoiseConfig n;
    n.pair_rate = pair_rate;
    n.integration_s = integration_s;
    n.seed = seed;
    return n;
}

double sample_mean(double poisson_mean, int seeds, std::uint64_t base) {
    double sum = 0.0;
    for (int i = 0; i < seeds; ++i)
        sum += static_cast<double>(
            sample_counts(poisson_mean, substream_seed(base, 7u, static_cast<std::uint64_t>(i))));
    return sum / seeds;
}

std::string counts_signature(const TruthExperiment& exp) {
    std::string out;
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < 4; ++o)
            out += exp.cells[i][o].label + "=" + std::to_string(exp.cells[i][o].counts) + ";";
    return out;
}
}  // namespace

TEST_CASE("expected_coincidences is the detected-pair product plus accidentals") {
    NoiseConfig n = quiet_noise(2000.0, 10.0, 1);
    REQUIRE(expected_coincidences(0.25, n, 0.0) == Approx(5000.0));
    REQUIRE(expected_coincidences(0.0, n, 0.0) == Approx(0.0));

    n.efficiency_1 = 0.5;
    n.efficiency_2 = 0.5;
    REQUIRE(expected_coincidences(0.25, n, 0.0) == Approx(1250.0));

    // Accidentals: singles include darks, rate1 * rate2 * window * time.
    n.efficiency_1 = 1.0;
    n.efficiency_2 = 1.0;
    n.dark_rate_1 = 500.0;
    n.dark_rate_2 = 1000.0;
    const double singles = (2000.0 + 500.0) * (2000.0 + 1000.0);
    REQUIRE(expected_coincidences(0.0, n, 1e-9) == Approx(singles * 1e-9 * 10.0));

    REQUIRE_THROWS_AS(expected_coincidences(1.5, n, 0.0), std::domain_error);
}

TEST_CASE("sample_counts is zero at zero mean and deterministic per seed") {
    REQUIRE(sample_counts(0.0, 123) == 0);
    for (double mean : {0.5, 7.0, 300.0}) {
        REQUIRE(sample_counts(mean, 42) == sample_counts(mean, 42));
        REQUIRE(sample_counts(mean, 43) == sample_counts(mean, 43));
    }
    REQUIRE_THROWS_AS(sample_counts(-1.0, 1), std::domain_error);
}

TEST_CASE("sample_counts matches the Poisson mean over many seeds") {
    // 5 sigma / sqrt(N) bands around the true mean.
    const int seeds = 10000;
    REQUIRE(sample_mean(1000.0, seeds, 1001) ==
            Approx(1000.0).margin(5.0 * std::sqrt(1000.0 / seeds)));
    REQUIRE(sample_mean(3.0, seeds, 1002) == Approx(3.0).margin(5.0 * std::sqrt(3.0 / seeds)));
    // Both sides of the small-mean / rejection-sampler switch at 12.
    REQUIRE(sample_mean(11.9, seeds, 1003) == Approx(11.9).margin(5.0 * std::sqrt(11.9 / seeds)));
    REQUIRE(sample_mean(12.1, seeds, 1004) == Approx(12.1).margin(5.0 * std::sqrt(12.1 / seeds)));
}

TEST_CASE("sample_counts has Poisson variance") {
    const int seeds = 10000;
    const double mean = 1000.0;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < seeds; ++i) {
        const double x = static_cast<double>(
            sample_counts(mean, substream_seed(555, 8u, static_cast<std::uint64_t>(i))));
        sum += x;
        sum_sq += x * x;
    }
    const double m = sum / seeds;
    const double var = sum_sq / seeds - m * m;
    // Std error of the sample variance for Poisson(1000) is ~sqrt(2*m^2+m)/sqrt(N).
    REQUIRE(var == Approx(mean).margin(5.0 * std::sqrt((2.0 * mean * mean + mean) / seeds)));
}

TEST_CASE("zero-noise truth experiment reproduces the ideal pattern") {
    // Even with zero darks and leakage the signal singles leave a small
    // accidental floor: (2e4)^2 * 1 ns * 10 s = 4 expected counts per cell
    // against 5e4 on the diagonal.
    const GateConfig cfg;
    const auto exp = run_truth_table_experiment(cfg, {10}, quiet_noise(2e4, 10.0, 99), 1e-10);
    const int expected_col[4] = {0, 1, 3, 2};
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < 4; ++o) {
            if (o == expected_col[i]) {
                REQUIRE(exp.renormalized[i][o] > 0.999);
                REQUIRE(exp.cells[i][o].counts > 0);
            } else {
                REQUIRE(exp.cells[i][o].counts < 20);  // ~5 sigma above the floor
            }
        }
}

TEST_CASE("zero-noise count estimates converge to the analytic probabilities") {
    // For >= 99% of seeds, |counts/pairs - p| <= 5 sqrt(p(1-p)/pairs).
    const GateConfig cfg;
    const double pair_rate = 4000.0, integration = 10.0;
    const double pairs = pair_rate * integration;
    const int expected_col[4] = {0, 1, 3, 2};
    int ok = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto exp =
            run_truth_table_experiment(cfg, {10}, quiet_noise(pair_rate, integration, seed), 1e-10);
        for (int i = 0; i < 4; ++i) {
            const double p = 0.25;
            const double estimate =
                static_cast<double>(exp.cells[i][expected_col[i]].counts) / pairs;
            ++total;
            if (std::abs(estimate - p) <= 5.0 * std::sqrt(p * (1.0 - p) / pairs)) ++ok;
        }
    }
    REQUIRE(ok >= total * 99 / 100);
}

TEST_CASE("small leakage puts the renormalized diagonals near but below one") {
    const GateConfig cfg;
    NoiseConfig n = quiet_noise(2000.0, 10.0, 7);
    n.leakage = 0.02;
    n.dark_rate_1 = 100.0;
    n.dark_rate_2 = 100.0;
    const auto exp = run_truth_table_experiment(cfg, {10}, n, 1e-10);
    const int expected_col[4] = {0, 1, 3, 2};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(exp.renormalized[i][expected_col[i]] > 0.93);
        REQUIRE(exp.renormalized[i][expected_col[i]] < 0.99);
        for (int o = 0; o < 4; ++o)
            if (o != expected_col[i]) REQUIRE(exp.renormalized[i][o] <= 0.04);
    }
}

TEST_CASE("half leakage depolarizes the renormalized table") {
    const GateConfig cfg;
    NoiseConfig n = quiet_noise(4e4, 10.0, 11);
    n.leakage = 0.5;
    const auto exp = run_truth_table_experiment(cfg, {10}, n, 1e-10);
    // Each cell mean is N/4 with N = 1e5 * 0.25 detected pairs per row.
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < 4; ++o) REQUIRE(exp.renormalized[i][o] == Approx(0.25).margin(0.02));
}

TEST_CASE("truth experiment is byte-stable per seed") {
    const GateConfig cfg;
    NoiseConfig n = quiet_noise(2000.0, 10.0, 31415);
    n.leakage = 0.01;
    n.dark_rate_1 = 50.0;
    n.dark_rate_2 = 50.0;
    const auto a = run_truth_table_experiment(cfg, {10}, n, 1e-10);
    const auto b = run_truth_table_experiment(cfg, {10}, n, 1e-10);
    REQUIRE(counts_signature(a) == counts_signature(b));
    n.seed = 31416;
    const auto c = run_truth_table_experiment(cfg, {10}, n, 1e-10);
    REQUIRE(counts_signature(a) != counts_signature(c));
}

TEST_CASE("fringe experiment obeys the phase-jitter visibility law") {
    // fitted V / ideal V = exp(-sigma^2/2) within combined standard errors.
    const GateConfig cfg;
    std::vector<double> volts;
    for (int i = 0; i < 25; ++i) volts.push_back(12.174 * i / 24.0);  // one full turn

    for (double sigma : {0.0, 0.3, 0.8, 1.28}) {
        const double damping = std::exp(-sigma * sigma / 2.0);
        const int seeds = 30;
        double sum = 0.0, sum_sq = 0.0;
        for (int s = 0; s < seeds; ++s) {
            NoiseConfig n = quiet_noise(5e4, 20.0, 9000u + static_cast<std::uint64_t>(s));
            n.phase_jitter_sigma = sigma;
            const auto samples = run_fringe_experiment(cfg, volts, n, 69.0, 840.0, {10}, 1e-10);
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : samples)
                pts.emplace_back(p.theta, static_cast<double>(p.counts));
            const double v = fit_fringe(pts).visibility;
            sum += v;
            sum_sq += v * v;
        }
        const double mean_v = sum / seeds;
        const double stderr_v = std::sqrt((sum_sq / seeds - mean_v * mean_v) / seeds);
        REQUIRE(mean_v == Approx(damping).margin(3.0 * stderr_v + 1e-3));
    }
}

TEST_CASE("zero pair rate leaves only accidentals and a flat fringe") {
    const GateConfig cfg;
    NoiseConfig n = quiet_noise(0.0, 10.0, 77);
    n.dark_rate_1 = 1e6;
    n.dark_rate_2 = 1e6;
    std::vector<double> volts;
    for (int i = 0; i < 25; ++i) volts.push_back(12.174 * i / 24.0);
    const auto samples = run_fringe_experiment(cfg, volts, n, 69.0, 840.0, {10}, 1e-10);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : samples) {
        REQUIRE(p.counts > 0);  // accidental floor present
        pts.emplace_back(p.theta, static_cast<double>(p.counts));
    }
    REQUIRE(fit_fringe(pts).visibility < 0.05);
}

TEST_CASE("fringe experiment is deterministic per seed") {
    const GateConfig cfg;
    NoiseConfig n = quiet_noise(2000.0, 20.0, 2024);
    n.phase_jitter_sigma = 1.28;
    const std::vector<double> volts = {0.0, 3.0, 6.0, 9.0, 12.0};
    const auto a = run_fringe_experiment(cfg, volts, n, 69.0, 840.0, {10}, 1e-10);
    const auto b = run_fringe_experiment(cfg, volts, n, 69.0, 840.0, {10}, 1e-10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i].counts == b[i].counts);
}

TEST_CASE("noise validation rejects out-of-range parameters") {
    NoiseConfig n;
    n.efficiency_1 = 0.0;
    REQUIRE_THROWS_AS(validate(n), ConfigError);
    n = NoiseConfig{};
    n.leakage = 1.0;
    REQUIRE_THROWS_AS(validate(n), ConfigError);
    n = NoiseConfig{};
    n.pair_rate = -1.0;
    REQUIRE_THROWS_AS(validate(n), ConfigError);
}
