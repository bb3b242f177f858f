#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "franson/circuits.hpp"
#include "franson/state.hpp"

// Coincidence post-selection, polarization analysis, the truth table, the
// two-photon fringe, and the entanglement metrics.
//
// Two rules govern how amplitudes combine at the coincidence counter:
//
//  * Post-selection probability is the incoherent sum of |amplitude|^2 over
//    the kept entries. Distinct time-bin pairs are orthogonal outcomes of
//    the pair source, so they never interfere in the success probability.
//
//  * The polarization analyzers see only the arrival-time DIFFERENCE (the
//    start/stop counter cannot resolve absolute time, and the cw pump makes
//    pair-creation times indistinguishable). Amplitudes that agree on the
//    polarization outcome and on t1 - t2 therefore add coherently; distinct
//    time differences add incoherently. This is what turns the short-short
//    and long-long branches into one interference fringe.

namespace franson {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coincidence window as a bin count; a two-detector event counts iff
/// |t1 - t2| < window_bins (strict).
struct CoincidenceWindow {
    int window_bins = 10;
};

/// Outcome order used everywhere: HH, HV, VH, VV.
inline constexpr std::array<const char*, 4> kOutcomeLabels = {"HH", "HV", "VH", "VV"};

constexpr int outcome_index(Polarization p1, Polarization p2) {
    return (p1 == Polarization::V ? 2 : 0) + (p2 == Polarization::V ? 1 : 0);
}

constexpr std::pair<Polarization, Polarization> outcome_pols(int index) {
    return {index >= 2 ? Polarization::V : Polarization::H,
            index % 2 == 1 ? Polarization::V : Polarization::H};
}

struct PostSelection {
    JointState kept;  // sub-normalized
    double probability = 0.0;
};

/// Keeps exactly the entries with photon 1 on d1_port, photon 2 on d2_port,
/// and |t1 - t2| inside the window. The kept part is returned unnormalized;
/// its squared norm is the post-selection success probability.
inline PostSelection coincidence_postselect(const JointState& joint, int d1_port, int d2_port,
                                            CoincidenceWindow w) {
    PostSelection out;
    for (const auto& [k, a] : joint.entries()) {
        const auto& [m1, m2] = k;
        if (m1.port != d1_port || m2.port != d2_port) continue;
        if (std::abs(static_cast<long long>(m1.t) - m2.t) >= w.window_bins) continue;
        out.kept.add(m1, m2, a);
    }
    out.probability = squared_norm(out.kept);
    return out;
}

/// Probabilities of the four polarization pairs, summed over time bins and
/// normalized to total 1. Throws on a zero-norm input.
inline std::array<double, 4> polarization_histogram(const JointState& kept) {
    std::array<double, 4> hist{};
    for (const auto& [k, a] : kept.entries())
        hist[outcome_index(k.first.pol, k.second.pol)] += std::norm(a);
    const double total = hist[0] + hist[1] + hist[2] + hist[3];
    if (total <= 0.0) throw std::domain_error("polarization_histogram: no outcomes to count");
    for (double& h : hist) h /= total;
    return hist;
}

/// Unconditional post-selected probabilities: rows = input basis pairs,
/// columns = output basis pairs, both in HH, HV, VH, VV order. Each row sums
/// to that input's post-selection success probability.
struct TruthTable {
    std::array<std::array<double, 4>, 4> p{};

    double row_success(int input) const {
        const auto& row = p[static_cast<std::size_t>(input)];
        return row[0] + row[1] + row[2] + row[3];
    }
};

inline TruthTable truth_table(const GateConfig& cfg, CoincidenceWindow w) {
    TruthTable out;
    for (int i = 0; i < 4; ++i) {
        const auto [c, t] = outcome_pols(i);
        const auto ps = coincidence_postselect(cnot_apply(prepare_basis_pair(c, t), cfg),
                                               cfg.detector_port_1, cfg.detector_port_2, w);
        for (const auto& [k, a] : ps.kept.entries())
            out.p[i][outcome_index(k.first.pol, k.second.pol)] += std::norm(a);
    }
    return out;
}

/// Probability that both photons pass their polarization analyzers, each a
/// half-wave plate followed by a PBS keeping the H output. `angle*_deg` is
/// the polarization ROTATION applied by the analyzer; the wave plate's fast
/// axis sits at half that angle. Amplitudes agreeing on (ports, t1 - t2)
/// merge coherently before squaring, per the header note.
inline double analyzer_project(const JointState& kept, double angle1_deg, double angle2_deg) {
    const Mat2 u1 = hwp_matrix(angle1_deg / 2.0);
    const Mat2 u2 = hwp_matrix(angle2_deg / 2.0);
    std::map<std::tuple<int, int, long long>, Complex> classes;
    for (const auto& [k, a] : kept.entries()) {
        const auto& [m1, m2] = k;
        const Complex c1 = u1[0][m1.pol == Polarization::H ? 0 : 1];
        const Complex c2 = u2[0][m2.pol == Polarization::H ? 0 : 1];
        classes[{m1.port, m2.port, static_cast<long long>(m1.t) - m2.t}] += a * c1 * c2;
    }
    double prob = 0.0;
    for (const auto& [key, amp] : classes) prob += std::norm(amp);
    return prob;
}

/// Coherent polarization amplitudes (HH, HV, VH, VV order) of a kept state,
/// merged over time bins. Faithful when each polarization pair occupies a
/// single arrival-time-difference class, which holds for every post-selected
/// gate output with window < delay.
inline std::array<Complex, 4> polarization_amplitudes(const JointState& kept) {
    std::array<Complex, 4> amps{};
    for (const auto& [k, a] : kept.entries())
        amps[outcome_index(k.first.pol, k.second.pol)] += a;
    return amps;
}

/// Two-photon fringe: for each requested total phase theta = theta1 + theta2
/// the gate runs on the (|H> + |V>)/sqrt2 (x) |H> input and both analyzers
/// rotate by 45 degrees. Returned values are unconditional coincidence
/// probabilities; the ideal closed form is (1 + cos theta) / 16.
inline std::vector<std::pair<double, double>> fringe_scan(const GateConfig& base,
                                                          std::span<const double> thetas,
                                                          CoincidenceWindow w) {
    constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    const JointState input =
        prepare_pair({Complex{inv_sqrt2, 0.0}, Complex{inv_sqrt2, 0.0}}, Polarization::H);
    std::vector<std::pair<double, double>> out;
    out.reserve(thetas.size());
    for (double theta : thetas) {
        GateConfig cfg = base;
        cfg.theta1 = theta - base.theta2;  // only the sum reaches the kept state
        const auto ps = coincidence_postselect(cnot_apply(input, cfg), cfg.detector_port_1,
                                               cfg.detector_port_2, w);
        out.emplace_back(theta, analyzer_project(ps.kept, 45.0, 45.0));
    }
    return out;
}

/// Fitted fringe c(theta) = A (1 + V cos(theta + phi)).
struct FringeFit {
    double amplitude = 0.0;   // A
    double visibility = 0.0;  // V = (max - min) / (max + min) of the curve
    double phase = 0.0;       // phi, radians
};

/// Unweighted linear least squares on c = A + B cos(theta) + C sin(theta).
/// Needs at least three samples at three distinct phases spanning more than
/// half a period; throws FitError otherwise.
inline FringeFit fit_fringe(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw FitError("fit_fringe: need at least 3 samples");
    double lo = samples.front().first, hi = samples.front().first;
    std::vector<double> distinct;
    for (const auto& [theta, y] : samples) {
        lo = std::min(lo, theta);
        hi = std::max(hi, theta);
        bool seen = false;
        for (double d : distinct)
            if (std::abs(d - theta) <= 1e-12) {
                seen = true;
                break;
            }
        if (!seen) distinct.push_back(theta);
    }
    if (distinct.size() < 3) throw FitError("fit_fringe: need 3 distinct phase values");
    if (hi - lo <= std::numbers::pi)
        throw FitError("fit_fringe: samples must span more than half a period");

    // Normal equations for the 3-parameter model.
    double m[3][3] = {};
    double rhs[3] = {};
    for (const auto& [theta, y] : samples) {
        const double f[3] = {1.0, std::cos(theta), std::sin(theta)};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += y * f[r];
            for (int c = 0; c < 3; ++c) m[r][c] += f[r] * f[c];
        }
    }
    // Gaussian elimination with partial pivoting.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[perm[r]][col]) > std::abs(m[perm[pivot]][col])) pivot = r;
        std::swap(perm[col], perm[pivot]);
        const double diag = m[perm[col]][col];
        if (std::abs(diag) < 1e-12) throw FitError("fit_fringe: degenerate design matrix");
        for (int r = col + 1; r < 3; ++r) {
            const double factor = m[perm[r]][col] / diag;
            for (int c = col; c < 3; ++c) m[perm[r]][c] -= factor * m[perm[col]][c];
            rhs[perm[r]] -= factor * rhs[perm[col]];
        }
    }
    double sol[3];
    for (int col = 2; col >= 0; --col) {
        double v = rhs[perm[col]];
        for (int c = col + 1; c < 3; ++c) v -= m[perm[col]][c] * sol[c];
        sol[col] = v / m[perm[col]][col];
    }

    const double a = sol[0], b = sol[1], c = sol[2];
    const double modulation = std::hypot(b, c);
    if (modulation <= 1e-12 * std::max(1.0, std::abs(a))) return {a, 0.0, 0.0};
    if (a <= 0.0) throw FitError("fit_fringe: non-positive mean level");
    return {a, modulation / a, std::atan2(-c, b)};
}

/// Entanglement witness F = (P_HH + P_VV + V) / 2; F > 1/2 certifies the
/// post-selected polarization entanglement.
inline double fidelity(double p_hh, double p_vv, double v) {
    for (double x : {p_hh, p_vv, v})
        if (x < 0.0 || x > 1.0) throw std::domain_error("fidelity: inputs must lie in [0, 1]");
    return (p_hh + p_vv + v) / 2.0;
}

/// Concurrence of a normalized two-qubit pure state (HH, HV, VH, VV order):
/// C = 2 |a_HH a_VV - a_HV a_VH|, 0 for product states, 1 for Bell states.
inline double concurrence(const std::array<Complex, 4>& amps) {
    return 2.0 * std::abs(amps[0] * amps[3] - amps[1] * amps[2]);
}

/// Piezo actuator calibration: applied volts -> long-path phase shift.
inline double pzt_volts_to_phase(double volts, double nm_per_volt, double wavelength_nm) {
    if (wavelength_nm <= 0.0) throw std::domain_error("pzt_volts_to_phase: wavelength must be > 0");
    return 2.0 * std::numbers::pi * volts * nm_per_volt / wavelength_nm;
}

}  // namespace franson
