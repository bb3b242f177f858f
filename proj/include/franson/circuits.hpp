#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "franson/elements.hpp"
#include "franson/state.hpp"

// The two interferometers of the gate, their composition into the CNOT, and
// the timing-safety check for cascaded gates.
//
// Interferometer 1 (control arm): PBS -> long-path delay+phase -> PBS. The
// photon takes the short or long path depending on its polarization, so on
// the output rail  H@t -> H@t  and  V@t -> e^{i theta1} V@(t+delay).
//
// Interferometer 2 (target arm): BS -> long-path HWP(45)+delay+phase -> BS.
// Half the light exits on the detector rail as
//   P@t -> (1/2) P@t + (1/2) e^{i theta2} Pbar@(t+delay)
// and the other half leaves through the non-detector port (kept in the
// state so norm accounting stays exact). theta2 is the total accumulated
// long-path phase including both beam-splitter reflections; the i*i = -1
// from the symmetric BS convention is folded into it.

namespace franson {

namespace ports {
// Canonical wiring. Arm 1 owns {kControlIn, kControlLong} plus its output
// rail, arm 2 owns {kTargetIn, kTargetLong}; the arms never share a port.
inline constexpr int kControlIn = 0;
inline constexpr int kControlLong = 1;
inline constexpr int kControlOut = 2;
inline constexpr int kTargetIn = 3;    // doubles as the detector rail
inline constexpr int kTargetLong = 4;  // doubles as the non-detector output
}  // namespace ports

struct GateConfig {
    int delay_bins = 19;  // 1.9 ns at 0.1 ns per bin
    double theta1 = 0.0;
    double theta2 = 0.0;
    int detector_port_1 = ports::kControlOut;
    int detector_port_2 = ports::kTargetIn;
};

inline void validate(const GateConfig& cfg) {
    if (cfg.delay_bins < 1) throw ConfigError("gate delay_bins must be >= 1");
    if (cfg.detector_port_1 == ports::kControlIn || cfg.detector_port_1 == ports::kControlLong)
        throw ConfigError("detector_port_1 collides with an internal arm-1 port");
    if (cfg.detector_port_2 == ports::kTargetLong)
        throw ConfigError("detector_port_2 collides with the arm-2 dump port");
    const bool d1_in_arm2 = cfg.detector_port_1 == ports::kTargetIn ||
                            cfg.detector_port_1 == ports::kTargetLong ||
                            cfg.detector_port_1 == cfg.detector_port_2;
    const bool d2_in_arm1 = cfg.detector_port_2 == ports::kControlIn ||
                            cfg.detector_port_2 == ports::kControlLong ||
                            cfg.detector_port_2 == cfg.detector_port_1;
    if (d1_in_arm2 || d2_in_arm1) throw ConfigError("detector ports must keep the arms disjoint");
}

namespace detail {

inline void require_port(const SinglePhotonState& state, int port, const char* what) {
    for (const auto& [m, a] : state.entries())
        if (m.port != port)
            throw std::invalid_argument(std::string(what) + ": input must enter on port " +
                                        std::to_string(port) + ", found amplitude on port " +
                                        std::to_string(m.port));
}

inline SinglePhotonState relabel_port(const SinglePhotonState& state, int from, int to) {
    if (from == to) return state;
    SinglePhotonState out;
    for (const auto& [m, a] : state.entries())
        out.add({m.port == from ? to : m.port, m.pol, m.t}, a);
    return out;
}

}  // namespace detail

/// Control-arm interferometer. Deterministic routing, no loss: the full
/// input norm reaches the output rail (detector_port_1).
inline SinglePhotonState interferometer1(const SinglePhotonState& state, const GateConfig& cfg) {
    validate(cfg);
    detail::require_port(state, ports::kControlIn, "interferometer1");
    auto s = apply_pbs(state, ports::kControlIn, cfg.detector_port_1, ports::kControlLong);
    s = apply_delay(s, ports::kControlLong, cfg.delay_bins, cfg.theta1);
    return apply_pbs(s, ports::kControlLong, ports::kControlIn, cfg.detector_port_1);
}

/// Target-arm interferometer. Half the squared norm exits on the detector
/// rail (detector_port_2), half on the non-detector port; both are kept.
inline SinglePhotonState interferometer2(const SinglePhotonState& state, const GateConfig& cfg) {
    validate(cfg);
    detail::require_port(state, ports::kTargetIn, "interferometer2");
    auto s = apply_bs(state, ports::kTargetIn, ports::kTargetLong);
    s = apply_hwp(s, ports::kTargetLong, 45.0);
    // Long-path phase minus the two reflection i's already counted in theta2.
    s = apply_delay(s, ports::kTargetLong, cfg.delay_bins, cfg.theta2 - std::numbers::pi);
    s = apply_bs(s, ports::kTargetIn, ports::kTargetLong);
    return detail::relabel_port(s, ports::kTargetIn, cfg.detector_port_2);
}

/// Prepares the two-photon input: arm-1 photon in an arbitrary polarization
/// state, arm-2 photon in a basis polarization, both at time bin 0.
inline JointState prepare_pair(const JonesVector& control, Polarization target) {
    if (!control.is_normalized(1e-9))
        throw ConfigError("control polarization state must be normalized");
    return tensor(SinglePhotonState::from_jones(control, ports::kControlIn),
                  SinglePhotonState::basis({ports::kTargetIn, target, 0}));
}

inline JointState prepare_basis_pair(Polarization control, Polarization target) {
    return tensor(SinglePhotonState::basis({ports::kControlIn, control, 0}),
                  SinglePhotonState::basis({ports::kTargetIn, target, 0}));
}

/// The full gate: interferometer 1 on the arm-1 factor of every entry,
/// interferometer 2 on the arm-2 factor. Linear and norm preserving.
inline JointState cnot_apply(const JointState& joint, const GateConfig& cfg) {
    auto out = map_arm1(joint, [&](const SinglePhotonState& s) { return interferometer1(s, cfg); });
    return map_arm2(out, [&](const SinglePhotonState& s) { return interferometer2(s, cfg); });
}

/// A cascade of gates sharing one coincidence window. Safe operation needs
/// the window narrower than every gate delay.
struct CascadeConfig {
    std::vector<GateConfig> gates;
    int window_bins = 10;
};

/// One unsafe pair of path combinations: the two photons took different
/// short/long patterns yet their arrival-time difference fits inside the
/// coincidence window. Branch bit i set = long path in gate i.
struct BranchConflict {
    std::uint32_t branch1 = 0;
    std::uint32_t branch2 = 0;
    int delta_bins = 0;

    friend constexpr auto operator<=>(const BranchConflict&, const BranchConflict&) = default;
};

/// "SL" style label: one letter per gate, first gate first.
inline std::string branch_label(std::uint32_t branch, std::size_t num_gates) {
    std::string out(num_gates, 'S');
    for (std::size_t i = 0; i < num_gates; ++i)
        if (branch & (1u << i)) out[i] = 'L';
    return out;
}

/// Enumerates every short/long path combination per photon (time bins
/// accumulate across gates, nothing is re-zeroed) and reports every pair of
/// distinct combinations closer in arrival time than the window. The gate
/// logic treats distinct combinations as distinguishable, so any such pair
/// produces undesired coincidences; an empty result means the cascade is
/// coincidence-safe. Each unordered pair is reported once, branch1 < branch2.
inline std::vector<BranchConflict> validate_cascade_timing(const CascadeConfig& cascade) {
    if (cascade.gates.empty()) throw ConfigError("cascade needs at least one gate");
    if (cascade.gates.size() > 20) throw ConfigError("cascade branch enumeration capped at 20 gates");
    int min_delay = cascade.gates.front().delay_bins;
    for (const auto& g : cascade.gates) {
        if (g.delay_bins < 1) throw ConfigError("gate delay_bins must be >= 1");
        min_delay = std::min(min_delay, g.delay_bins);
    }
    if (cascade.window_bins >= min_delay)
        throw ConfigError("coincidence window must be smaller than every gate delay");

    const std::size_t n = cascade.gates.size();
    struct Arrival {
        long long t;
        std::uint32_t branch;
    };
    std::vector<Arrival> arrivals;
    arrivals.reserve(std::size_t{1} << n);
    for (std::uint32_t b = 0; b < (1u << n); ++b) {
        long long t = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (b & (1u << i)) t += cascade.gates[i].delay_bins;
        arrivals.push_back({t, b});
    }
    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& x, const Arrival& y) {
        return x.t < y.t || (x.t == y.t && x.branch < y.branch);
    });

    // Both photons share the branch-to-time map, so a sliding window over the
    // sorted arrival times finds every close pair.
    std::vector<BranchConflict> conflicts;
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        for (std::size_t j = i + 1; j < arrivals.size(); ++j) {
            const long long dt = arrivals[j].t - arrivals[i].t;
            if (dt >= cascade.window_bins) break;
            const std::uint32_t b1 = std::min(arrivals[i].branch, arrivals[j].branch);
            const std::uint32_t b2 = std::max(arrivals[i].branch, arrivals[j].branch);
            conflicts.push_back({b1, b2, static_cast<int>(dt)});
        }
    }
    std::sort(conflicts.begin(), conflicts.end());
    return conflicts;
}

}  // namespace franson
