#pragma once

#include <complex>
#include <random>
#include <vector>

#include "franson/state.hpp"

// Shared generators and numeric helpers for the unit suites. Seeds are
// fixed so every run exercises identical data.

namespace testutil {

inline franson::Complex inner(const franson::SinglePhotonState& a,
                              const franson::SinglePhotonState& b) {
    franson::Complex out{};
    for (const auto& [m, av] : a.entries()) out += std::conj(av) * b.amplitude(m);
    return out;
}

/// Random state spread over the given ports with |t| <= t_max, normalized.
inline franson::SinglePhotonState random_state(std::mt19937& rng, const std::vector<int>& ports,
                                               int t_max, int entries) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> port_pick(0, static_cast<int>(ports.size()) - 1);
    std::uniform_int_distribution<int> t_pick(0, t_max);
    std::uniform_int_distribution<int> pol_pick(0, 1);
    franson::SinglePhotonState s;
    for (int i = 0; i < entries; ++i) {
        franson::Mode m{ports[static_cast<std::size_t>(port_pick(rng))],
                        pol_pick(rng) ? franson::Polarization::V : franson::Polarization::H,
                        t_pick(rng)};
        s.add(m, {amp(rng), amp(rng)});
    }
    s.prune();
    return franson::normalized(s);
}

/// Random normalized joint state with slot-1 modes on arm1 ports and slot-2
/// modes on arm2 ports.
inline franson::JointState random_joint_state(std::mt19937& rng, const std::vector<int>& arm1,
                                              const std::vector<int>& arm2, int t_max,
                                              int entries) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> p1(0, static_cast<int>(arm1.size()) - 1);
    std::uniform_int_distribution<int> p2(0, static_cast<int>(arm2.size()) - 1);
    std::uniform_int_distribution<int> t_pick(0, t_max);
    std::uniform_int_distribution<int> pol_pick(0, 1);
    franson::JointState s;
    for (int i = 0; i < entries; ++i) {
        franson::Mode m1{arm1[static_cast<std::size_t>(p1(rng))],
                         pol_pick(rng) ? franson::Polarization::V : franson::Polarization::H,
                         t_pick(rng)};
        franson::Mode m2{arm2[static_cast<std::size_t>(p2(rng))],
                         pol_pick(rng) ? franson::Polarization::V : franson::Polarization::H,
                         t_pick(rng)};
        s.add(m1, m2, {amp(rng), amp(rng)});
    }
    s.prune();
    return franson::normalized(s);
}

}  // namespace testutil
