#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "franson/state.hpp"

// Norm-preserving actions of the individual optical elements on
// single-photon states. Conventions:
//
//   BS   symmetric 50/50 beam splitter, reflection carries phase i:
//        (1/sqrt2) [[1, i], [i, 1]] on the (port_a, port_b) pair.
//   PBS  four-port polarization router, modeled as a mode permutation:
//        H swaps between in_port and h_port, V between in_port and v_port.
//   HWP  real Jones matrix [[cos2t, sin2t], [sin2t, -cos2t]], fast axis at
//        `angle_deg`; 45 deg swaps H and V.
//   DELAY shifts the time bin at one port and multiplies by a phase.
//
// Each action, lifted to the full mode space, is unitary.

namespace franson {

using Mat2 = std::array<std::array<Complex, 2>, 2>;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Jones matrix of a half-wave plate with its fast axis at `angle_deg`.
/// Unitary, Hermitian, determinant -1; its square is the identity.
inline Mat2 hwp_matrix(double angle_deg) {
    const double two_theta = 2.0 * deg_to_rad(angle_deg);
    const double c = std::cos(two_theta);
    const double s = std::sin(two_theta);
    return Mat2{{{Complex{c, 0.0}, Complex{s, 0.0}}, {Complex{s, 0.0}, Complex{-c, 0.0}}}};
}

/// 50/50 beam splitter across two ports. Polarization and time bin pass
/// through untouched.
inline SinglePhotonState apply_bs(const SinglePhotonState& state, int port_a, int port_b) {
    if (port_a == port_b) throw std::invalid_argument("apply_bs: ports must differ");
    constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    const Complex t{inv_sqrt2, 0.0};
    const Complex r{0.0, inv_sqrt2};
    SinglePhotonState out;
    for (const auto& [m, a] : state.entries()) {
        if (m.port == port_a) {
            out.add(m, a * t);
            out.add({port_b, m.pol, m.t}, a * r);
        } else if (m.port == port_b) {
            out.add(m, a * t);
            out.add({port_a, m.pol, m.t}, a * r);
        } else {
            out.add(m, a);
        }
    }
    out.prune();
    return out;
}

/// Polarizing beam splitter: H amplitude at in_port routes to h_port, V to
/// v_port, amplitudes unchanged. The reverse routes make the map a mode
/// permutation, so recombining two paths onto one port is the same call with
/// the roles swapped.
inline SinglePhotonState apply_pbs(const SinglePhotonState& state, int in_port, int h_port,
                                   int v_port) {
    if (in_port == h_port || in_port == v_port || h_port == v_port)
        throw std::invalid_argument("apply_pbs: ports must be distinct");
    SinglePhotonState out;
    for (const auto& [m, a] : state.entries()) {
        Mode dst = m;
        if (m.pol == Polarization::H) {
            if (m.port == in_port)
                dst.port = h_port;
            else if (m.port == h_port)
                dst.port = in_port;
        } else {
            if (m.port == in_port)
                dst.port = v_port;
            else if (m.port == v_port)
                dst.port = in_port;
        }
        out.add(dst, a);
    }
    out.prune();
    return out;
}

/// Optical path extension on one port: every amplitude there moves
/// `delay_bins` time bins later and picks up exp(i*phase_rad).
inline SinglePhotonState apply_delay(const SinglePhotonState& state, int port, int delay_bins,
                                     double phase_rad) {
    if (delay_bins < 0) throw std::invalid_argument("apply_delay: delay must be >= 0");
    const Complex phase = std::polar(1.0, phase_rad);
    SinglePhotonState out;
    for (const auto& [m, a] : state.entries()) {
        if (m.port == port)
            out.add({m.port, m.pol, m.t + delay_bins}, a * phase);
        else
            out.add(m, a);
    }
    out.prune();
    return out;
}

/// Half-wave plate at one port, fast axis at `angle_deg`, acting on the
/// (H, V) pair of every time bin there.
inline SinglePhotonState apply_hwp(const SinglePhotonState& state, int port, double angle_deg) {
    const Mat2 u = hwp_matrix(angle_deg);
    SinglePhotonState out;
    for (const auto& [m, a] : state.entries()) {
        if (m.port != port) {
            out.add(m, a);
            continue;
        }
        const int col = m.pol == Polarization::H ? 0 : 1;
        out.add({m.port, Polarization::H, m.t}, a * u[0][col]);
        out.add({m.port, Polarization::V, m.t}, a * u[1][col]);
    }
    out.prune();
    return out;
}

}  // namespace franson
