#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

// Sparse single-photon and two-photon states over (port, polarization,
// time-bin) modes. States are immutable values once built; every operation
// in this library is a pure function returning a fresh state, so states can
// be shared freely across threads.

namespace franson {

using Complex = std::complex<double>;

/// Stored amplitudes with modulus below this are pruned after every
/// operation. The pruning perturbs the squared norm by at most
/// (entry count) * kAmplitudeEpsilon^2.
inline constexpr double kAmplitudeEpsilon = 1e-15;

/// Tolerance for normalization and unitarity checks.
inline constexpr double kNormTolerance = 1e-12;

/// Raised for invalid experiment wiring or configuration values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Polarization : std::uint8_t { H = 0, V = 1 };

constexpr Polarization flipped(Polarization p) {
    return p == Polarization::H ? Polarization::V : Polarization::H;
}

constexpr char to_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

/// A single-photon basis label: spatial port, polarization, arrival-time bin.
/// Time is discrete; every optical delay is an exact integer number of bins,
/// so coincidence comparisons are integer arithmetic with no edge cases.
struct Mode {
    int port = 0;
    Polarization pol = Polarization::H;
    int t = 0;

    friend constexpr auto operator<=>(const Mode&, const Mode&) = default;
};

/// Polarization state alpha|H> + beta|V> of one photon.
struct JonesVector {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    double squared_norm() const { return std::norm(alpha) + std::norm(beta); }
    bool is_normalized(double tol = kNormTolerance) const {
        return std::abs(squared_norm() - 1.0) <= tol;
    }
};

namespace detail {

/// %.15g with "-0" normalized to "0" so equal states serialize identically.
inline std::string format_amplitude(double x) {
    if (x == 0.0) x = 0.0;  // collapse negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

}  // namespace detail

/// One photon's wavefunction: a sparse map from Mode to complex amplitude.
/// The map ordering is the canonical (port, pol, t) order, which makes
/// iteration and serialization deterministic.
class SinglePhotonState {
  public:
    using AmplitudeMap = std::map<Mode, Complex>;

    SinglePhotonState() = default;

    static SinglePhotonState basis(const Mode& m) {
        SinglePhotonState s;
        s.amplitudes_[m] = Complex{1.0, 0.0};
        return s;
    }

    static SinglePhotonState from_jones(const JonesVector& jv, int port, int t = 0) {
        SinglePhotonState s;
        s.add({port, Polarization::H, t}, jv.alpha);
        s.add({port, Polarization::V, t}, jv.beta);
        s.prune();
        return s;
    }

    void add(const Mode& m, Complex a) {
        if (a == Complex{}) return;
        amplitudes_[m] += a;
    }

    Complex amplitude(const Mode& m) const {
        auto it = amplitudes_.find(m);
        return it == amplitudes_.end() ? Complex{} : it->second;
    }

    const AmplitudeMap& entries() const { return amplitudes_; }
    std::size_t size() const { return amplitudes_.size(); }
    bool empty() const { return amplitudes_.empty(); }

    void prune(double eps = kAmplitudeEpsilon) {
        for (auto it = amplitudes_.begin(); it != amplitudes_.end();) {
            if (std::abs(it->second) < eps)
                it = amplitudes_.erase(it);
            else
                ++it;
        }
    }

  private:
    AmplitudeMap amplitudes_;
};

inline double squared_norm(const SinglePhotonState& s) {
    double n = 0.0;
    for (const auto& [m, a] : s.entries()) n += std::norm(a);
    return n;
}

inline SinglePhotonState scaled(const SinglePhotonState& s, Complex factor) {
    SinglePhotonState out;
    for (const auto& [m, a] : s.entries()) out.add(m, a * factor);
    out.prune();
    return out;
}

inline SinglePhotonState normalized(const SinglePhotonState& s) {
    const double n = squared_norm(s);
    if (n <= 0.0) throw std::domain_error("cannot normalize a zero state");
    return scaled(s, Complex{1.0 / std::sqrt(n), 0.0});
}

/// The two-photon state. Slot 1 is the photon in arm 1 (control side),
/// slot 2 the photon in arm 2 (target side); the two arms never share a
/// spatial port, and the photons are treated as distinguishable by arm.
/// Non-product states arise after coincidence post-selection.
class JointState {
  public:
    using Key = std::pair<Mode, Mode>;
    using AmplitudeMap = std::map<Key, Complex>;

    JointState() = default;

    void add(const Mode& m1, const Mode& m2, Complex a) {
        if (a == Complex{}) return;
        if (m1.port == m2.port || arm2_ports_.count(m1.port) || arm1_ports_.count(m2.port))
            throw ConfigError("joint state arms must use disjoint port sets");
        arm1_ports_.insert(m1.port);
        arm2_ports_.insert(m2.port);
        amplitudes_[{m1, m2}] += a;
    }

    Complex amplitude(const Mode& m1, const Mode& m2) const {
        auto it = amplitudes_.find({m1, m2});
        return it == amplitudes_.end() ? Complex{} : it->second;
    }

    const AmplitudeMap& entries() const { return amplitudes_; }
    std::size_t size() const { return amplitudes_.size(); }
    bool empty() const { return amplitudes_.empty(); }

    /// Ports seen so far in each slot. Supersets of the current support:
    /// pruning does not shrink them.
    const std::set<int>& arm1_ports() const { return arm1_ports_; }
    const std::set<int>& arm2_ports() const { return arm2_ports_; }

    void prune(double eps = kAmplitudeEpsilon) {
        for (auto it = amplitudes_.begin(); it != amplitudes_.end();) {
            if (std::abs(it->second) < eps)
                it = amplitudes_.erase(it);
            else
                ++it;
        }
    }

  private:
    AmplitudeMap amplitudes_;
    std::set<int> arm1_ports_;
    std::set<int> arm2_ports_;
};

inline double squared_norm(const JointState& s) {
    double n = 0.0;
    for (const auto& [k, a] : s.entries()) n += std::norm(a);
    return n;
}

inline JointState scaled(const JointState& s, Complex factor) {
    JointState out;
    for (const auto& [k, a] : s.entries()) out.add(k.first, k.second, a * factor);
    out.prune();
    return out;
}

inline JointState normalized(const JointState& s) {
    const double n = squared_norm(s);
    if (n <= 0.0) throw std::domain_error("cannot normalize a zero state");
    return scaled(s, Complex{1.0 / std::sqrt(n), 0.0});
}

/// Product-state preparation: amplitude of (m1, m2) is s1[m1] * s2[m2].
/// Bilinear in both factors. The two photons must occupy disjoint port sets.
inline JointState tensor(const SinglePhotonState& s1, const SinglePhotonState& s2) {
    for (const auto& [m1, a1] : s1.entries())
        for (const auto& [m2, a2] : s2.entries())
            if (m1.port == m2.port)
                throw ConfigError("tensor: photon port sets overlap on port " +
                                  std::to_string(m1.port));
    JointState out;
    for (const auto& [m1, a1] : s1.entries())
        for (const auto& [m2, a2] : s2.entries()) out.add(m1, m2, a1 * a2);
    out.prune();
    return out;
}

/// Applies a linear single-photon map to one arm of a joint state, leaving
/// the other arm as a spectator. `fn` receives a basis state and returns its
/// image; linearity extends it over the whole state.
template <typename Fn>
JointState map_arm1(const JointState& js, Fn&& fn) {
    std::map<Mode, SinglePhotonState> images;
    JointState out;
    for (const auto& [k, a] : js.entries()) {
        auto it = images.find(k.first);
        if (it == images.end())
            it = images.emplace(k.first, fn(SinglePhotonState::basis(k.first))).first;
        for (const auto& [m1, c] : it->second.entries()) out.add(m1, k.second, a * c);
    }
    out.prune();
    return out;
}

template <typename Fn>
JointState map_arm2(const JointState& js, Fn&& fn) {
    std::map<Mode, SinglePhotonState> images;
    JointState out;
    for (const auto& [k, a] : js.entries()) {
        auto it = images.find(k.second);
        if (it == images.end())
            it = images.emplace(k.second, fn(SinglePhotonState::basis(k.second))).first;
        for (const auto& [m2, c] : it->second.entries()) out.add(k.first, m2, a * c);
    }
    out.prune();
    return out;
}

/// |<a|b>|^2 for normalized joint states. Invariant under a global phase on
/// either argument and symmetric in its arguments.
inline double overlap_modulus_sq(const JointState& a, const JointState& b) {
    if (std::abs(squared_norm(a) - 1.0) > kNormTolerance ||
        std::abs(squared_norm(b) - 1.0) > kNormTolerance)
        throw std::invalid_argument("overlap_modulus_sq requires normalized states");
    Complex inner{};
    for (const auto& [k, av] : a.entries()) {
        auto it = b.entries().find(k);
        if (it != b.entries().end()) inner += std::conj(av) * it->second;
    }
    return std::norm(inner);
}

/// Canonical text form: one `port,pol,t,re,im` line per stored amplitude in
/// canonical mode order, 15 significant digits. Equal states serialize to
/// identical bytes.
inline std::string serialize(const SinglePhotonState& s) {
    std::string out;
    for (const auto& [m, a] : s.entries()) {
        out += std::to_string(m.port);
        out += ',';
        out += to_char(m.pol);
        out += ',';
        out += std::to_string(m.t);
        out += ',';
        out += detail::format_amplitude(a.real());
        out += ',';
        out += detail::format_amplitude(a.imag());
        out += '\n';
    }
    return out;
}

/// Joint-state form: `port1,pol1,t1,port2,pol2,t2,re,im` lines.
inline std::string serialize(const JointState& s) {
    std::string out;
    for (const auto& [k, a] : s.entries()) {
        const auto& [m1, m2] = k;
        out += std::to_string(m1.port);
        out += ',';
        out += to_char(m1.pol);
        out += ',';
        out += std::to_string(m1.t);
        out += ',';
        out += std::to_string(m2.port);
        out += ',';
        out += to_char(m2.pol);
        out += ',';
        out += std::to_string(m2.t);
        out += ',';
        out += detail::format_amplitude(a.real());
        out += ',';
        out += detail::format_amplitude(a.imag());
        out += '\n';
    }
    return out;
}

}  // namespace franson
