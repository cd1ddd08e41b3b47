// geometry.hpp — Hopf projection, Bloch coordinates in conjugate variables,
// the MMST Hamiltonian function and the delocalized/localized basis rotation.
//
// Conventions: hbar = 1. A pure two-level state is a pair of complex
// amplitudes (a1, a2); its population difference is z = |a1|^2 - |a2|^2 and
// its phase difference is phi = arg(a1) - arg(a2), stored wrapped to [0, 2pi).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "tlsmap/errors.hpp"

namespace tlsmap {

using complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Tolerance used to reject unnormalized amplitude pairs.
inline constexpr double normalization_tol = 1e-9;

// Amplitudes below this modulus carry no phase.
inline constexpr double phase_floor = 1e-12;

// Maps any finite angle into [0, 2pi).
inline double wrap_phase(double phi) noexcept {
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0;
    return w;
}

struct ComplexAmplitudePair {
    complex a1{1.0, 0.0};
    complex a2{0.0, 0.0};

    double norm_squared() const noexcept { return std::norm(a1) + std::norm(a2); }
};

inline void require_normalized(const ComplexAmplitudePair& s, const char* where) {
    const double n = s.norm_squared();
    if (!std::isfinite(n) || std::abs(n - 1.0) > normalization_tol) {
        throw DomainError(std::string(where) + ": state is not normalized (|a1|^2+|a2|^2 = " +
                          std::to_string(n) + ")");
    }
}

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{1.0};

    double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
};

// Canonical pair of one TLS: population difference z (momentum-like) and
// phase difference phi (position-like).
class ConjugatePair {
public:
    ConjugatePair() = default;

    ConjugatePair(double z, double phi) : z_(z), phi_(wrap_phase(phi)) {
        if (!std::isfinite(z) || !std::isfinite(phi)) {
            throw DomainError("ConjugatePair: non-finite coordinate");
        }
        if (std::abs(z) > 1.0) {
            throw DomainError("ConjugatePair: population difference z = " + std::to_string(z) +
                              " outside [-1, 1]");
        }
    }

    double z() const noexcept { return z_; }
    double phi() const noexcept { return phi_; }

    friend bool operator==(const ConjugatePair&, const ConjugatePair&) = default;

private:
    double z_{0.0};
    double phi_{0.0};
};

// Hamiltonian operator sum_i eta_i sigma_i.
struct PauliCoefficients {
    double eta1{0.0};
    double eta2{0.0};
    double eta3{0.0};
};

// One TLS: tunneling splitting delta and left/right asymmetry epsilon.
struct TlsParams {
    double delta{1.0};
    double epsilon{0.0};

    friend bool operator==(const TlsParams&, const TlsParams&) = default;
};

struct BasisRotation {
    double theta{0.0};
};

// (<sigma_x>, <sigma_y>, <sigma_z>) of a normalized state.
inline BlochVector hopf_project(const ComplexAmplitudePair& s) {
    require_normalized(s, "hopf_project");
    const complex c = std::conj(s.a1) * s.a2;
    return {2.0 * c.real(), 2.0 * c.imag(), std::norm(s.a1) - std::norm(s.a2)};
}

inline ConjugatePair amplitudes_to_conjugate(const ComplexAmplitudePair& s) {
    require_normalized(s, "amplitudes_to_conjugate");
    if (std::abs(s.a1) < phase_floor || std::abs(s.a2) < phase_floor) {
        throw UndefinedError("amplitudes_to_conjugate: phase undefined for a vanishing amplitude");
    }
    const double z = std::clamp(std::norm(s.a1) - std::norm(s.a2), -1.0, 1.0);
    return {z, std::arg(s.a1) - std::arg(s.a2)};
}

// Representative of the fibre over c: a1 carries the relative phase, a2 is real.
inline ComplexAmplitudePair conjugate_to_amplitudes(const ConjugatePair& c) {
    const double p1 = std::sqrt(0.5 * (1.0 + c.z()));
    const double p2 = std::sqrt(0.5 * (1.0 - c.z()));
    return {std::polar(p1, c.phi()), complex(p2, 0.0)};
}

inline BlochVector conjugate_to_bloch(const ConjugatePair& c) {
    const double r = std::sqrt(std::max(0.0, (1.0 - c.z()) * (1.0 + c.z())));
    return {r * std::cos(c.phi()), r * std::sin(c.phi()), c.z()};
}

// H0 = -2 eta1 sqrt(1-z^2) cos(phi) - 2 eta2 sqrt(1-z^2) sin(phi) + 2 eta3 z.
// This is the functional form that generates the classical dynamics; it is
// not numerically equal to sum_i eta_i <sigma_i> (see quantum_oracle.hpp for
// the exact correspondence at the level of the equations of motion).
inline double mmst_energy(const PauliCoefficients& eta, const ConjugatePair& c) {
    const double r = std::sqrt(std::max(0.0, (1.0 - c.z()) * (1.0 + c.z())));
    return -2.0 * eta.eta1 * r * std::cos(c.phi()) - 2.0 * eta.eta2 * r * std::sin(c.phi()) +
           2.0 * eta.eta3 * c.z();
}

// tan(2 theta) = delta / epsilon, resolved with atan2.
inline BasisRotation mixing_angle(const TlsParams& p) {
    if (p.delta == 0.0 && p.epsilon == 0.0) {
        throw UndefinedError("mixing_angle: undefined for delta = epsilon = 0");
    }
    return {0.5 * std::atan2(p.delta, p.epsilon)};
}

// (|L>, |R>) = [[sin, cos], [cos, -sin]] (|+>, |->). The matrix squares to
// the identity, so the same call maps back.
inline ComplexAmplitudePair lr_transform(const BasisRotation& rot, const ComplexAmplitudePair& s) {
    require_normalized(s, "lr_transform");
    const double sn = std::sin(rot.theta);
    const double cs = std::cos(rot.theta);
    return {sn * s.a1 + cs * s.a2, cs * s.a1 - sn * s.a2};
}

} // namespace tlsmap
