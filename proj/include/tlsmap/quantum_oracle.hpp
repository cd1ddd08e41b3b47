// quantum_oracle.hpp — exact propagation of a single two-level system, used as
// an independent check of the classical (z, phi) dynamics.
//
// The classical flow dz/dt = -2 delta sqrt(1-z^2) sin(phi),
// dphi/dt = 2 delta z cos(phi)/sqrt(1-z^2) + 2 epsilon is reproduced exactly by
// the Schrodinger evolution under
//     H = [[-epsilon, delta], [delta, epsilon]]
// with z = |c1|^2 - |c2|^2 and phi = arg c1 - arg c2. On this correspondence
// the classical energy is H0 = -2 <psi|H|psi>.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "tlsmap/geometry.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"

namespace tlsmap {

// Real symmetric 2x2 Hamiltonian [[h11, h12], [h12, h22]], stored traceless.
class QuantumTls {
public:
    QuantumTls(double h11, double h12, double h22) : h12_(h12) {
        const double shift = 0.5 * (h11 + h22);
        h11_ = h11 - shift;
        h22_ = h22 - shift;
    }

    // delta sigma_x + epsilon sigma_z.
    static QuantumTls from_pauli(const TlsParams& p) { return {p.epsilon, p.delta, -p.epsilon}; }

    // The matrix whose (z, phi) dynamics coincide with the classical flow.
    static QuantumTls classical_correspondence(const TlsParams& p) {
        return {-p.epsilon, p.delta, p.epsilon};
    }

    double h11() const noexcept { return h11_; }
    double h12() const noexcept { return h12_; }
    double h22() const noexcept { return h22_; }

    // Half the gap between the eigenvalues +-omega.
    double omega() const noexcept { return std::hypot(h11_, h12_); }

    double expectation(const ComplexAmplitudePair& s) const noexcept {
        return h11_ * std::norm(s.a1) + h22_ * std::norm(s.a2) +
               2.0 * h12_ * (std::conj(s.a1) * s.a2).real();
    }

private:
    double h11_{0.0};
    double h12_{0.0};
    double h22_{0.0};
};

// exp(-i H t) applied to the state. With eigenvalues +-w and spectral
// projectors P+- = (1 +- H/w)/2 this is cos(wt) 1 - i sin(wt) H/w.
inline ComplexAmplitudePair propagate(const QuantumTls& h, const ComplexAmplitudePair& s, double t) {
    require_normalized(s, "propagate");
    const double w = h.omega();
    if (w == 0.0) return s;
    const double c = std::cos(w * t);
    const complex is = complex(0.0, std::sin(w * t) / w);
    return {c * s.a1 - is * (h.h11() * s.a1 + h.h12() * s.a2),
            c * s.a2 - is * (h.h12() * s.a1 + h.h22() * s.a2)};
}

// Quantum-side (z(t), phi(t)) for a classical TLS started at a given state.
class CorrespondenceExtractor {
public:
    CorrespondenceExtractor(const TlsParams& p, const ComplexAmplitudePair& initial)
        : h_(QuantumTls::classical_correspondence(p)), initial_(initial) {
        require_normalized(initial, "CorrespondenceExtractor");
    }

    ComplexAmplitudePair amplitudes(double t) const { return propagate(h_, initial_, t); }

    double z(double t) const {
        const auto s = amplitudes(t);
        return std::clamp(std::norm(s.a1) - std::norm(s.a2), -1.0, 1.0);
    }

    // Throws UndefinedError when an amplitude vanishes.
    ConjugatePair at(double t) const { return amplitudes_to_conjugate(amplitudes(t)); }

    const QuantumTls& hamiltonian() const noexcept { return h_; }

private:
    QuantumTls h_;
    ComplexAmplitudePair initial_;
};

inline CorrespondenceExtractor classical_correspondence_rhs(const TlsParams& p,
                                                            const ComplexAmplitudePair& initial) {
    return {p, initial};
}

// Max over the integrator's sample times of |z_classical - z_quantum| on
// [cfg.t0, cfg.tf].
inline double compare_isolated(const TlsParams& p, const ConjugatePair& ic, const IntegratorConfig& cfg) {
    if (!(std::abs(ic.z()) < 1.0)) throw DomainError("compare_isolated: |z(0)| must be < 1");
    const Trajectory traj = integrate_flow(IsolatedFlow(p), to_flat(ic), cfg);
    const CorrespondenceExtractor quantum(p, conjugate_to_amplitudes(ic));
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        worst = std::max(worst, std::abs(traj.at(i, 0) - quantum.z(traj.times[i] - cfg.t0)));
    }
    return worst;
}

} // namespace tlsmap
