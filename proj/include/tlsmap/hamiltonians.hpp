// hamiltonians.hpp — classical Hamiltonian functions and Hamilton-equation
// right-hand sides for the isolated TLS, the coupled pair and the central TLS
// in an environment of N TLSs.
//
// Flat state layout used by the integrator: conjugate pairs interleaved,
//   [z_0, phi_0, z_1, phi_1, ...]
// where pair 0 is the first (pair) or central (bath) TLS. Even indices are
// population differences, odd indices phases.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsmap/errors.hpp"
#include "tlsmap/geometry.hpp"

namespace tlsmap {

enum class CouplingKind { PositionPosition, MomentumMomentum, MomentumPosition, PositionMomentum };

inline std::string_view to_string(CouplingKind k) noexcept {
    switch (k) {
    case CouplingKind::PositionPosition: return "pp";
    case CouplingKind::MomentumMomentum: return "mm";
    case CouplingKind::MomentumPosition: return "mp";
    case CouplingKind::PositionMomentum: return "pm";
    }
    return "mm";
}

inline CouplingKind parse_coupling(std::string_view s) {
    if (s == "pp") return CouplingKind::PositionPosition;
    if (s == "mm") return CouplingKind::MomentumMomentum;
    if (s == "mp") return CouplingKind::MomentumPosition;
    if (s == "pm") return CouplingKind::PositionMomentum;
    throw ConfigError("unknown coupling kind '" + std::string(s) + "' (expected pp|mm|mp|pm)");
}

// Hamiltonian: right-hand sides are the exact Hamilton equations of the
// energy functions below. Verbatim: the alternative literal form with
// delta_1 instead of 2 delta_1 in the first TLS and Z * sum_i Lambda_i in the
// environment phases, kept for comparison. It does not conserve the energy.
enum class RhsMode { Hamiltonian, Verbatim };

struct PairSystem {
    TlsParams tls1;
    TlsParams tls2;
    CouplingKind coupling{CouplingKind::MomentumMomentum};
    double lambda{0.0};
};

struct PairState {
    ConjugatePair c1;
    ConjugatePair c2;
};

struct BathSystem {
    TlsParams system;
    std::vector<TlsParams> env;
    std::vector<double> lambdas;

    // Same parameters and coupling for every environmental TLS.
    static BathSystem uniform(const TlsParams& system, const TlsParams& env_tls, std::size_t n,
                              double lambda) {
        BathSystem b{system, std::vector<TlsParams>(n, env_tls), std::vector<double>(n, lambda)};
        b.validate();
        return b;
    }

    std::size_t size() const noexcept { return env.size(); }

    void validate() const {
        if (env.empty()) throw DomainError("BathSystem: environment must contain N >= 1 TLSs");
        if (env.size() != lambdas.size()) {
            throw DomainError("BathSystem: " + std::to_string(env.size()) + " environment TLSs but " +
                              std::to_string(lambdas.size()) + " couplings");
        }
        for (double l : lambdas) {
            if (!std::isfinite(l)) throw DomainError("BathSystem: non-finite coupling");
        }
    }
};

struct BathState {
    ConjugatePair central;
    std::vector<ConjugatePair> env;
};

struct IsolatedDerivative {
    double dz{0.0};
    double dphi{0.0};
};

namespace detail {

inline double root(double z) noexcept { return std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z))); }

inline void require_interior(double z, const char* where) {
    if (!(std::abs(z) < 1.0)) {
        throw UndefinedError(std::string(where) + ": coordinate singularity at |z| = 1 (z = " +
                             std::to_string(z) + ")");
    }
}

inline double isolated_energy(const TlsParams& p, double z, double phi) noexcept {
    return -2.0 * p.delta * root(z) * std::cos(phi) + 2.0 * p.epsilon * z;
}

inline double interaction(CouplingKind k, double lambda, double Z, double Phi, double z,
                          double phi) noexcept {
    switch (k) {
    case CouplingKind::PositionPosition: return lambda * std::cos(Phi) * std::cos(phi);
    case CouplingKind::MomentumMomentum: return lambda * Z * z;
    case CouplingKind::MomentumPosition: return lambda * z * std::cos(Phi);
    case CouplingKind::PositionMomentum: return lambda * Z * std::cos(phi);
    }
    return 0.0;
}

} // namespace detail

// ---------------------------------------------------------------- flows ----
// Callable right-hand sides over the flat layout. They evaluate the square
// root as sqrt(max(0, 1 - z^2)) and do not throw; the integrator decides what
// to do with non-finite results.

class IsolatedFlow {
public:
    explicit IsolatedFlow(TlsParams p) : p_(p) {}

    static constexpr std::size_t dimension() noexcept { return 2; }

    void operator()(std::span<const double> y, std::span<double> dy) const noexcept {
        const double z = y[0];
        const double phi = y[1];
        const double r = detail::root(z);
        dy[0] = -2.0 * p_.delta * r * std::sin(phi);
        dy[1] = 2.0 * p_.delta * z * std::cos(phi) / r + 2.0 * p_.epsilon;
    }

    double energy(std::span<const double> y) const noexcept {
        return detail::isolated_energy(p_, y[0], y[1]);
    }

    const TlsParams& params() const noexcept { return p_; }

private:
    TlsParams p_;
};

class PairFlow {
public:
    explicit PairFlow(PairSystem s, RhsMode mode = RhsMode::Hamiltonian) : s_(s), mode_(mode) {}

    static constexpr std::size_t dimension() noexcept { return 4; }

    void operator()(std::span<const double> y, std::span<double> dy) const noexcept {
        const double Z = y[0], Phi = y[1], z = y[2], phi = y[3];
        const double R = detail::root(Z);
        const double r = detail::root(z);
        const double sP = std::sin(Phi), cP = std::cos(Phi);
        const double sp = std::sin(phi), cp = std::cos(phi);
        const TlsParams& a = s_.tls1;
        const TlsParams& b = s_.tls2;

        const bool verbatim = mode_ == RhsMode::Verbatim;
        const double f = verbatim ? 1.0 : 2.0;

        double dZ = -f * a.delta * R * sP;
        double dPhi = 2.0 * a.epsilon + f * a.delta * Z * cP / R;
        double dz = -f * b.delta * r * sp;
        double dphi = 2.0 * b.epsilon + 2.0 * b.delta * z * cp / r;

        const double l = s_.lambda;
        switch (s_.coupling) {
        case CouplingKind::PositionPosition:
            dZ += l * sP * cp;
            dz += l * cP * sp;
            break;
        case CouplingKind::MomentumMomentum:
            dPhi += l * z;
            dphi += l * Z;
            break;
        case CouplingKind::MomentumPosition:
            dZ += l * z * sP;
            dphi += l * cP;
            break;
        case CouplingKind::PositionMomentum:
            dz += l * Z * sp;
            dPhi += l * cp;
            break;
        }
        dy[0] = dZ;
        dy[1] = dPhi;
        dy[2] = dz;
        dy[3] = dphi;
    }

    double energy(std::span<const double> y) const noexcept {
        return detail::isolated_energy(s_.tls1, y[0], y[1]) +
               detail::isolated_energy(s_.tls2, y[2], y[3]) +
               detail::interaction(s_.coupling, s_.lambda, y[0], y[1], y[2], y[3]);
    }

    const PairSystem& system() const noexcept { return s_; }
    RhsMode mode() const noexcept { return mode_; }

private:
    PairSystem s_;
    RhsMode mode_;
};

class BathFlow {
public:
    explicit BathFlow(BathSystem s, RhsMode mode = RhsMode::Hamiltonian)
        : s_(std::move(s)), mode_(mode) {
        s_.validate();
        lambda_sum_ = std::accumulate(s_.lambdas.begin(), s_.lambdas.end(), 0.0);
    }

    std::size_t dimension() const noexcept { return 2 * (s_.size() + 1); }

    void operator()(std::span<const double> y, std::span<double> dy) const noexcept {
        const std::size_t n = s_.size();
        const double Z = y[0], Phi = y[1];
        double field = 0.0;
        for (std::size_t i = 0; i < n; ++i) field += s_.lambdas[i] * y[2 * i + 2];

        const double R = detail::root(Z);
        const TlsParams& c = s_.system;
        dy[0] = -2.0 * c.delta * R * std::sin(Phi);
        dy[1] = 2.0 * c.epsilon + 2.0 * c.delta * Z * std::cos(Phi) / R + field;

        const bool verbatim = mode_ == RhsMode::Verbatim;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = y[2 * i + 2], phi = y[2 * i + 3];
            const double r = detail::root(z);
            const TlsParams& e = s_.env[i];
            const double back = verbatim ? Z * lambda_sum_ : s_.lambdas[i] * Z;
            dy[2 * i + 2] = -2.0 * e.delta * r * std::sin(phi);
            dy[2 * i + 3] = 2.0 * e.epsilon + 2.0 * e.delta * z * std::cos(phi) / r + back;
        }
    }

    double energy(std::span<const double> y) const noexcept {
        const std::size_t n = s_.size();
        double h = detail::isolated_energy(s_.system, y[0], y[1]);
        double field = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            h += detail::isolated_energy(s_.env[i], y[2 * i + 2], y[2 * i + 3]);
            field += s_.lambdas[i] * y[2 * i + 2];
        }
        return h + y[0] * field;
    }

    const BathSystem& system() const noexcept { return s_; }
    RhsMode mode() const noexcept { return mode_; }

private:
    BathSystem s_;
    RhsMode mode_;
    double lambda_sum_{0.0};
};

// ------------------------------------------------------ flat conversions ---

inline std::vector<double> to_flat(const ConjugatePair& c) { return {c.z(), c.phi()}; }

inline std::vector<double> to_flat(const PairState& s) {
    return {s.c1.z(), s.c1.phi(), s.c2.z(), s.c2.phi()};
}

inline std::vector<double> to_flat(const BathState& s) {
    std::vector<double> y;
    y.reserve(2 * (s.env.size() + 1));
    y.push_back(s.central.z());
    y.push_back(s.central.phi());
    for (const auto& c : s.env) {
        y.push_back(c.z());
        y.push_back(c.phi());
    }
    return y;
}

inline PairState pair_from_flat(std::span<const double> y) {
    return {ConjugatePair(y[0], y[1]), ConjugatePair(y[2], y[3])};
}

inline BathState bath_from_flat(std::span<const double> y) {
    BathState s{ConjugatePair(y[0], y[1]), {}};
    for (std::size_t i = 2; i + 1 < y.size(); i += 2) s.env.emplace_back(y[i], y[i + 1]);
    return s;
}

// ------------------------------------------------------ checked wrappers ---

inline double isolated_energy(const TlsParams& p, const ConjugatePair& c) {
    return detail::isolated_energy(p, c.z(), c.phi());
}

inline IsolatedDerivative isolated_rhs(const TlsParams& p, const ConjugatePair& c) {
    detail::require_interior(c.z(), "isolated_rhs");
    std::array<double, 2> y{c.z(), c.phi()}, dy{};
    IsolatedFlow{p}(y, dy);
    return {dy[0], dy[1]};
}

inline double pair_energy(const PairSystem& s, const PairState& st) {
    return PairFlow(s).energy(to_flat(st));
}

// (dZ/dt, dPhi/dt, dz/dt, dphi/dt)
inline std::array<double, 4> pair_rhs(const PairSystem& s, const PairState& st,
                                      RhsMode mode = RhsMode::Hamiltonian) {
    detail::require_interior(st.c1.z(), "pair_rhs");
    detail::require_interior(st.c2.z(), "pair_rhs");
    std::array<double, 4> dy{};
    PairFlow{s, mode}(to_flat(st), dy);
    return dy;
}

inline double bath_energy(const BathSystem& s, const BathState& st) {
    if (st.env.size() != s.size()) throw DomainError("bath_energy: state/system size mismatch");
    return BathFlow(s).energy(to_flat(st));
}

// Flat derivative (dZ, dPhi, dz_1, dphi_1, ..., dz_N, dphi_N).
inline std::vector<double> bath_rhs(const BathSystem& s, const BathState& st,
                                    RhsMode mode = RhsMode::Hamiltonian) {
    if (st.env.size() != s.size()) throw DomainError("bath_rhs: state/system size mismatch");
    detail::require_interior(st.central.z(), "bath_rhs");
    for (const auto& c : st.env) detail::require_interior(c.z(), "bath_rhs");
    std::vector<double> dy(2 * (s.size() + 1));
    BathFlow{s, mode}(to_flat(st), dy);
    return dy;
}

// Max over coordinates of |rhs - J grad H| / (1 + |rhs|), with the symplectic
// gradient (dz = -dH/dphi, dphi = +dH/dz) taken by centered differences.
template <class EnergyFn, class RhsFn>
double symplectic_gradient_check(const EnergyFn& energy, const RhsFn& rhs,
                                 std::span<const double> state, double step = 1e-6) {
    const std::size_t n = state.size();
    std::vector<double> dy(n);
    rhs(state, std::span<double>(dy));

    std::vector<double> probe(state.begin(), state.end());
    auto partial = [&](std::size_t k) {
        const double saved = probe[k];
        probe[k] = saved + step;
        const double hp = energy(std::span<const double>(probe));
        probe[k] = saved - step;
        const double hm = energy(std::span<const double>(probe));
        probe[k] = saved;
        return (hp - hm) / (2.0 * step);
    };

    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        const double dz_fd = -partial(k + 1);
        const double dphi_fd = partial(k);
        worst = std::max(worst, std::abs(dy[k] - dz_fd) / (1.0 + std::abs(dy[k])));
        worst = std::max(worst, std::abs(dy[k + 1] - dphi_fd) / (1.0 + std::abs(dy[k + 1])));
    }
    return worst;
}

} // namespace tlsmap
