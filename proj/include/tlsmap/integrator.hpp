// integrator.hpp — fixed-step RK4 and adaptive Dormand-Prince 5(4) drivers
// for the flat conjugate-pair layout, with a coordinate-singularity guard and
// energy monitoring.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "tlsmap/errors.hpp"
#include "tlsmap/geometry.hpp"

namespace tlsmap {

enum class Method { FixedRK4, AdaptiveRK45 };

// What to do when a stage produces NaN/Inf. Abort throws NumericalError;
// RejectStep (adaptive only) treats the trial step as failed and shrinks it.
enum class NonFinitePolicy { Abort, RejectStep };

struct IntegratorConfig {
    Method method{Method::AdaptiveRK45};
    double dt{1e-3};        // fixed step; output spacing is dt * sample_every for both methods
    double rel_tol{3e-12};
    double abs_tol{3e-14};
    double z_guard{1e-12};
    bool guard{true};       // clamp |z| <= 1 - z_guard before every evaluation
    double t0{0.0};
    double tf{10.0};
    std::size_t sample_every{10};
    NonFinitePolicy nonfinite{NonFinitePolicy::Abort};
    double min_step{1e-14};
    std::size_t max_steps{200'000'000};

    double sample_interval() const noexcept { return dt * static_cast<double>(sample_every); }

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator: dt must be > 0");
        if (!(tf > t0)) throw DomainError("integrator: tf must exceed t0");
        if (!(z_guard > 0.0 && z_guard < 1e-3)) {
            throw DomainError("integrator: z_guard must lie in (0, 1e-3)");
        }
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("integrator: tolerances must be > 0");
        if (sample_every == 0) throw DomainError("integrator: sample_every must be >= 1");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;    // row-major, dim entries per sample
    std::size_t dim{0};
    std::vector<double> energies;  // empty when no energy function was supplied
    double energy_drift{0.0};
    std::size_t steps{0};          // accepted steps
    std::size_t rejected{0};

    std::size_t size() const noexcept { return times.size(); }

    std::span<const double> state(std::size_t i) const noexcept {
        return {states.data() + i * dim, dim};
    }

    double at(std::size_t i, std::size_t coord) const noexcept { return states[i * dim + coord]; }

    std::vector<double> column(std::size_t coord) const {
        std::vector<double> c(size());
        for (std::size_t i = 0; i < size(); ++i) c[i] = at(i, coord);
        return c;
    }

    std::span<const double> final_state() const noexcept { return state(size() - 1); }
};

// Max over samples of |H(t) - H(t0)|.
inline double energy_drift(const Trajectory& traj) {
    if (traj.energies.empty()) throw DomainError("energy_drift: trajectory has no energies");
    double worst = 0.0;
    for (double e : traj.energies) worst = std::max(worst, std::abs(e - traj.energies.front()));
    return worst;
}

// Tag for integrations without an energy function.
struct NoEnergy {};

namespace detail {

inline bool all_finite(std::span<const double> v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// Evaluates rhs at y with the singularity guard applied to a scratch copy.
template <class Rhs>
class GuardedRhs {
public:
    GuardedRhs(const Rhs& rhs, const IntegratorConfig& cfg, std::size_t dim)
        : rhs_(rhs), guard_(cfg.guard), limit_(1.0 - cfg.z_guard), scratch_(dim) {}

    void operator()(std::span<const double> y, std::span<double> dy) {
        if (!guard_) {
            rhs_(y, dy);
            return;
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            scratch_[i] = (i % 2 == 0) ? std::clamp(y[i], -limit_, limit_) : y[i];
        }
        rhs_(std::span<const double>(scratch_), dy);
    }

private:
    const Rhs& rhs_;
    bool guard_;
    double limit_;
    std::vector<double> scratch_;
};

// Post-step normalization: phases wrapped to [0, 2pi), population
// differences kept in [-1, 1] while the guard is active.
inline void normalize_state(std::span<double> y, bool guard) noexcept {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i % 2 == 1) {
            y[i] = wrap_phase(y[i]);
        } else if (guard) {
            y[i] = std::clamp(y[i], -1.0, 1.0);
        }
    }
}

template <class Energy>
class Recorder {
public:
    Recorder(Trajectory& traj, const Energy& energy) : traj_(traj), energy_(energy) {}

    void operator()(double t, std::span<const double> y) {
        traj_.times.push_back(t);
        traj_.states.insert(traj_.states.end(), y.begin(), y.end());
        if constexpr (!std::is_same_v<Energy, NoEnergy>) {
            traj_.energies.push_back(energy_(y));
        }
    }

private:
    Trajectory& traj_;
    const Energy& energy_;
};

[[noreturn]] inline void fail_nonfinite(double t, std::span<const double> y) {
    throw NumericalError("non-finite derivative at t = " + std::to_string(t), t,
                         std::vector<double>(y.begin(), y.end()));
}

// Output grid t0 + k * interval, last point tf.
inline std::vector<double> output_grid(const IntegratorConfig& cfg) {
    const double interval = cfg.sample_interval();
    const double span = cfg.tf - cfg.t0;
    const auto count = static_cast<std::size_t>(std::ceil(span / interval - 1e-9));
    std::vector<double> grid;
    grid.reserve(count + 1);
    for (std::size_t k = 0; k < count; ++k) grid.push_back(cfg.t0 + static_cast<double>(k) * interval);
    grid.push_back(cfg.tf);
    return grid;
}

template <class Rhs, class Record>
void run_rk4(const Rhs& rhs, std::vector<double>& y, const IntegratorConfig& cfg, Record& record,
             Trajectory& traj) {
    const std::size_t n = y.size();
    GuardedRhs<Rhs> f(rhs, cfg, n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    const auto steps_total =
        static_cast<std::size_t>(std::ceil((cfg.tf - cfg.t0) / cfg.dt - 1e-9));
    double t = cfg.t0;
    record(t, y);
    for (std::size_t s = 1; s <= steps_total; ++s) {
        const double t_next =
            (s == steps_total) ? cfg.tf : cfg.t0 + static_cast<double>(s) * cfg.dt;
        const double h = t_next - t;
        f(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        f(tmp, k4);
        if (!all_finite(k1) || !all_finite(k2) || !all_finite(k3) || !all_finite(k4)) {
            fail_nonfinite(t, y);
        }
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        normalize_state(y, cfg.guard);
        t = t_next;
        ++traj.steps;
        if (s % cfg.sample_every == 0 || s == steps_total) record(t, y);
    }
}

template <class Rhs, class Record>
void run_dopri5(const Rhs& rhs, std::vector<double>& y, const IntegratorConfig& cfg,
                Record& record, Trajectory& traj) {
    using T = Dopri5;
    const std::size_t n = y.size();
    GuardedRhs<Rhs> f(rhs, cfg, n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

    const std::vector<double> grid = output_grid(cfg);
    double t = cfg.t0;
    record(t, y);

    auto scale = [&](double a, double b) {
        return cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a), std::abs(b));
    };
    auto rms = [&](std::span<const double> v, std::span<const double> ref) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = v[i] / scale(ref[i], ref[i]);
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(n));
    };

    f(y, k1);
    if (!all_finite(k1)) fail_nonfinite(t, y);

    // Initial step estimate (Hairer, Norsett & Wanner, II.4).
    double h;
    {
        const double d0 = rms(y, y);
        const double d1 = rms(k1, y);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, cfg.sample_interval());
        // Shrink the trial step until the Euler probe stays where f is finite.
        for (int tries = 0;; ++tries) {
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h0 * k1[i];
            f(tmp, k2);
            if (all_finite(k2) || tries == 60 || h0 * 0.2 < cfg.min_step) break;
            h0 *= 0.2;
        }
        for (std::size_t i = 0; i < n; ++i) k3[i] = (k2[i] - k1[i]) / h0;
        const double d2 = all_finite(k2) ? rms(k3, y) : std::numeric_limits<double>::infinity();
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, cfg.sample_interval()});
        if (!(h > 0.0)) h = h0;
    }

    bool last_rejected = false;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double target = grid[g];
        while (t < target) {
            if (traj.steps + traj.rejected >= cfg.max_steps) {
                throw NumericalError("integrator: step budget exhausted", t, y);
            }
            const bool clipped = t + h >= target - 1e-12 * std::max(1.0, std::abs(target));
            const double hs = clipped ? target - t : h;

            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * T::a21 * k1[i];
            f(tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (T::a31 * k1[i] + T::a32 * k2[i]);
            f(tmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + hs * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
            f(tmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + hs * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] +
                                      T::a54 * k4[i]);
            f(tmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = y[i] + hs * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] +
                                      T::a64 * k4[i] + T::a65 * k5[i]);
            f(tmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + hs * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] +
                                       T::a75 * k5[i] + T::a76 * k6[i]);
            f(ynew, k7);

            double err = std::numeric_limits<double>::infinity();
            const bool finite = all_finite(k2) && all_finite(k3) && all_finite(k4) &&
                                all_finite(k5) && all_finite(k6) && all_finite(k7) &&
                                all_finite(ynew);
            if (finite) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double e = hs * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] +
                                           T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
                    const double q = e / scale(y[i], ynew[i]);
                    acc += q * q;
                }
                err = std::sqrt(acc / static_cast<double>(n));
            } else if (cfg.nonfinite == NonFinitePolicy::Abort) {
                fail_nonfinite(t, y);
            }

            if (err <= 1.0) {
                t = clipped ? target : t + hs;
                y.swap(ynew);
                normalize_state(y, cfg.guard);
                k1.swap(k7);
                ++traj.steps;
                double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
                const double h_next = hs * fac;
                h = clipped ? std::max(h, h_next) : h_next;
                last_rejected = false;
            } else {
                ++traj.rejected;
                const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
                h = hs * fac;
                last_rejected = true;
                if (h < cfg.min_step) {
                    throw NumericalError("integrator: step size underflow at t = " + std::to_string(t),
                                         t, y);
                }
            }
        }
        record(t, y);
    }
}

} // namespace detail

// Integrates dy/dt = rhs(y) from cfg.t0 to cfg.tf. `rhs` is a callable
// (span<const double> y, span<double> dy); `energy` is a callable
// (span<const double>) -> double or NoEnergy. Samples are taken on the grid
// t0 + k * dt * sample_every (plus tf); the adaptive driver lands exactly on
// each grid point.
template <class Rhs, class Energy = NoEnergy>
Trajectory integrate(const Rhs& rhs, std::vector<double> initial, const IntegratorConfig& cfg,
                     const Energy& energy = {}) {
    cfg.validate();
    if (initial.empty() || initial.size() % 2 != 0) {
        throw DomainError("integrate: state must hold whole (z, phi) pairs");
    }
    for (std::size_t i = 0; i < initial.size(); i += 2) {
        if (!std::isfinite(initial[i]) || !std::isfinite(initial[i + 1]) || std::abs(initial[i]) > 1.0) {
            throw DomainError("integrate: initial population difference outside [-1, 1]");
        }
    }
    Trajectory traj;
    traj.dim = initial.size();
    detail::Recorder<Energy> record(traj, energy);
    std::vector<double> y = std::move(initial);
    detail::normalize_state(y, cfg.guard);
    if (cfg.method == Method::FixedRK4) {
        detail::run_rk4(rhs, y, cfg, record, traj);
    } else {
        detail::run_dopri5(rhs, y, cfg, record, traj);
    }
    if (!traj.energies.empty()) traj.energy_drift = energy_drift(traj);
    return traj;
}

// Convenience overload for the flow classes, which carry their own energy.
template <class Flow>
Trajectory integrate_flow(const Flow& flow, std::vector<double> initial, const IntegratorConfig& cfg) {
    auto energy = [&flow](std::span<const double> y) { return flow.energy(y); };
    return integrate(flow, std::move(initial), cfg, energy);
}

} // namespace tlsmap
