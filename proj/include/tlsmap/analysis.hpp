// analysis.hpp — critical coupling, oscillatory/self-trapped classification,
// coupling-channel boundedness probe and chaos diagnostics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsmap/ensemble.hpp"
#include "tlsmap/errors.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"

namespace tlsmap {

// ------------------------------------------------------ critical coupling --

// Roots of |H_T(0)| = 2 delta1 + 2 delta2 for the epsilon = 0 pair:
//   Lambda = -(+-(2d1 + 2d2) + 2 d1 sqrt(1-Z0^2) cos Phi0 + 2 d2 sqrt(1-z0^2) cos phi0) / (Z0 z0)
// lambda_plus takes the + sign, lambda_minus the - sign.
struct CriticalCoupling {
    double lambda_minus{0.0};
    double lambda_plus{0.0};

    double positive_root() const noexcept { return std::max(lambda_minus, lambda_plus); }
    double negative_root() const noexcept { return std::min(lambda_minus, lambda_plus); }
};

inline CriticalCoupling critical_lambda(const PairState& ic, double delta1, double delta2) {
    const double Z = ic.c1.z(), z = ic.c2.z();
    const double product = Z * z;
    if (product == 0.0) throw UndefinedError("critical_lambda: Z(0) z(0) = 0");
    const double limit = 2.0 * delta1 + 2.0 * delta2;
    const double free = 2.0 * delta1 * detail::root(Z) * std::cos(ic.c1.phi()) +
                        2.0 * delta2 * detail::root(z) * std::cos(ic.c2.phi());
    return {-(-limit + free) / product, -(limit + free) / product};
}

// ------------------------------------------------------- classification ---

enum class DynamicsKind { Oscillatory, SelfTrapped };

inline std::string_view to_string(DynamicsKind k) noexcept {
    return k == DynamicsKind::Oscillatory ? "oscillatory" : "self-trapped";
}

struct DynamicsClass {
    DynamicsKind kind{DynamicsKind::Oscillatory};
    double extreme{0.0};                   // min (max) of the coordinate for positive (negative) start
    std::optional<double> first_crossing;  // Oscillatory witness
};

// Values with |x| <= this count as touching zero.
inline constexpr double crossing_tol = 1e-9;

// Self-trapped iff the coordinate keeps the sign of its initial value over
// [t0, t0 + horizon]. Crossing times are refined by linear interpolation
// between the bracketing samples.
inline DynamicsClass classify_dynamics(const Trajectory& traj, std::size_t coord, double horizon = 50.0) {
    if (traj.size() < 2) throw UndefinedError("classify_dynamics: trajectory too short");
    const double t0 = traj.times.front();
    if (traj.times.back() - t0 < horizon * (1.0 - 1e-12)) {
        throw UndefinedError("classify_dynamics: inconclusive, trajectory covers " +
                             std::to_string(traj.times.back() - t0) + " < horizon " + std::to_string(horizon));
    }
    const double start = traj.at(0, coord);
    DynamicsClass out;
    if (std::abs(start) <= crossing_tol) {
        out.kind = DynamicsKind::Oscillatory;
        out.first_crossing = t0;
        return out;
    }
    const double sign = start > 0.0 ? 1.0 : -1.0;
    double extreme = start * sign;
    for (std::size_t i = 1; i < traj.size() && traj.times[i] <= t0 + horizon * (1.0 + 1e-12); ++i) {
        const double v = traj.at(i, coord) * sign;
        extreme = std::min(extreme, v);
        if (!out.first_crossing && v <= crossing_tol) {
            const double u = traj.at(i - 1, coord) * sign;
            const double w = (u - crossing_tol) / (u - v);
            out.first_crossing = traj.times[i - 1] + std::clamp(w, 0.0, 1.0) * (traj.times[i] - traj.times[i - 1]);
        }
    }
    out.extreme = extreme * sign;
    out.kind = out.first_crossing ? DynamicsKind::Oscillatory : DynamicsKind::SelfTrapped;
    return out;
}

// --------------------------------------------------------- lambda scans ----

struct LambdaScanEntry {
    double lambda{0.0};
    DynamicsClass cls;
    double energy0{0.0};
};

struct LambdaScan {
    std::vector<LambdaScanEntry> entries;  // ascending lambda
    std::optional<Interval> bracket;       // first Oscillatory -> SelfTrapped flip
    bool sharp{false};
};

// Jump in the minimum of Z across the bracket that marks a sharp transition.
inline constexpr double sharp_jump = 0.5;

inline LambdaScan scan_lambda(const PairSystem& setup, const PairState& ic, std::vector<double> grid,
                              const IntegratorConfig& cfg, double horizon = 50.0, unsigned workers = 1) {
    if (grid.empty()) throw DomainError("scan_lambda: empty grid");
    for (double l : grid) {
        if (!std::isfinite(l)) throw DomainError("scan_lambda: non-finite grid value");
    }
    std::sort(grid.begin(), grid.end());
    LambdaScan scan;
    scan.entries.resize(grid.size());
    detail::parallel_for(0, grid.size(), detail::resolve_workers(workers), [&](std::size_t i) {
        PairSystem s = setup;
        s.lambda = grid[i];
        const PairFlow flow(s);
        IntegratorConfig c = cfg;
        c.tf = std::max(c.tf, c.t0 + horizon);
        const Trajectory traj = integrate_flow(flow, to_flat(ic), c);
        scan.entries[i] = {grid[i], classify_dynamics(traj, 0, horizon), traj.energies.front()};
    });
    for (std::size_t i = 0; i + 1 < scan.entries.size(); ++i) {
        const auto& a = scan.entries[i];
        const auto& b = scan.entries[i + 1];
        if (a.cls.kind == DynamicsKind::Oscillatory && b.cls.kind == DynamicsKind::SelfTrapped) {
            scan.bracket = Interval{a.lambda, b.lambda};
            scan.sharp = std::abs(b.cls.extreme - a.cls.extreme) >= sharp_jump;
            break;
        }
    }
    return scan;
}

// ----------------------------------------------------- boundedness probe ---

struct BoundednessReport {
    bool violated{false};
    std::optional<double> time;  // first violation
    double max_abs_z{0.0};       // over accepted samples
    std::string diagnostic;
};

// Integrates the pair with the guard disabled and the verbatim general-channel
// equations. A violation is either a sample with |z| > 1 + 1e-6 or the flow
// running into the boundary |z| = 1 with the step size collapsing there.
inline BoundednessReport boundedness_probe(const PairSystem& system, const PairState& ic, double horizon,
                                           IntegratorConfig cfg = {}) {
    cfg.guard = false;
    cfg.nonfinite = NonFinitePolicy::RejectStep;
    cfg.method = Method::AdaptiveRK45;
    cfg.t0 = 0.0;
    cfg.tf = horizon;
    const PairFlow flow(system, RhsMode::Verbatim);

    BoundednessReport report;
    try {
        const Trajectory traj = integrate(flow, to_flat(ic), cfg);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            for (std::size_t k : {std::size_t{0}, std::size_t{2}}) {
                const double a = std::abs(traj.at(i, k));
                report.max_abs_z = std::max(report.max_abs_z, a);
                if (a > 1.0 + 1e-6 && !report.violated) {
                    report.violated = true;
                    report.time = traj.times[i];
                    report.diagnostic = "|z| = " + std::to_string(a) + " at t = " + std::to_string(traj.times[i]);
                }
            }
        }
    } catch (const NumericalError& e) {
        report.violated = true;
        report.time = e.time();
        const auto& y = e.state();
        if (y.size() >= 4) report.max_abs_z = std::max(std::abs(y[0]), std::abs(y[2]));
        std::array<double, 4> dy{};
        if (y.size() >= 4) flow(y, dy);
        report.diagnostic = std::string("flow leaves [-1, 1]: ") + e.what() + " (Z = " +
                            std::to_string(y.size() >= 4 ? y[0] : 0.0) + ", z = " +
                            std::to_string(y.size() >= 4 ? y[2] : 0.0) + ", dZ/dt = " + std::to_string(dy[0]) +
                            ", dz/dt = " + std::to_string(dy[2]) + ")";
    }
    return report;
}

// ----------------------------------------------------------------- chaos ---

// Mean over all windows of `width` consecutive values of the (population)
// variance inside the window.
inline double window_variance(std::span<const double> values, std::size_t width = 21) {
    if (width < 2 || values.size() < width) {
        throw DomainError("window_variance: need at least " + std::to_string(width) + " values");
    }
    double total = 0.0;
    const std::size_t windows = values.size() - width + 1;
    for (std::size_t s = 0; s < windows; ++s) {
        double mean = 0.0;
        for (std::size_t j = 0; j < width; ++j) mean += values[s + j];
        mean /= static_cast<double>(width);
        double var = 0.0;
        for (std::size_t j = 0; j < width; ++j) var += (values[s + j] - mean) * (values[s + j] - mean);
        total += var / static_cast<double>(width);
    }
    return total / static_cast<double>(windows);
}

struct ChaosScan {
    std::vector<double> grid;
    std::vector<double> Z_tf;
    double window_variance{0.0};
};

// Flat index of a named coordinate: "Z", "Phi", "z_i", "phi_i" (i from 1).
inline std::size_t coordinate_index(std::string_view name, std::size_t n_env) {
    if (name == "Z") return 0;
    if (name == "Phi") return 1;
    const bool is_z = name.starts_with("z_");
    const bool is_phi = name.starts_with("phi_");
    if (is_z || is_phi) {
        const std::string digits(name.substr(is_z ? 2 : 4));
        std::size_t pos = 0;
        unsigned long i = 0;
        try {
            i = std::stoul(digits, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == digits.size() && i >= 1 && i <= n_env) return 2 * i + (is_z ? 0 : 1);
    }
    throw DomainError("unknown coordinate '" + std::string(name) + "' (expected Z, Phi, z_i or phi_i with 1 <= i <= " +
                      std::to_string(n_env) + ")");
}

// Z(t_f) as the initial value of one coordinate is swept over `grid`.
inline ChaosScan chaos_scan(const BathSystem& system, const BathState& base_ic, std::size_t coord,
                            std::vector<double> grid, double t_f, IntegratorConfig cfg = {},
                            unsigned workers = 1, std::size_t window = 21) {
    const BathFlow flow(system);
    const std::vector<double> base = to_flat(base_ic);
    if (coord >= base.size()) throw DomainError("chaos_scan: sweep coordinate out of range");
    cfg.t0 = 0.0;
    cfg.tf = t_f;
    cfg.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_f / cfg.dt)));

    ChaosScan out;
    out.grid = std::move(grid);
    out.Z_tf.resize(out.grid.size());
    detail::parallel_for(0, out.grid.size(), detail::resolve_workers(workers), [&](std::size_t i) {
        std::vector<double> y = base;
        y[coord] = out.grid[i];
        const Trajectory traj = integrate(flow, std::move(y), cfg);
        out.Z_tf[i] = traj.final_state()[0];
    });
    if (out.grid.size() >= window) out.window_variance = window_variance(out.Z_tf, window);
    return out;
}

namespace detail {

// Euclidean distance with phase differences taken on the circle.
inline double separation(std::span<const double> a, std::span<const double> b, std::vector<double>& diff) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = b[i] - a[i];
        if (i % 2 == 1) d = std::remainder(d, two_pi);
        diff[i] = d;
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace detail

struct DivergenceOptions {
    double perturbation{1e-8};
    double horizon{400.0};
    double segment{0.5};         // separation sampled every `segment` time units
    double renormalize_at{1e-3};
};

// Two-trajectory estimate of the largest Lyapunov exponent: the log of the
// accumulated separation growth is fitted by least squares over the second
// half of the horizon. Integrable motion gives O(1/horizon).
template <class Flow>
double divergence_rate(const Flow& flow, std::vector<double> ic, IntegratorConfig cfg = {},
                       DivergenceOptions opt = {}) {
    const std::size_t n = ic.size();
    std::vector<double> fid = ic;
    std::vector<double> pert = ic;
    const double unit = opt.perturbation / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) pert[i] += (i % 2 == 0 && pert[i] > 0.0) ? -unit : unit;
    std::vector<double> diff(n);
    double d0 = detail::separation(fid, pert, diff);

    const auto segments = static_cast<std::size_t>(std::ceil(opt.horizon / opt.segment));
    std::vector<double> ts, logs;
    double accumulated = 0.0;
    cfg.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opt.segment / cfg.dt)));
    for (std::size_t s = 0; s < segments; ++s) {
        cfg.t0 = static_cast<double>(s) * opt.segment;
        cfg.tf = cfg.t0 + opt.segment;
        const Trajectory a = integrate(flow, fid, cfg);
        const Trajectory b = integrate(flow, pert, cfg);
        fid.assign(a.final_state().begin(), a.final_state().end());
        pert.assign(b.final_state().begin(), b.final_state().end());
        const double d = detail::separation(fid, pert, diff);
        if (!(d > 0.0) || !std::isfinite(d)) break;
        ts.push_back(cfg.tf);
        logs.push_back(accumulated + std::log(d / d0));
        if (d > opt.renormalize_at) {
            accumulated += std::log(d / d0);
            for (std::size_t i = 0; i < n; ++i) {
                pert[i] = fid[i] + diff[i] * (d0 / d);
                if (i % 2 == 0) pert[i] = std::clamp(pert[i], -1.0, 1.0);
            }
            d0 = detail::separation(fid, pert, diff);
        }
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.5 * opt.horizon) continue;
        sx += ts[i];
        sy += logs[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * logs[i];
        m += 1.0;
    }
    if (m < 2.0) throw NumericalError("divergence_rate: not enough samples in the fit window");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace tlsmap
