// ensemble.hpp — seeded Monte Carlo over random environment initial
// conditions, with order-independent parallel execution.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "tlsmap/errors.hpp"
#include "tlsmap/geometry.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"
#include "tlsmap/random.hpp"

namespace tlsmap {

struct Interval {
    double lo{0.0};
    double hi{0.0};

    friend bool operator==(const Interval&, const Interval&) = default;
};

// Trapezoidal average of `values` sampled at `times` over [window.lo, window.hi];
// endpoints falling between samples are linearly interpolated.
inline double time_average(std::span<const double> times, std::span<const double> values,
                           Interval window) {
    if (times.size() != values.size()) throw DomainError("time_average: size mismatch");
    if (times.size() < 2) throw DomainError("time_average: need at least two samples");
    if (!(window.hi > window.lo)) throw DomainError("time_average: empty window");
    const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
    if (window.lo < times.front() - slack || window.hi > times.back() + slack) {
        throw DomainError("time_average: window outside the time grid");
    }
    const double a = std::max(window.lo, times.front());
    const double b = std::min(window.hi, times.back());

    auto value_at = [&](double t) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return values.front();
        if (it == times.end()) return values.back();
        const auto k = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return values[k - 1] + w * (values[k] - values[k - 1]);
    };

    double acc = 0.0;
    double t_prev = a;
    double v_prev = value_at(a);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] <= a) continue;
        if (times[k] >= b) break;
        acc += 0.5 * (v_prev + values[k]) * (times[k] - t_prev);
        t_prev = times[k];
        v_prev = values[k];
    }
    acc += 0.5 * (v_prev + value_at(b)) * (b - t_prev);
    return acc / (b - a);
}

inline double time_average(const Trajectory& traj, std::size_t coord, Interval window) {
    const auto v = traj.column(coord);
    return time_average(traj.times, v, window);
}

struct EnsembleSpec {
    BathSystem system;
    ConjugatePair central_ic{0.9999, 0.0};
    std::size_t n{2000};
    std::uint64_t master_seed{1};
    Interval z_range{-1.0, 1.0};        // open interval
    Interval phi_range{0.0, two_pi};    // half-open
    IntegratorConfig integrator;
    RhsMode mode{RhsMode::Hamiltonian};
    std::optional<Interval> average_window;  // default: second half of the run
    std::optional<Interval> sigma_window;    // default: the whole run
    unsigned workers{0};                     // 0: hardware concurrency

    void validate() const {
        system.validate();
        integrator.validate();
        if (n == 0) throw DomainError("ensemble: n must be >= 1");
        if (!(z_range.lo >= -1.0 && z_range.hi <= 1.0 && z_range.lo < z_range.hi)) {
            throw DomainError("ensemble: z_range must be a non-empty subinterval of [-1, 1]");
        }
        if (!(phi_range.lo >= 0.0 && phi_range.hi <= two_pi && phi_range.lo < phi_range.hi)) {
            throw DomainError("ensemble: phi_range must be a non-empty subinterval of [0, 2pi]");
        }
    }

    Interval resolved_average_window() const {
        return average_window.value_or(
            Interval{0.5 * (integrator.t0 + integrator.tf), integrator.tf});
    }
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> mean_Z;
    std::vector<double> std_Z;     // population standard deviation over realizations
    double sigma_max{0.0};
    double time_avg_mean_Z{0.0};
    std::size_t n_effective{0};
    std::size_t aborted{0};
    std::vector<double> realization_time_avg;  // per completed realization, index order
    double max_relative_drift{0.0};            // max |dH| / max(1, |H0|) over realizations
};

// Environment initial state of realization `index`; the central TLS starts
// from spec.central_ic.
inline BathState sample_ics(const EnsembleSpec& spec, std::size_t index) {
    if (index >= spec.n) throw DomainError("sample_ics: realization index out of range");
    CounterStream rng(spec.master_seed, index);
    BathState s{spec.central_ic, {}};
    s.env.reserve(spec.system.size());
    for (std::size_t i = 0; i < spec.system.size(); ++i) {
        const double z = rng.uniform_open(spec.z_range.lo, spec.z_range.hi);
        const double phi = rng.uniform(spec.phi_range.lo, spec.phi_range.hi);
        s.env.emplace_back(z, phi);
    }
    return s;
}

namespace detail {

struct RealizationResult {
    std::vector<double> Z;
    double time_avg{0.0};
    double relative_drift{0.0};
    bool ok{false};
    std::string failure;
};

// Runs task(i) for i in [begin, end) on `workers` threads.
template <class Task>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, const Task& task) {
    if (workers <= 1 || end - begin <= 1) {
        for (std::size_t i = begin; i < end; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::vector<std::jthread> pool;
    const auto count = std::min<std::size_t>(workers, end - begin);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) task(i);
        });
    }
}

inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace detail

// Integrates spec.n realizations and reduces the central Z(t) in realization
// order, so the result does not depend on the worker count.
inline EnsembleStats run_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    const BathFlow flow(spec.system, spec.mode);
    const Interval window = spec.resolved_average_window();
    const unsigned workers = detail::resolve_workers(spec.workers);

    EnsembleStats stats;
    std::vector<double> m2;  // Welford accumulators
    std::string first_failure;

    constexpr std::size_t chunk = 64;
    std::vector<detail::RealizationResult> results(chunk);
    for (std::size_t base = 0; base < spec.n; base += chunk) {
        const std::size_t end = std::min(spec.n, base + chunk);
        detail::parallel_for(base, end, workers, [&](std::size_t i) {
            auto& r = results[i - base];
            r = {};
            try {
                const Trajectory traj = integrate_flow(flow, to_flat(sample_ics(spec, i)), spec.integrator);
                r.Z = traj.column(0);
                r.time_avg = time_average(traj.times, r.Z, window);
                r.relative_drift = traj.energy_drift / std::max(1.0, std::abs(traj.energies.front()));
                r.ok = true;
                if (i == 0) stats.times = traj.times;
            } catch (const NumericalError& e) {
                r.failure = e.what();
            }
        });

        for (std::size_t i = base; i < end; ++i) {
            auto& r = results[i - base];
            if (!r.ok) {
                ++stats.aborted;
                if (first_failure.empty()) first_failure = "realization " + std::to_string(i) + ": " + r.failure;
                continue;
            }
            if (stats.mean_Z.empty()) {
                stats.mean_Z.assign(r.Z.size(), 0.0);
                m2.assign(r.Z.size(), 0.0);
            }
            ++stats.n_effective;
            const double k = static_cast<double>(stats.n_effective);
            for (std::size_t t = 0; t < r.Z.size(); ++t) {
                const double d = r.Z[t] - stats.mean_Z[t];
                stats.mean_Z[t] += d / k;
                m2[t] += d * (r.Z[t] - stats.mean_Z[t]);
            }
            stats.realization_time_avg.push_back(r.time_avg);
            stats.max_relative_drift = std::max(stats.max_relative_drift, r.relative_drift);
            r.Z = {};
        }
    }

    if (stats.aborted * 100 > spec.n || stats.n_effective == 0) {
        throw NumericalError("ensemble: " + std::to_string(stats.aborted) + " of " +
                             std::to_string(spec.n) + " realizations aborted (first: " + first_failure + ")");
    }
    if (stats.times.empty()) {
        // realization 0 aborted; rebuild the sample grid from the config
        stats.times = detail::output_grid(spec.integrator);
    }

    const double k = static_cast<double>(stats.n_effective);
    stats.std_Z.resize(m2.size());
    for (std::size_t t = 0; t < m2.size(); ++t) {
        stats.std_Z[t] = std::sqrt(std::max(0.0, m2[t] / k));
        stats.mean_Z[t] = std::clamp(stats.mean_Z[t], -1.0, 1.0);
    }

    const Interval sw = spec.sigma_window.value_or(Interval{stats.times.front(), stats.times.back()});
    for (std::size_t t = 0; t < stats.times.size(); ++t) {
        if (stats.times[t] >= sw.lo && stats.times[t] <= sw.hi) {
            stats.sigma_max = std::max(stats.sigma_max, stats.std_Z[t]);
        }
    }
    stats.time_avg_mean_Z = time_average(stats.times, stats.mean_Z, window);
    return stats;
}

struct ConfidenceInterval {
    double estimate{0.0};
    double lo{0.0};
    double hi{0.0};
};

// Percentile bootstrap confidence interval for the mean of `values`.
inline ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, double confidence,
                                            std::size_t resamples, std::uint64_t seed) {
    if (values.empty()) throw DomainError("bootstrap_mean_ci: no values");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("bootstrap_mean_ci: confidence in (0, 1)");
    const std::size_t n = values.size();
    double total = 0.0;
    for (double v : values) total += v;

    std::vector<double> means(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        CounterStream rng(seed, b);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto pick = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
            acc += values[std::min(pick, n - 1)];
        }
        means[b] = acc / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double alpha = 0.5 * (1.0 - confidence);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(i);
        return i + 1 < resamples ? means[i] * (1.0 - w) + means[i + 1] * w : means[i];
    };
    return {total / static_cast<double>(n), quantile(alpha), quantile(1.0 - alpha)};
}

} // namespace tlsmap
