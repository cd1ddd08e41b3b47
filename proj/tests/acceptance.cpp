// acceptance.cpp — end-to-end acceptance checks; prints one PASS/FAIL line
// per criterion and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tlsmap/cli/presets.hpp"
#include "tlsmap/cli/runner.hpp"
#include "tlsmap/tlsmap.hpp"

using namespace tlsmap;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

cli::RunConfig preset(std::string_view name) {
    cli::RunConfig c;
    cli::apply_preset(c, name);
    c.workers = 0;
    return c;
}

const PairState transition_ic{{0.99999, 0.0}, {0.99999, 0.0}};
const PairSystem transition_pair{{1.0, 0.0}, {1.0, 0.0}, CouplingKind::MomentumMomentum, 0.0};

// 1. Classical flow reproduces the closed-form quantum populations.
Outcome oracle_equivalence() {
    CounterStream rng(101, 0);
    IntegratorConfig cfg;
    cfg.tf = 10.0;
    double worst = 0.0;
    for (double delta : {0.5, 1.0, 2.0}) {
        for (double eps : {0.0, 0.5, 1.0}) {
            for (int k = 0; k < 20; ++k) {
                const ConjugatePair ic(rng.uniform_open(-1.0, 1.0), rng.uniform(0.0, two_pi));
                worst = std::max(worst, compare_isolated({delta, eps}, ic, cfg));
            }
        }
    }
    return {worst < 1e-6, fmt("max |z_classical - z_quantum| = %.3e over 180 runs (limit 1e-6)", worst)};
}

// 2. Relative energy drift over [0, 100] for pair and bath trajectories.
Outcome energy_conservation() {
    IntegratorConfig cfg;
    cfg.tf = 100.0;
    cfg.sample_every = 100;
    double worst = 0.0;
    auto relative = [](const Trajectory& t) { return t.energy_drift / std::max(1.0, std::abs(t.energies.front())); };
    for (double lambda : {1.0, 2.0, 3.0, 3.9, 4.0, 4.1, 4.5, 8.0}) {
        PairSystem s = transition_pair;
        s.lambda = lambda;
        worst = std::max(worst, relative(integrate_flow(PairFlow(s), to_flat(transition_ic), cfg)));
    }
    std::size_t bath_runs = 0;
    for (double lambda : {0.5, 1.0, 50.0}) {
        EnsembleSpec spec;
        spec.system = BathSystem::uniform({1.0, 0.0}, {1.0, 0.0}, 12, lambda);
        spec.n = 3;
        for (std::size_t i = 0; i < spec.n; ++i, ++bath_runs) {
            worst = std::max(worst, relative(integrate_flow(BathFlow(spec.system), to_flat(sample_ics(spec, i)), cfg)));
        }
    }
    return {worst < 1e-8, fmt("max relative drift = %.3e over 8 pair and %zu bath runs (limit 1e-8)", worst, bath_runs)};
}

// 3. Analytic critical coupling and its empirical bracket.
Outcome critical_coupling() {
    const double lc = critical_lambda(transition_ic, 1.0, 1.0).positive_root();
    IntegratorConfig cfg;
    cfg.tf = 50.0;
    const LambdaScan scan = scan_lambda(transition_pair, transition_ic, {3.9, 4.1}, cfg, 50.0, 0);
    const bool below = scan.entries[0].cls.kind == DynamicsKind::Oscillatory;
    const bool above = scan.entries[1].cls.kind == DynamicsKind::SelfTrapped;
    const bool bracketed = scan.bracket && scan.bracket->lo < lc && lc < scan.bracket->hi;
    const bool pass = std::abs(lc - 3.9822) <= 1e-3 && below && above && bracketed;
    return {pass, fmt("lambda_c = %.6f; 3.9 %s, 4.1 %s; bracket [%g, %g]", lc,
                      std::string(to_string(scan.entries[0].cls.kind)).c_str(),
                      std::string(to_string(scan.entries[1].cls.kind)).c_str(),
                      scan.bracket ? scan.bracket->lo : NAN, scan.bracket ? scan.bracket->hi : NAN)};
}

// 4. |H_T(0)| > 2 delta1 + 2 delta2 exactly when self-trapped, on a 50-point
// grid, and the classes do not change when the output grid is refined.
Outcome energy_witness() {
    const std::vector<double> grid = linspace(0.1, 10.0, 50);
    IntegratorConfig cfg;
    cfg.tf = 50.0;
    const LambdaScan scan = scan_lambda(transition_pair, transition_ic, grid, cfg, 50.0, 0);
    IntegratorConfig fine = cfg;
    fine.dt *= 0.5;
    const LambdaScan refined = scan_lambda(transition_pair, transition_ic, grid, fine, 50.0, 0);
    std::size_t wrong = 0, flips = 0, trapped = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& e = scan.entries[i];
        const bool st = e.cls.kind == DynamicsKind::SelfTrapped;
        trapped += st;
        if (st != (std::abs(e.energy0) > 4.0)) ++wrong;
        if (e.cls.kind != refined.entries[i].cls.kind) ++flips;
    }
    return {wrong == 0 && flips == 0,
            fmt("%zu misclassifications, %zu self-trapped of 50, %zu flips under dt/2", wrong, trapped, flips)};
}

// 5. Only the momentum-momentum channel keeps |z| <= 1.
Outcome channel_boundedness() {
    std::vector<PairState> ics;
    for (double Z : {0.99999, 0.9, 0.5, 0.0, -0.7}) {
        for (double z : {0.99999, -0.3}) ics.push_back({{Z, pi / 4}, {z, pi / 4}});
    }
    std::size_t escaped = 0, general = 0, mm_violations = 0, mm_runs = 0;
    for (const auto& ic : ics) {
        for (CouplingKind k : {CouplingKind::PositionPosition, CouplingKind::MomentumPosition,
                               CouplingKind::PositionMomentum}) {
            ++general;
            escaped += boundedness_probe({{1, 0}, {1, 0}, k, 10.0}, ic, 50.0).violated;
        }
        for (double lambda : {0.0, 1.0, 10.0, 50.0, 100.0}) {
            ++mm_runs;
            mm_violations +=
                boundedness_probe({{1, 0}, {1, 0}, CouplingKind::MomentumMomentum, lambda}, ic, 50.0).violated;
        }
    }
    return {escaped == general && mm_violations == 0,
            fmt("general channels left [-1, 1] in %zu/%zu runs; mm violated in %zu/%zu runs", escaped, general,
                mm_violations, mm_runs)};
}

struct Ensembles {
    EnsembleStats weak, strong, biased;
};

// 6. Dispersion of the ensemble at weak and strong coupling.
Outcome bath_dispersion(const Ensembles& e) {
    const double min_mean = *std::min_element(e.strong.mean_Z.begin(), e.strong.mean_Z.end());
    const bool weak_ok = e.weak.sigma_max >= 0.56 && e.weak.sigma_max <= 0.76;
    const bool strong_ok = e.strong.sigma_max >= 0.02 && e.strong.sigma_max <= 0.08;
    const bool localized = min_mean > 0.8;
    return {weak_ok && strong_ok && localized,
            fmt("lambda=0.5 sigma_max = %.4f [0.56, 0.76] %s; lambda=50 sigma_max = %.4f [0.02, 0.08] %s, "
                "min mean_Z = %.4f (> 0.8) %s",
                e.weak.sigma_max, weak_ok ? "ok" : "out", e.strong.sigma_max, strong_ok ? "ok" : "out", min_mean,
                localized ? "ok" : "out")};
}

// 7. Envelope of |mean_Z| decays after the first period.
Outcome weak_coupling_damping(const EnsembleStats& s) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < s.times.size(); ++i) {
        if (s.times[i] <= pi) continue;
        const double a = std::abs(s.mean_Z[i - 1]), b = std::abs(s.mean_Z[i]), c = std::abs(s.mean_Z[i + 1]);
        if (b >= a && b > c) peaks.push_back(b);
    }
    std::size_t rises = 0;
    for (std::size_t i = 1; i < peaks.size(); ++i) rises += peaks[i] > peaks[i - 1] + 0.05;
    return {peaks.size() >= 2 && rises == 0,
            fmt("%zu maxima after t = pi, first %.4f, last %.4f, %zu rises above the 0.05 allowance", peaks.size(),
                peaks.empty() ? NAN : peaks.front(), peaks.empty() ? NAN : peaks.back(), rises)};
}

// 8. Biased environment shifts the long-time average of the central TLS.
Outcome environment_asymmetry(const EnsembleStats& s) {
    const auto ci = bootstrap_mean_ci(s.realization_time_avg, 0.99, 5000, 2024);
    const bool excludes = ci.lo > 0.0 || ci.hi < 0.0;
    return {excludes, fmt("second-half average %.4f, 99%% CI [%.4f, %.4f] over %zu realizations", ci.estimate, ci.lo,
                          ci.hi, s.realization_time_avg.size())};
}

// 9. Sensitivity of Z(t_f) to the initial phase of environment TLS 1.
Outcome chaos_onset() {
    const cli::RunConfig c = preset("fig6");
    const BathSystem system = cli::bath_system(c);
    const BathState ic = cli::bath_ic(c);
    const std::size_t coord = coordinate_index(c.sweep_coord, c.N);
    IntegratorConfig cfg = cli::integrator_config(c);
    const ChaosScan regular = chaos_scan(system, ic, coord, linspace(0.0, 0.007, 71), c.tf, cfg, 0);
    const ChaosScan irregular = chaos_scan(system, ic, coord, linspace(0.01, 0.1, 901), c.tf, cfg, 0);
    const double ratio = irregular.window_variance / std::max(regular.window_variance, 1e-300);

    DivergenceOptions opt;
    opt.horizon = 400.0;
    auto rate_at = [&](double phi1) {
        std::vector<double> y = to_flat(ic);
        y[coord] = phi1;
        return divergence_rate(BathFlow(system), y, cfg, opt);
    };
    const double r_irregular = rate_at(0.05);
    const double r_regular = rate_at(0.0035);
    const bool pass = ratio >= 10.0 && r_irregular > 0.05 && std::abs(r_regular) < 0.01;
    return {pass, fmt("window variance ratio %.2f (>= 10); divergence rate %.4f at phi_1 = 0.05 (> 0.05), "
                      "%.4f at phi_1 = 0.0035 (|.| < 0.01)",
                      ratio, r_irregular, r_regular)};
}

// 10. Geometry properties on 10^4 random states each.
Outcome geometry_properties() {
    CounterStream rng(110, 0);
    auto state = [&]() {
        const double z = rng.uniform_open(-1.0, 1.0);
        return ComplexAmplitudePair{std::polar(std::sqrt(0.5 * (1 + z)), rng.uniform(0, two_pi)),
                                    std::polar(std::sqrt(0.5 * (1 - z)), rng.uniform(0, two_pi))};
    };
    double phase = 0, norm = 0, round = 0, involution = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto s = state();
        const complex g = std::polar(1.0, rng.uniform(0, two_pi));
        const BlochVector a = hopf_project(s), b = hopf_project({g * s.a1, g * s.a2});
        phase = std::max({phase, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
    }
    for (int i = 0; i < 10000; ++i) norm = std::max(norm, std::abs(hopf_project(state()).norm() - 1.0));
    for (int i = 0; i < 10000; ++i) {
        const ConjugatePair c(rng.uniform(-0.999999, 0.999999), rng.uniform(0, two_pi));
        const ConjugatePair back = amplitudes_to_conjugate(conjugate_to_amplitudes(c));
        round = std::max({round, std::abs(back.z() - c.z()), std::abs(std::remainder(back.phi() - c.phi(), two_pi))});
    }
    for (int i = 0; i < 10000; ++i) {
        const BasisRotation r{rng.uniform(0, pi / 2)};
        const auto s = state();
        const auto t = lr_transform(r, lr_transform(r, s));
        involution = std::max({involution, std::abs(t.a1 - s.a1), std::abs(t.a2 - s.a2)});
    }
    const double worst = std::max({phase, norm, round, involution});
    return {worst < 1e-12, fmt("phase %.1e, norm %.1e, round-trip %.1e, involution %.1e (limit 1e-12)", phase, norm,
                               round, involution)};
}

EnsembleStats ensemble(std::string_view name) {
    return run_ensemble(cli::ensemble_spec(preset(name)));
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    auto check = [&](int id, const char* title, const std::function<Outcome()>& body) {
        const auto start = clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    };

    check(1, "oracle equivalence", oracle_equivalence);
    check(2, "energy conservation", energy_conservation);
    check(3, "critical coupling", critical_coupling);
    check(4, "self-trapping energy witness", energy_witness);
    check(5, "channel boundedness", channel_boundedness);

    Ensembles e;
    bool have_weak = false;
    check(6, "bath dispersion", [&] {
        e.weak = ensemble("fig8-weak");
        have_weak = true;
        e.strong = ensemble("fig8-strong");
        return bath_dispersion(e);
    });
    check(7, "weak-coupling damping", [&] {
        if (!have_weak) e.weak = ensemble("fig8-weak");
        return weak_coupling_damping(e.weak);
    });
    check(8, "environment-induced asymmetry", [&] { return environment_asymmetry(ensemble("fig11")); });
    check(9, "chaos onset", chaos_onset);
    check(10, "geometry properties", geometry_properties);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
