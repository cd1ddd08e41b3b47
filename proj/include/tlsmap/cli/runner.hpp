// runner.hpp — dispatch of a validated RunConfig to the simulation modules
// and CSV serialization of the results.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tlsmap/analysis.hpp"
#include "tlsmap/cli/config.hpp"
#include "tlsmap/ensemble.hpp"
#include "tlsmap/errors.hpp"
#include "tlsmap/geometry.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"
#include "tlsmap/quantum_oracle.hpp"
#include "tlsmap/random.hpp"

namespace tlsmap::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_validation = 4;

// ------------------------------------------------------------- builders ----

inline IntegratorConfig integrator_config(const RunConfig& c) {
    IntegratorConfig ic;
    ic.method = c.method;
    ic.dt = c.dt;
    ic.rel_tol = c.rel_tol;
    ic.abs_tol = c.abs_tol;
    ic.z_guard = c.z_guard;
    ic.guard = c.guard;
    ic.t0 = c.t0;
    ic.tf = c.tf;
    ic.sample_every = c.sample_every;
    return ic;
}

inline PairSystem pair_system(const RunConfig& c) {
    return {{c.delta, c.epsilon}, {c.delta2, c.epsilon2}, c.coupling, c.lambda};
}

inline PairState pair_ic(const RunConfig& c) { return {ConjugatePair(c.Z0, c.Phi0), ConjugatePair(c.z0, c.phi0)}; }

inline BathSystem bath_system(const RunConfig& c) {
    BathSystem b;
    b.system = {c.delta, c.epsilon};
    for (std::size_t i = 0; i < c.N; ++i) {
        b.env.push_back({c.env_deltas.empty() ? c.env_delta : c.env_deltas[i],
                         c.env_epsilons.empty() ? c.env_epsilon : c.env_epsilons[i]});
        b.lambdas.push_back(c.lambdas.empty() ? c.lambda : c.lambdas[i]);
    }
    b.validate();
    return b;
}

inline EnsembleSpec ensemble_spec(const RunConfig& c) {
    EnsembleSpec s;
    s.system = bath_system(c);
    s.central_ic = ConjugatePair(c.Z0, c.Phi0);
    s.n = c.n;
    s.master_seed = c.seed;
    s.integrator = integrator_config(c);
    s.mode = c.rhs;
    s.average_window = c.average_window;
    s.sigma_window = c.sigma_window;
    s.workers = c.workers;
    return s;
}

// Explicit environment ICs when given, otherwise realization `c.realization`
// of the seeded ensemble.
inline BathState bath_ic(const RunConfig& c) {
    if (!c.env_z0.empty()) {
        BathState s{ConjugatePair(c.Z0, c.Phi0), {}};
        for (std::size_t i = 0; i < c.N; ++i) s.env.emplace_back(c.env_z0[i], c.env_phi0[i]);
        return s;
    }
    EnsembleSpec spec = ensemble_spec(c);
    spec.n = c.realization + 1;
    return sample_ics(spec, c.realization);
}

// ---------------------------------------------------------------- output ---

// Writes to `path` through a temporary file that is renamed on commit and
// removed otherwise; an empty path writes to stdout.
class OutputFile {
public:
    explicit OutputFile(std::string path) : path_(std::move(path)) {
        if (path_.empty()) return;
        tmp_ = path_ + ".partial";
        file_.open(tmp_, std::ios::out | std::ios::trunc);
        if (!file_) throw ConfigError("out: cannot open '" + tmp_ + "' for writing");
    }
    OutputFile(const OutputFile&) = delete;
    OutputFile& operator=(const OutputFile&) = delete;

    ~OutputFile() {
        if (!path_.empty() && !committed_) {
            file_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return path_.empty() ? std::cout : static_cast<std::ostream&>(file_); }

    void commit() {
        if (path_.empty()) {
            std::cout.flush();
            return;
        }
        file_.close();
        if (!file_) throw NumericalError("write to '" + tmp_ + "' failed");
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    std::ofstream file_;
    bool committed_{false};
};

inline void write_metadata(std::ostream& os, const RunConfig& c) {
    os << "# tlsmap " << to_string(c.mode) << '\n';
    std::istringstream lines(serialize(c));
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
}

inline void write_row(std::ostream& os, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << format_double(values[i]);
    }
    os << '\n';
}

inline void write_row(std::ostream& os, std::initializer_list<double> values) {
    write_row(os, std::span<const double>(values.begin(), values.size()));
}

// t, Z, Phi, z_1..z_N, phi_1..phi_N, H
inline void write_trajectory(std::ostream& os, const Trajectory& traj) {
    const std::size_t n_env = traj.dim / 2 - 1;
    os << "t,Z,Phi";
    for (std::size_t i = 1; i <= n_env; ++i) os << ",z_" << i;
    for (std::size_t i = 1; i <= n_env; ++i) os << ",phi_" << i;
    os << ",H\n";
    std::vector<double> row;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        row.assign({traj.times[k], traj.at(k, 0), traj.at(k, 1)});
        for (std::size_t i = 1; i <= n_env; ++i) row.push_back(traj.at(k, 2 * i));
        for (std::size_t i = 1; i <= n_env; ++i) row.push_back(traj.at(k, 2 * i + 1));
        if (!traj.energies.empty()) row.push_back(traj.energies[k]);
        write_row(os, row);
    }
}

// ----------------------------------------------------------------- modes ---

namespace detail {

inline std::string relative_drift(const Trajectory& traj) {
    const double rel = traj.energy_drift / std::max(1.0, std::abs(traj.energies.front()));
    return "energy_drift=" + format_double(traj.energy_drift) + " relative_drift=" + format_double(rel);
}

inline int run_trajectory(const RunConfig& c, std::ostream& summary) {
    const IntegratorConfig cfg = integrator_config(c);
    Trajectory traj;
    std::string extra;
    if (c.mode == Mode::Isolated) {
        traj = integrate_flow(IsolatedFlow({c.delta, c.epsilon}), to_flat(ConjugatePair(c.Z0, c.Phi0)), cfg);
    } else if (c.mode == Mode::Pair) {
        traj = integrate_flow(PairFlow(pair_system(c), c.rhs), to_flat(pair_ic(c)), cfg);
    } else {
        traj = integrate_flow(BathFlow(bath_system(c), c.rhs), to_flat(bath_ic(c)), cfg);
    }
    if (c.mode != Mode::Isolated && c.tf - c.t0 >= c.horizon) {
        const DynamicsClass cls = classify_dynamics(traj, 0, c.horizon);
        extra = std::string(" class=") + std::string(to_string(cls.kind)) + " extreme_Z=" + format_double(cls.extreme);
    }
    OutputFile out(c.out);
    write_metadata(out.stream(), c);
    write_trajectory(out.stream(), traj);
    out.commit();
    summary << to_string(c.mode) << ": samples=" << traj.size() << " steps=" << traj.steps << ' '
            << relative_drift(traj) << extra << '\n';
    return exit_ok;
}

inline int run_ensemble_mode(const RunConfig& c, std::ostream& summary) {
    const EnsembleStats stats = run_ensemble(ensemble_spec(c));
    OutputFile out(c.out);
    write_metadata(out.stream(), c);
    out.stream() << "t,mean_Z,std_Z\n";
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        write_row(out.stream(), {stats.times[k], stats.mean_Z[k], stats.std_Z[k]});
    }
    out.commit();
    summary << "ensemble: n_effective=" << stats.n_effective << " aborted=" << stats.aborted
            << " sigma_max=" << format_double(stats.sigma_max)
            << " time_avg_mean_Z=" << format_double(stats.time_avg_mean_Z)
            << " max_relative_drift=" << format_double(stats.max_relative_drift) << '\n';
    return exit_ok;
}

inline int run_scan_lambda(const RunConfig& c, std::ostream& summary) {
    IntegratorConfig cfg = integrator_config(c);
    const LambdaScan scan = scan_lambda(pair_system(c), pair_ic(c), c.grid, cfg, c.horizon, c.workers);
    OutputFile out(c.out);
    write_metadata(out.stream(), c);
    out.stream() << "grid_value,class,extreme_Z,first_crossing,H0\n";
    for (const auto& e : scan.entries) {
        out.stream() << format_double(e.lambda) << ',' << to_string(e.cls.kind) << ','
                     << format_double(e.cls.extreme) << ','
                     << (e.cls.first_crossing ? format_double(*e.cls.first_crossing) : std::string("nan")) << ','
                     << format_double(e.energy0) << '\n';
    }
    out.commit();
    summary << "scan-lambda: points=" << scan.entries.size();
    if (scan.bracket) {
        summary << " bracket=[" << format_double(scan.bracket->lo) << ", " << format_double(scan.bracket->hi)
                << "] sharp=" << (scan.sharp ? "yes" : "no");
    } else {
        summary << " bracket=none";
    }
    if (c.epsilon == 0.0 && c.epsilon2 == 0.0 && c.Z0 * c.z0 != 0.0) {
        const CriticalCoupling cc = critical_lambda(pair_ic(c), c.delta, c.delta2);
        summary << " lambda_c=" << format_double(cc.lambda_minus) << "," << format_double(cc.lambda_plus);
    }
    summary << '\n';
    return exit_ok;
}

inline int run_scan_chaos(const RunConfig& c, std::ostream& summary) {
    const std::size_t coord = coordinate_index(c.sweep_coord, c.N);
    const ChaosScan scan =
        chaos_scan(bath_system(c), bath_ic(c), coord, c.grid, c.tf, integrator_config(c), c.workers);
    OutputFile out(c.out);
    write_metadata(out.stream(), c);
    out.stream() << "grid_value,Z_tf\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i) write_row(out.stream(), {scan.grid[i], scan.Z_tf[i]});
    out.commit();
    summary << "scan-chaos: points=" << scan.grid.size() << " window_variance=" << format_double(scan.window_variance)
            << '\n';
    return exit_ok;
}

inline int run_probe(const RunConfig& c, std::ostream& summary) {
    OutputFile out(c.out);
    write_metadata(out.stream(), c);
    out.stream() << "kind,lambda,violated,time,max_abs_z\n";
    for (CouplingKind k : {CouplingKind::PositionPosition, CouplingKind::MomentumMomentum,
                           CouplingKind::MomentumPosition, CouplingKind::PositionMomentum}) {
        PairSystem s = pair_system(c);
        s.coupling = k;
        const BoundednessReport r = boundedness_probe(s, pair_ic(c), c.horizon, integrator_config(c));
        out.stream() << to_string(k) << ',' << format_double(c.lambda) << ',' << (r.violated ? 1 : 0) << ','
                     << (r.time ? format_double(*r.time) : std::string("nan")) << ','
                     << format_double(r.max_abs_z) << '\n';
        summary << "probe " << to_string(k) << ": " << (r.violated ? "violated" : "bounded");
        if (r.violated) summary << " at t=" << format_double(*r.time) << " (" << r.diagnostic << ")";
        summary << '\n';
    }
    out.commit();
    return exit_ok;
}

inline bool report(std::ostream& os, const std::string& name, double value, double limit) {
    const bool ok = value < limit;
    os << (ok ? "PASS " : "FAIL ") << name << ": " << format_double(value) << " < " << format_double(limit) << '\n';
    return ok;
}

// Quick self-check of the mapping, the equations of motion and the
// integrator at the configured tolerances.
inline int run_validate(const RunConfig& c, std::ostream& summary) {
    IntegratorConfig cfg = integrator_config(c);
    bool ok = true;

    double oracle = 0.0;
    CounterStream rng(c.seed, 0);
    IntegratorConfig ocfg = cfg;
    ocfg.t0 = 0.0;
    ocfg.tf = 10.0;
    for (double delta : {0.5, 1.0, 2.0}) {
        for (double eps : {0.0, 0.5, 1.0}) {
            for (int k = 0; k < 3; ++k) {
                const ConjugatePair ic(rng.uniform(-0.95, 0.95), rng.uniform(0.0, two_pi));
                oracle = std::max(oracle, compare_isolated({delta, eps}, ic, ocfg));
            }
        }
    }
    ok &= report(summary, "oracle equivalence max|z_classical - z_quantum|", oracle, 1e-6);

    double grad = 0.0;
    for (CouplingKind k : {CouplingKind::PositionPosition, CouplingKind::MomentumMomentum,
                           CouplingKind::MomentumPosition, CouplingKind::PositionMomentum}) {
        const PairFlow flow({{1.0, 0.3}, {0.7, -0.2}, k, 1.7});
        for (int i = 0; i < 10; ++i) {
            const std::vector<double> y{rng.uniform(-0.9, 0.9), rng.uniform(0.0, two_pi), rng.uniform(-0.9, 0.9),
                                        rng.uniform(0.0, two_pi)};
            grad = std::max(grad, symplectic_gradient_check([&](auto s) { return flow.energy(s); }, flow, y));
        }
    }
    const BathFlow bath(BathSystem::uniform({1.0, 0.2}, {0.8, 0.5}, 12, 0.9));
    for (int i = 0; i < 10; ++i) {
        std::vector<double> y;
        for (std::size_t j = 0; j < 13; ++j) {
            y.push_back(rng.uniform(-0.9, 0.9));
            y.push_back(rng.uniform(0.0, two_pi));
        }
        grad = std::max(grad, symplectic_gradient_check([&](auto s) { return bath.energy(s); }, bath, y));
    }
    ok &= report(summary, "symplectic gradient residual", grad, 1e-6);

    IntegratorConfig ecfg = cfg;
    ecfg.t0 = 0.0;
    ecfg.tf = 100.0;
    ecfg.sample_every = 100;
    const PairFlow pair({{1.0, 0.0}, {1.0, 0.0}, CouplingKind::MomentumMomentum, 4.5});
    const Trajectory pt = integrate_flow(pair, {0.99999, 0.0, 0.99999, 0.0}, ecfg);
    ok &= report(summary, "pair relative energy drift",
                 pt.energy_drift / std::max(1.0, std::abs(pt.energies.front())), 1e-8);
    ecfg.tf = 20.0;
    EnsembleSpec spec;
    spec.system = BathSystem::uniform({1.0, 0.0}, {1.0, 0.0}, 12, 1.0);
    spec.n = 1;
    spec.master_seed = c.seed;
    const Trajectory bt = integrate_flow(BathFlow(spec.system), to_flat(sample_ics(spec, 0)), ecfg);
    ok &= report(summary, "bath relative energy drift",
                 bt.energy_drift / std::max(1.0, std::abs(bt.energies.front())), 1e-8);

    double geometry = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ConjugatePair p(rng.uniform(-0.999, 0.999), rng.uniform(0.0, two_pi));
        const ConjugatePair q = amplitudes_to_conjugate(conjugate_to_amplitudes(p));
        geometry = std::max({geometry, std::abs(q.z() - p.z()), std::abs(std::remainder(q.phi() - p.phi(), two_pi)),
                             std::abs(conjugate_to_bloch(p).norm() - 1.0)});
    }
    ok &= report(summary, "geometry round-trip", geometry, 1e-12);

    summary << "validate: " << (ok ? "all checks passed" : "FAILED") << '\n';
    return ok ? exit_ok : exit_validation;
}

inline int run_single(const RunConfig& c, std::ostream& summary) {
    switch (c.mode) {
    case Mode::Isolated:
    case Mode::Pair:
    case Mode::Bath: return run_trajectory(c, summary);
    case Mode::Ensemble: return run_ensemble_mode(c, summary);
    case Mode::ScanLambda: return run_scan_lambda(c, summary);
    case Mode::ScanChaos: return run_scan_chaos(c, summary);
    case Mode::ProbeCouplings: return run_probe(c, summary);
    case Mode::Validate: return run_validate(c, summary);
    }
    return exit_config;
}

} // namespace detail

// Output path for one value of a sweep: "dir/name.csv" -> "dir/name_key=value.csv".
inline std::string sweep_output(const std::string& out, const std::string& key, double value) {
    if (out.empty()) return out;
    const std::filesystem::path p(out);
    std::filesystem::path name = p.stem();
    name += "_" + key + "=" + format_double(value);
    name += p.extension();
    return (p.parent_path() / name).string();
}

// Runs the configuration (every sweep value in turn). Exceptions propagate;
// the caller maps them to exit codes.
inline int run(const RunConfig& c, std::ostream& summary) {
    validate(c);
    if (c.sweep.empty()) return detail::run_single(c, summary);
    int status = exit_ok;
    for (double v : c.sweep_values) {
        RunConfig one = c;
        set_value(one, c.sweep, format_double(v));
        one.sweep.clear();
        one.sweep_values.clear();
        one.out = sweep_output(c.out, c.sweep, v);
        validate(one);
        summary << c.sweep << '=' << format_double(v) << ": ";
        status = std::max(status, detail::run_single(one, summary));
    }
    return status;
}

// Maps an exception thrown by run() to an exit code and message.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return exit_config;
    return exit_numerical;
}

} // namespace tlsmap::cli
