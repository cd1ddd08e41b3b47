// tlsmap.cpp — command-line front end: isolated, pair and bath trajectories,
// ensembles, scans, the coupling boundedness probe and a self-validation run.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tlsmap/cli/config.hpp"
#include "tlsmap/cli/presets.hpp"
#include "tlsmap/cli/runner.hpp"

namespace {

struct Flags {
    std::string config;
    std::string preset;
    std::optional<std::string> seed, workers, out, dt, tol, lambda, n, N, tf;
    std::vector<std::string> set;
    bool print_config{false};
};

void add_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config, "key=value config file");
    cmd.add_option("--preset", f.preset, "shipped preset (see `tlsmap presets`)");
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--workers", f.workers, "worker threads (0: all cores)");
    cmd.add_option("--out", f.out, "output CSV path (default: stdout)");
    cmd.add_option("--dt", f.dt, "fixed step / output spacing unit");
    cmd.add_option("--tol", f.tol, "relative tolerance of the adaptive integrator");
    cmd.add_option("--lambda", f.lambda, "coupling strength");
    cmd.add_option("--n", f.n, "number of ensemble realizations");
    cmd.add_option("--N", f.N, "number of environment TLSs");
    cmd.add_option("--tf", f.tf, "final time");
    cmd.add_option("--set", f.set, "override any config key (key=value), repeatable");
    cmd.add_flag("--print-config", f.print_config, "print the resolved configuration and exit");
}

tlsmap::cli::RunConfig resolve(const Flags& f, tlsmap::cli::Mode mode) {
    using namespace tlsmap::cli;
    RunConfig c;
    if (!f.preset.empty()) apply_preset(c, f.preset);
    if (!f.config.empty()) apply_file(c, f.config);
    c.mode = mode;
    const std::pair<const char*, const std::optional<std::string>*> direct[] = {
        {"seed", &f.seed}, {"workers", &f.workers}, {"out", &f.out}, {"dt", &f.dt},  {"rel_tol", &f.tol},
        {"lambda", &f.lambda}, {"n", &f.n},     {"N", &f.N},     {"tf", &f.tf}};
    for (const auto& [key, value] : direct) {
        if (*value) set_value(c, key, **value);
    }
    for (const auto& kv : f.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw tlsmap::ConfigError("--set: expected key=value, got '" + kv + "'");
        set_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
}

} // namespace

int main(int argc, char** argv) {
    using namespace tlsmap::cli;
    CLI::App app{"tlsmap: classical conjugate-variable dynamics of coupled two-level systems"};
    app.require_subcommand(1);

    Flags flags;
    std::vector<std::pair<CLI::App*, Mode>> commands;
    const char* help[] = {"single isolated TLS trajectory",
                          "coupled TLS pair trajectory",
                          "central TLS in an environment of N TLSs, one realization",
                          "Monte Carlo average over random environment initial conditions",
                          "oscillatory / self-trapped classification over a lambda grid",
                          "final central population over a grid of one initial coordinate",
                          "boundedness of the four coupling channels",
                          "quick self-check of mapping, equations of motion and integrator"};
    for (std::size_t i = 0; i < std::size(mode_names); ++i) {
        CLI::App* cmd = app.add_subcommand(std::string(mode_names[i]), help[i]);
        add_flags(*cmd, flags);
        commands.emplace_back(cmd, static_cast<Mode>(i));
    }
    CLI::App* list = app.add_subcommand("presets", "list the shipped presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (list->parsed()) {
        for (const auto& p : presets()) std::cout << p.name << "  " << p.description << '\n';
        return exit_ok;
    }

    try {
        for (const auto& [cmd, mode] : commands) {
            if (!cmd->parsed()) continue;
            const RunConfig config = resolve(flags, mode);
            if (flags.print_config) {
                validate(config);
                std::cout << serialize(config);
                return exit_ok;
            }
            std::ostream& summary = config.out.empty() ? std::cerr : std::cout;
            return run(config, summary);
        }
    } catch (const std::exception& e) {
        std::cerr << "tlsmap: error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return exit_config;
}
