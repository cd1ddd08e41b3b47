// config.hpp — run configuration for the command-line front end: a flat
// key=value format, validation with field-named errors and exact round-trip
// serialization.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tlsmap/analysis.hpp"
#include "tlsmap/ensemble.hpp"
#include "tlsmap/errors.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"

namespace tlsmap::cli {

enum class Mode { Isolated, Pair, Bath, Ensemble, ScanLambda, ScanChaos, ProbeCouplings, Validate };

inline constexpr std::string_view mode_names[] = {"isolated",   "pair",       "bath",            "ensemble",
                                                  "scan-lambda", "scan-chaos", "probe-couplings", "validate"};

inline std::string_view to_string(Mode m) noexcept { return mode_names[static_cast<int>(m)]; }

inline Mode parse_mode(std::string_view s) {
    for (std::size_t i = 0; i < std::size(mode_names); ++i) {
        if (mode_names[i] == s) return static_cast<Mode>(i);
    }
    throw ConfigError("mode: unknown value '" + std::string(s) +
                      "' (expected isolated|pair|bath|ensemble|scan-lambda|scan-chaos|probe-couplings|validate)");
}

struct RunConfig {
    Mode mode{Mode::Isolated};

    // first TLS of a pair, or the central TLS
    double delta{1.0};
    double epsilon{0.0};
    // second TLS of a pair
    double delta2{1.0};
    double epsilon2{0.0};
    CouplingKind coupling{CouplingKind::MomentumMomentum};
    double lambda{0.0};

    // environment; the per-TLS lists override the uniform values when non-empty
    std::size_t N{12};
    double env_delta{1.0};
    double env_epsilon{0.0};
    std::vector<double> env_deltas;
    std::vector<double> env_epsilons;
    std::vector<double> lambdas;

    // initial conditions
    double Z0{0.99999};
    double Phi0{0.0};
    double z0{0.99999};
    double phi0{0.0};
    std::vector<double> env_z0;    // empty: sampled from seed and realization
    std::vector<double> env_phi0;
    std::size_t realization{0};

    // integrator
    Method method{Method::AdaptiveRK45};
    double dt{1e-3};
    double rel_tol{IntegratorConfig{}.rel_tol};
    double abs_tol{IntegratorConfig{}.abs_tol};
    double z_guard{1e-12};
    bool guard{true};
    double t0{0.0};
    double tf{20.0};
    std::size_t sample_every{10};
    RhsMode rhs{RhsMode::Hamiltonian};

    // ensemble
    std::size_t n{2000};
    std::uint64_t seed{1};
    unsigned workers{0};
    std::optional<Interval> average_window;
    std::optional<Interval> sigma_window;

    // scans and probes
    std::vector<double> grid;
    std::string sweep_coord{"phi_1"};
    double horizon{50.0};

    // batch runs: one output per value of a scalar key
    std::string sweep;
    std::vector<double> sweep_values;

    std::string out;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------- formatting -----

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
    text = trim(text);
    Int v{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(std::string(key) + ": expected true|false, got '" + std::string(text) + "'");
}

// Comma-separated values, or lo:hi:count for count evenly spaced values
// including both ends. An empty string is the empty list.
inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
    text = trim(text);
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos) {
            throw ConfigError(std::string(key) + ": range must be lo:hi:count, got '" + std::string(text) + "'");
        }
        const double lo = parse_double(key, text.substr(0, a));
        const double hi = parse_double(key, text.substr(a + 1, b - a - 1));
        const auto count = parse_integer<std::size_t>(key, text.substr(b + 1));
        if (count == 0) throw ConfigError(std::string(key) + ": range count must be >= 1");
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(parse_double(key, text.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::optional<Interval> parse_window(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError(std::string(key) + ": expected lo:hi, got '" + std::string(text) + "'");
    }
    return Interval{parse_double(key, text.substr(0, colon)), parse_double(key, text.substr(colon + 1))};
}

inline std::string format_window(const std::optional<Interval>& w) {
    return w ? format_double(w->lo) + ":" + format_double(w->hi) : std::string{};
}

// ------------------------------------------------------------- fields ------

struct Field {
    std::string_view key;
    bool scalar;  // numeric scalar, usable as a sweep key
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

namespace detail {

#define TLSMAP_REAL(name)                                                                                   \
    Field {                                                                                                 \
        #name, true, [](RunConfig& c, std::string_view v) { c.name = parse_double(#name, v); },             \
            [](const RunConfig& c) { return format_double(c.name); }                                        \
    }
#define TLSMAP_COUNT(name, type)                                                                            \
    Field {                                                                                                 \
        #name, true, [](RunConfig& c, std::string_view v) { c.name = parse_integer<type>(#name, v); },      \
            [](const RunConfig& c) { return std::to_string(c.name); }                                       \
    }
#define TLSMAP_LIST(name)                                                                                   \
    Field {                                                                                                 \
        #name, false, [](RunConfig& c, std::string_view v) { c.name = parse_list(#name, v); },              \
            [](const RunConfig& c) { return format_list(c.name); }                                          \
    }

inline const std::vector<Field>& field_table() {
    static const std::vector<Field> table = {
        Field{"mode", false, [](RunConfig& c, std::string_view v) { c.mode = parse_mode(trim(v)); },
              [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
        TLSMAP_REAL(delta),
        TLSMAP_REAL(epsilon),
        TLSMAP_REAL(delta2),
        TLSMAP_REAL(epsilon2),
        Field{"coupling", false, [](RunConfig& c, std::string_view v) { c.coupling = parse_coupling(trim(v)); },
              [](const RunConfig& c) { return std::string(to_string(c.coupling)); }},
        TLSMAP_REAL(lambda),
        TLSMAP_COUNT(N, std::size_t),
        TLSMAP_REAL(env_delta),
        TLSMAP_REAL(env_epsilon),
        TLSMAP_LIST(env_deltas),
        TLSMAP_LIST(env_epsilons),
        TLSMAP_LIST(lambdas),
        TLSMAP_REAL(Z0),
        TLSMAP_REAL(Phi0),
        TLSMAP_REAL(z0),
        TLSMAP_REAL(phi0),
        TLSMAP_LIST(env_z0),
        TLSMAP_LIST(env_phi0),
        TLSMAP_COUNT(realization, std::size_t),
        Field{"method", false,
              [](RunConfig& c, std::string_view v) {
                  v = trim(v);
                  if (v == "rk45") c.method = Method::AdaptiveRK45;
                  else if (v == "rk4") c.method = Method::FixedRK4;
                  else throw ConfigError("method: unknown value '" + std::string(v) + "' (expected rk45|rk4)");
              },
              [](const RunConfig& c) { return std::string(c.method == Method::FixedRK4 ? "rk4" : "rk45"); }},
        TLSMAP_REAL(dt),
        TLSMAP_REAL(rel_tol),
        TLSMAP_REAL(abs_tol),
        TLSMAP_REAL(z_guard),
        Field{"guard", false, [](RunConfig& c, std::string_view v) { c.guard = parse_bool("guard", v); },
              [](const RunConfig& c) { return std::string(c.guard ? "true" : "false"); }},
        TLSMAP_REAL(t0),
        TLSMAP_REAL(tf),
        TLSMAP_COUNT(sample_every, std::size_t),
        Field{"rhs", false,
              [](RunConfig& c, std::string_view v) {
                  v = trim(v);
                  if (v == "hamiltonian") c.rhs = RhsMode::Hamiltonian;
                  else if (v == "verbatim") c.rhs = RhsMode::Verbatim;
                  else throw ConfigError("rhs: unknown value '" + std::string(v) + "' (expected hamiltonian|verbatim)");
              },
              [](const RunConfig& c) {
                  return std::string(c.rhs == RhsMode::Hamiltonian ? "hamiltonian" : "verbatim");
              }},
        TLSMAP_COUNT(n, std::size_t),
        TLSMAP_COUNT(seed, std::uint64_t),
        TLSMAP_COUNT(workers, unsigned),
        Field{"average_window", false,
              [](RunConfig& c, std::string_view v) { c.average_window = parse_window("average_window", v); },
              [](const RunConfig& c) { return format_window(c.average_window); }},
        Field{"sigma_window", false,
              [](RunConfig& c, std::string_view v) { c.sigma_window = parse_window("sigma_window", v); },
              [](const RunConfig& c) { return format_window(c.sigma_window); }},
        TLSMAP_LIST(grid),
        Field{"sweep_coord", false, [](RunConfig& c, std::string_view v) { c.sweep_coord = std::string(trim(v)); },
              [](const RunConfig& c) { return c.sweep_coord; }},
        TLSMAP_REAL(horizon),
        Field{"sweep", false, [](RunConfig& c, std::string_view v) { c.sweep = std::string(trim(v)); },
              [](const RunConfig& c) { return c.sweep; }},
        TLSMAP_LIST(sweep_values),
        Field{"out", false, [](RunConfig& c, std::string_view v) { c.out = std::string(trim(v)); },
              [](const RunConfig& c) { return c.out; }},
    };
    return table;
}

#undef TLSMAP_REAL
#undef TLSMAP_COUNT
#undef TLSMAP_LIST

} // namespace detail

inline const Field* find_field(std::string_view key) {
    for (const auto& f : detail::field_table()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

inline void set_value(RunConfig& c, std::string_view key, std::string_view value) {
    const Field* f = find_field(trim(key));
    if (!f) throw ConfigError("unknown key '" + std::string(trim(key)) + "'");
    f->set(c, value);
}

// Applies `key=value` lines on top of `c`. Blank lines and lines starting
// with '#' are ignored.
inline void apply_text(RunConfig& c, std::string_view text, std::string_view source = "config") {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        const std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected key=value, got '" + std::string(line) + "'");
        }
        try {
            set_value(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

inline void apply_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(c, ss.str(), path);
}

// One key=value line per field, in table order.
inline std::string serialize(const RunConfig& c) {
    std::string s;
    for (const auto& f : detail::field_table()) {
        s += f.key;
        s += '=';
        s += f.get(c);
        s += '\n';
    }
    return s;
}

inline RunConfig parse_config(std::string_view text) {
    RunConfig c;
    apply_text(c, text);
    return c;
}

// ----------------------------------------------------------- validation ----

namespace detail {

inline void require(bool ok, std::string_view field, double value, std::string_view range) {
    if (!ok) {
        throw ConfigError(std::string(field) + " = " + format_double(value) + " is out of range " +
                          std::string(range));
    }
}

inline void require_population(std::string_view field, double v) {
    require(std::isfinite(v) && std::abs(v) <= 1.0, field, v, "[-1, 1]");
}

inline void require_finite(std::string_view field, double v) {
    require(std::isfinite(v), field, v, "(finite real)");
}

inline void require_splitting(std::string_view field, double v) {
    require(std::isfinite(v) && v >= 0.0, field, v, "[0, inf)");
}

} // namespace detail

inline void validate(const RunConfig& c) {
    using namespace detail;
    require_splitting("delta", c.delta);
    require_finite("epsilon", c.epsilon);
    require_splitting("delta2", c.delta2);
    require_finite("epsilon2", c.epsilon2);
    require_finite("lambda", c.lambda);
    require(c.N >= 1 && c.N <= 100000, "N", static_cast<double>(c.N), "[1, 100000]");
    require_splitting("env_delta", c.env_delta);
    require_finite("env_epsilon", c.env_epsilon);
    auto check_list = [&](std::string_view name, const std::vector<double>& v, auto&& each) {
        if (!v.empty() && v.size() != c.N) {
            throw ConfigError(std::string(name) + ": expected N = " + std::to_string(c.N) + " values, got " +
                              std::to_string(v.size()));
        }
        for (double x : v) each(name, x);
    };
    check_list("env_deltas", c.env_deltas, require_splitting);
    check_list("env_epsilons", c.env_epsilons, require_finite);
    check_list("lambdas", c.lambdas, require_finite);
    require_population("Z0", c.Z0);
    require_finite("Phi0", c.Phi0);
    require_population("z0", c.z0);
    require_finite("phi0", c.phi0);
    check_list("env_z0", c.env_z0, require_population);
    check_list("env_phi0", c.env_phi0, require_finite);
    if (c.env_z0.empty() != c.env_phi0.empty()) {
        throw ConfigError("env_z0 and env_phi0 must be given together");
    }
    require(std::isfinite(c.dt) && c.dt > 0.0, "dt", c.dt, "(0, inf)");
    require(std::isfinite(c.rel_tol) && c.rel_tol > 0.0 && c.rel_tol < 1.0, "rel_tol", c.rel_tol, "(0, 1)");
    require(std::isfinite(c.abs_tol) && c.abs_tol > 0.0 && c.abs_tol < 1.0, "abs_tol", c.abs_tol, "(0, 1)");
    require(c.z_guard > 0.0 && c.z_guard < 1e-3, "z_guard", c.z_guard, "(0, 1e-3)");
    require_finite("t0", c.t0);
    require(std::isfinite(c.tf) && c.tf > c.t0, "tf", c.tf, "(t0, inf)");
    require(c.sample_every >= 1, "sample_every", 0.0, "[1, inf)");
    require(c.n >= 1, "n", 0.0, "[1, inf)");
    for (const auto* w : {&c.average_window, &c.sigma_window}) {
        if (*w && !((*w)->lo < (*w)->hi && (*w)->lo >= c.t0 && (*w)->hi <= c.tf)) {
            throw ConfigError(std::string(w == &c.average_window ? "average_window" : "sigma_window") + " = " +
                              format_window(*w) + " must be a non-empty subinterval of [t0, tf]");
        }
    }
    for (double g : c.grid) require_finite("grid", g);
    require(std::isfinite(c.horizon) && c.horizon > 0.0, "horizon", c.horizon, "(0, inf)");
    if ((c.mode == Mode::ScanLambda || c.mode == Mode::ScanChaos) && c.grid.empty()) {
        throw ConfigError("grid: must list at least one value in mode " + std::string(to_string(c.mode)));
    }
    if (c.mode == Mode::ScanChaos) (void)coordinate_index(c.sweep_coord, c.N);
    if (!c.sweep.empty()) {
        const Field* f = find_field(c.sweep);
        if (!f || !f->scalar) throw ConfigError("sweep: '" + c.sweep + "' is not a numeric scalar key");
        if (c.sweep_values.empty()) throw ConfigError("sweep_values: must not be empty when sweep is set");
    }
}

} // namespace tlsmap::cli
