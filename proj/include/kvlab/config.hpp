#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvlab/certificates.hpp"
#include "kvlab/error.hpp"
#include "kvlab/forcing.hpp"
#include "kvlab/grid.hpp"
#include "kvlab/params.hpp"

namespace kvlab {

using json = nlohmann::json;

/// Coefficients of f = u*c_u + u_x*c_ux + u_xx*c_uxx + u_t*c_ut for `custom` forcing.
struct LinearForcing {
    double u = 0.0, u_x = 0.0, u_xx = 0.0, u_t = 0.0;

    friend bool operator==(const LinearForcing&, const LinearForcing&) = default;
};

/// Serializable description of the forcing; build_forcing() turns it into callbacks.
struct ForcingConfig {
    ForcingKind kind = ForcingKind::Zero;
    double b0 = 0.0;
    double k = 1.0;
    double tau = 0.5;
    double a = 0.0;  ///< constant damping coefficient (example2)
    std::optional<double> a_inf, a_sup;
    LinearForcing linear{};

    friend bool operator==(const ForcingConfig&, const ForcingConfig&) = default;
};

struct InitialConfig {
    std::vector<double> u_modes, v_modes;
    std::optional<std::vector<double>> u_values, v_values;

    friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct TimeConfig {
    double t0 = 0.0;
    double t_end = 10.0;
    double dt = 1e-3;
    std::size_t observe_stride = 100;

    friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct AnalysisConfig {
    std::optional<int> theorem;        ///< 1 or 2; default picks by forcing kind
    std::optional<double> gamma;       ///< gamma for V
    std::optional<double> gamma_w;     ///< gamma for W
    double r_search_max = 1.0;
    double q_horizon = 500.0;
    double q_quad_dt = 1e-3;
    double scan_dt = 1e-3;
    double t_prime_cap = 1000.0;
    double confirm_window = 10.0;
    double tol_abs = 1e-8;
    double tol_rel = 1e-6;
    std::vector<double> t0_list;
    int samples = 50;
    unsigned seed = 1;

    Tolerance tolerance() const { return {tol_abs, tol_rel}; }

    friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct OutputConfig {
    std::string csv = "trajectory.csv";
    std::string report = "report.json";

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunSpec {
    PdeParams params;
    ForcingConfig forcing;
    InitialConfig initial;
    std::size_t n_interior = 199;
    TimeConfig time;
    AnalysisConfig analysis;
    OutputConfig outputs;
    json sweep = json::object();

    int theorem() const {
        if (analysis.theorem) return *analysis.theorem;
        return forcing.kind == ForcingKind::Example2 ? 2 : 1;
    }
};

inline bool operator==(const RunSpec& a, const RunSpec& b) {
    return a.params == b.params && a.forcing == b.forcing && a.initial == b.initial &&
           a.n_interior == b.n_interior && a.time == b.time && a.analysis == b.analysis &&
           a.outputs == b.outputs && a.sweep == b.sweep;
}

namespace detail {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw Error(ErrorCode::Config, at(key) + ": " + msg);
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    double required_number(const std::string& key) const {
        if (!has(key)) fail(key, "required field missing");
        return number(key, 0.0);
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) const {
        if (!has(key)) return {};
        const json& v = j_.at(key);
        if (!v.is_array()) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(key + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Reader child(const std::string& key) const {
        static const json empty = json::object();
        if (!has(key)) return Reader(empty, at(key));
        if (!j_.at(key).is_object()) fail(key, "expected an object");
        return Reader(j_.at(key), at(key));
    }

private:
    const json& j_;
    std::string path_;
};

}  // namespace detail

/// Validated RunSpec from a JSON document; errors carry the offending field path.
inline RunSpec parse_config(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::Config, "configuration must be a JSON object");
    const detail::Reader root(doc, "");
    RunSpec spec;

    spec.params.epsilon = root.required_number("epsilon");
    spec.params.c2 = root.required_number("c2");
    if (!(spec.params.epsilon > 0.0)) {
        throw Error(ErrorCode::Config, "epsilon: must be positive (eps and c are positive constants)");
    }
    if (!(spec.params.c2 > 0.0)) {
        throw Error(ErrorCode::Config, "c2: must be positive (eps and c are positive constants)");
    }

    const auto f = root.child("forcing");
    ForcingConfig& fc = spec.forcing;
    try {
        fc.kind = forcing_kind_from_string(f.string("kind", "zero"));
    } catch (const Error&) {
        f.fail("kind", "expected one of zero, example1, example2, custom");
    }
    fc.b0 = f.number("b0", 0.0);
    fc.k = f.number("k", 1.0);
    fc.tau = f.number("tau", 0.5);
    fc.a = f.number("a", 0.0);
    fc.a_inf = f.optional_number("a_inf");
    fc.a_sup = f.optional_number("a_sup");
    const auto lin = f.child("linear");
    fc.linear = {lin.number("u", 0.0), lin.number("u_x", 0.0), lin.number("u_xx", 0.0), lin.number("u_t", 0.0)};

    if (fc.kind == ForcingKind::Example1 && !(fc.b0 >= 0.0)) f.fail("b0", "example1 requires b0 >= 0");
    if (fc.kind == ForcingKind::Example2) {
        if (!(fc.k > 0.0)) f.fail("k", "example2 requires k > 0");
        if (!(fc.tau > 0.0 && fc.tau <= 1.0)) f.fail("tau", "example2 requires 0 < tau <= 1");
        const double a_inf = fc.a_inf.value_or(fc.a), a_sup = fc.a_sup.value_or(fc.a);
        if (!(a_inf > -spec.params.epsilon)) {
            f.fail("a_inf", "damping bound violated: need inf a > -epsilon (got " + std::to_string(a_inf) + ")");
        }
        if (!(a_sup >= a_inf) || !std::isfinite(a_sup)) f.fail("a_sup", "need a finite sup a >= inf a");
        if (fc.a < a_inf || fc.a > a_sup) f.fail("a", "constant damping lies outside [a_inf, a_sup]");
    }

    const auto grid = root.child("grid");
    spec.n_interior = grid.count("n_interior", 199);
    if (spec.n_interior < 3) grid.fail("n_interior", "must be at least 3");

    const auto init = root.child("initial");
    spec.initial.u_modes = init.numbers("u_modes");
    spec.initial.v_modes = init.numbers("v_modes");
    if (init.has("u_values")) spec.initial.u_values = init.numbers("u_values");
    if (init.has("v_values")) spec.initial.v_values = init.numbers("v_values");
    for (const auto* key : {"u_values", "v_values"}) {
        const auto& vals = std::string(key) == "u_values" ? spec.initial.u_values : spec.initial.v_values;
        if (!vals) continue;
        if (vals->size() != spec.n_interior + 2) {
            init.fail(key, "expected " + std::to_string(spec.n_interior + 2) + " samples (n_interior + 2)");
        }
        if (vals->front() != 0.0 || vals->back() != 0.0) {
            init.fail(key, "initial data must vanish at x=0 and x=1");
        }
    }

    const auto time = root.child("time");
    spec.time.t0 = time.number("t0", 0.0);
    spec.time.t_end = time.number("t_end", 10.0);
    spec.time.dt = time.number("dt", 1e-3);
    spec.time.observe_stride = time.count("observe_stride", 100);
    if (spec.time.t0 < 0.0) time.fail("t0", "must be >= 0");
    if (!(spec.time.t_end > spec.time.t0)) time.fail("t_end", "must exceed t0");
    if (!(spec.time.dt > 0.0)) time.fail("dt", "must be positive");
    if (spec.time.observe_stride == 0) time.fail("observe_stride", "must be positive");
    try {
        step_count(spec.time.t0, spec.time.t_end, spec.time.dt);
    } catch (const Error&) {
        time.fail("dt", "must divide t_end - t0");
    }

    const auto an = root.child("analysis");
    AnalysisConfig& ac = spec.analysis;
    if (an.has("theorem")) {
        const double th = an.number("theorem", 1);
        if (th != 1.0 && th != 2.0) an.fail("theorem", "must be 1 or 2");
        ac.theorem = static_cast<int>(th);
    }
    ac.gamma = an.optional_number("gamma");
    ac.gamma_w = an.optional_number("gamma_w");
    if (ac.gamma && !(*ac.gamma > 0.5)) an.fail("gamma", "must exceed 1/2");
    if (ac.gamma_w && !(*ac.gamma_w > 0.5)) an.fail("gamma_w", "must exceed 1/2");
    ac.r_search_max = an.number("r_search_max", 1.0);
    ac.q_horizon = an.number("q_horizon", 500.0);
    ac.q_quad_dt = an.number("q_quad_dt", 1e-3);
    ac.scan_dt = an.number("scan_dt", 1e-3);
    ac.t_prime_cap = an.number("t_prime_cap", 1000.0);
    ac.confirm_window = an.number("confirm_window", 10.0);
    ac.tol_abs = an.number("tol_abs", 1e-8);
    ac.tol_rel = an.number("tol_rel", 1e-6);
    ac.t0_list = an.numbers("t0_list");
    ac.samples = static_cast<int>(an.count("samples", 50));
    ac.seed = static_cast<unsigned>(an.count("seed", 1));
    for (const auto* key : {"r_search_max", "q_horizon", "q_quad_dt", "scan_dt", "t_prime_cap"}) {
        if (!(an.number(key, 1.0) > 0.0)) an.fail(key, "must be positive");
    }
    if (ac.tol_abs < 0.0) an.fail("tol_abs", "must be >= 0");
    if (ac.tol_rel < 0.0) an.fail("tol_rel", "must be >= 0");

    const auto out = root.child("outputs");
    spec.outputs.csv = out.string("csv", "trajectory.csv");
    spec.outputs.report = out.string("report", "report.json");

    if (doc.contains("sweep")) {
        if (!doc.at("sweep").is_object()) throw Error(ErrorCode::Config, "sweep: expected an object of lists");
        spec.sweep = doc.at("sweep");
    }
    return spec;
}

inline RunSpec parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Config, std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline RunSpec parse_config(const char* text) { return parse_config(std::string(text)); }

inline RunSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline json to_json(const RunSpec& s) {
    json j;
    j["epsilon"] = s.params.epsilon;
    j["c2"] = s.params.c2;
    json f;
    f["kind"] = std::string(to_string(s.forcing.kind));
    f["b0"] = s.forcing.b0;
    f["k"] = s.forcing.k;
    f["tau"] = s.forcing.tau;
    f["a"] = s.forcing.a;
    if (s.forcing.a_inf) f["a_inf"] = *s.forcing.a_inf;
    if (s.forcing.a_sup) f["a_sup"] = *s.forcing.a_sup;
    f["linear"] = {{"u", s.forcing.linear.u},
                   {"u_x", s.forcing.linear.u_x},
                   {"u_xx", s.forcing.linear.u_xx},
                   {"u_t", s.forcing.linear.u_t}};
    j["forcing"] = f;
    json init;
    init["u_modes"] = s.initial.u_modes;
    init["v_modes"] = s.initial.v_modes;
    if (s.initial.u_values) init["u_values"] = *s.initial.u_values;
    if (s.initial.v_values) init["v_values"] = *s.initial.v_values;
    j["initial"] = init;
    j["grid"] = {{"n_interior", s.n_interior}};
    j["time"] = {{"t0", s.time.t0},
                 {"t_end", s.time.t_end},
                 {"dt", s.time.dt},
                 {"observe_stride", s.time.observe_stride}};
    json an;
    const AnalysisConfig& a = s.analysis;
    if (a.theorem) an["theorem"] = *a.theorem;
    if (a.gamma) an["gamma"] = *a.gamma;
    if (a.gamma_w) an["gamma_w"] = *a.gamma_w;
    an["r_search_max"] = a.r_search_max;
    an["q_horizon"] = a.q_horizon;
    an["q_quad_dt"] = a.q_quad_dt;
    an["scan_dt"] = a.scan_dt;
    an["t_prime_cap"] = a.t_prime_cap;
    an["confirm_window"] = a.confirm_window;
    an["tol_abs"] = a.tol_abs;
    an["tol_rel"] = a.tol_rel;
    an["t0_list"] = a.t0_list;
    an["samples"] = a.samples;
    an["seed"] = a.seed;
    j["analysis"] = an;
    j["outputs"] = {{"csv", s.outputs.csv}, {"report", s.outputs.report}};
    if (!s.sweep.empty()) j["sweep"] = s.sweep;
    return j;
}

/// Callbacks for the configured forcing.
inline ForcingSpec build_forcing(const ForcingConfig& fc) {
    ForcingSpec spec;
    spec.kind = fc.kind;
    spec.b0 = fc.b0;
    spec.k = fc.k;
    spec.tau = fc.tau;
    switch (fc.kind) {
        case ForcingKind::Zero:
        case ForcingKind::Example1: break;
        case ForcingKind::Example2: {
            spec.a_inf = fc.a_inf.value_or(fc.a);
            spec.a_sup = fc.a_sup.value_or(fc.a);
            if (fc.a != 0.0) {
                const double a = fc.a;
                spec.custom_a = [a](double, double, double, double, double, double) { return a; };
            }
            break;
        }
        case ForcingKind::Custom: {
            const LinearForcing lin = fc.linear;
            spec.custom_f = [lin](double, double, double u, double ux, double uxx, double ut) {
                return lin.u * u + lin.u_x * ux + lin.u_xx * uxx + lin.u_t * ut;
            };
            // F(u) - a u_t form is available only when f does not involve u_x or u_xx.
            if (lin.u_x == 0.0 && lin.u_xx == 0.0) {
                spec.custom_F = [c = lin.u](double u) { return c * u; };
                spec.custom_potential = [c = lin.u](double u) { return 0.5 * c * u * u; };
                spec.tau = 1.0;
                spec.a_inf = spec.a_sup = -lin.u_t;
                if (lin.u_t != 0.0) {
                    spec.custom_a = [a = -lin.u_t](double, double, double, double, double, double) { return a; };
                }
            }
            break;
        }
    }
    return spec;
}

inline State build_initial_state(const RunSpec& spec) {
    const Grid grid = make_grid(spec.n_interior);
    State s = sine_series_state(spec.initial.u_modes, spec.initial.v_modes, grid, spec.time.t0);
    if (spec.initial.u_values) {
        GridFunction g(grid, *spec.initial.u_values);
        for (std::size_t i = 0; i < g.size(); ++i) s.u[i] += g[i];
    }
    if (spec.initial.v_values) {
        GridFunction g(grid, *spec.initial.v_values);
        for (std::size_t i = 0; i < g.size(); ++i) s.v[i] += g[i];
    }
    return s;
}

}  // namespace kvlab
