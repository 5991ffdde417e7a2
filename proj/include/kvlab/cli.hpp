#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kvlab/analysis.hpp"
#include "kvlab/config.hpp"
#include "kvlab/report.hpp"

namespace kvlab {

/// Process exit statuses.
enum ExitStatus : int { kExitPass = 0, kExitOperational = 1, kExitViolation = 2 };

/// Options shared by every subcommand. Each flag has a KVLAB_* environment fallback.
struct CliOptions {
    std::string config;
    std::string out_dir = ".";
    unsigned parallel = 0;  ///< 0: hardware concurrency
    std::optional<double> tol;
};

namespace detail {

inline std::string output_path(const std::string& dir, const std::string& file) {
    const std::filesystem::path p(file);
    if (p.is_absolute()) return p.string();
    return (std::filesystem::path(dir) / p).string();
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
}

inline RunSpec load_run(const CliOptions& opt) {
    if (opt.config.empty()) throw Error(ErrorCode::Config, "no configuration given (--config or KVLAB_CONFIG)");
    RunSpec spec = load_config(opt.config);
    if (opt.tol) {
        if (!(*opt.tol >= 0.0)) throw Error(ErrorCode::Config, "--tol must be >= 0");
        spec.analysis.tol_abs = *opt.tol;
    }
    return spec;
}

/// Worst envelope margin over the rows, ignoring rows without an envelope.
inline double worst_margin(const DecayResult& r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.envelope.size(); ++i) {
        if (r.envelope[i]) m = std::min(m, *r.envelope[i] - r.trajectory.observations[i].values.d2);
    }
    return m;
}

inline int cmd_simulate(const RunSpec& spec, const std::string& out_dir, std::ostream& out) {
    const ForcingSpec forcing = build_forcing(spec.forcing);
    validate_forcing(forcing, spec.params);
    ObserverConfig obs;
    obs.stride = spec.time.observe_stride;
    obs.functionals.gamma = spec.analysis.gamma.value_or(1.0);
    obs.functionals.d1 = true;
    obs.functionals.v1 = true;
    if (forcing.has_potential()) obs.functionals.gamma_w = spec.analysis.gamma_w.value_or(obs.functionals.gamma);
    obs.keep_states = false;
    const Trajectory tr = simulate(build_initial_state(spec), spec.time.t0, spec.time.t_end, spec.time.dt,
                                   spec.params, forcing, obs);
    ensure_dir(out_dir);
    const std::string csv = output_path(out_dir, spec.outputs.csv);
    write_timeseries_file(csv, tr);
    out << "wrote " << csv << " (" << tr.observations.size() << " rows)\n";
    if (!tr.complete()) throw Error(ErrorCode::Integrator, *tr.error);
    return kExitPass;
}

inline int cmd_certify(const RunSpec& spec, const std::string& out_dir, std::ostream& out) {
    const CertificateReport rep = certify(spec);
    ensure_dir(out_dir);
    const std::string path = output_path(out_dir, spec.outputs.report);
    write_json_file(path, to_json(rep));
    out << "theorem " << rep.theorem << ": " << (rep.pass() ? "certified" : "NOT certified") << " (" << path
        << ")\n";
    for (const auto& v : rep.verdicts) {
        if (!v.pass) out << "  failed: " << v.name << (v.detail.empty() ? "" : " - " + v.detail) << '\n';
    }
    return rep.pass() ? kExitPass : kExitViolation;
}

inline int cmd_region(const RunSpec& spec, const std::string& out_dir, std::ostream& out) {
    std::vector<double> t0s = spec.analysis.t0_list;
    if (t0s.empty()) t0s.push_back(spec.time.t0);
    const auto table = attraction_table(spec, t0s);
    nlohmann::json j = nlohmann::json::array();
    out << "t0,r_best,M,t_prime,radius\n";
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : table) {
        j.push_back(to_json(row));
        out << row.t0 << ',' << row.r_best << ',' << row.M << ',' << row.t_prime << ',' << row.radius << '\n';
    }
    ensure_dir(out_dir);
    write_json_file(output_path(out_dir, spec.outputs.report), {{"region", j}});
    const bool any = std::any_of(table.begin(), table.end(), [](const AttractionInfo& a) { return a.radius > 0.0; });
    return any ? kExitPass : kExitViolation;
}

inline int cmd_decay_check(const RunSpec& spec, const std::string& out_dir, std::ostream& out) {
    const DecayResult res = decay_check(spec);
    ensure_dir(out_dir);
    const std::string csv = output_path(out_dir, spec.outputs.csv);
    const std::string rpt = output_path(out_dir, spec.outputs.report);
    write_timeseries_file(csv, res.trajectory, res.comparison_y, res.envelope);
    nlohmann::json j = to_json(res.report);
    const double wm = worst_margin(res);
    j["worst_margin"] = number(wm);
    if (res.crossover_time) j["crossover_time"] = *res.crossover_time;
    write_json_file(rpt, j);
    const bool margin_ok = !(wm < -spec.analysis.tol_abs);
    const bool pass = res.report.pass() && margin_ok && res.trajectory.complete();
    out << "decay-check: " << (pass ? "pass" : "FAIL") << " (" << csv << ", " << rpt << ")\n";
    for (const auto& v : res.report.verdicts) {
        if (!v.pass) out << "  failed: " << v.name << (v.detail.empty() ? "" : " - " + v.detail) << '\n';
    }
    return pass ? kExitPass : kExitViolation;
}

/// Maps an error to its exit status: hypothesis-level failures are violations, everything else operational.
inline int status_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::HypothesisViolated:
        case ErrorCode::NoStabilityCertificate:
        case ErrorCode::CertificateIncomplete: return kExitViolation;
        default: return kExitOperational;
    }
}

/// Cartesian product of the sweep lists, as (dotted path, value) assignments per point.
inline std::vector<std::vector<std::pair<std::string, nlohmann::json>>> sweep_points(const nlohmann::json& sweep) {
    std::vector<std::vector<std::pair<std::string, nlohmann::json>>> points{{}};
    for (const auto& [key, values] : sweep.items()) {
        if (!values.is_array() || values.empty()) {
            throw Error(ErrorCode::Config, "sweep." + key + ": expected a non-empty list");
        }
        std::vector<std::vector<std::pair<std::string, nlohmann::json>>> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                auto q = p;
                q.emplace_back(key, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

inline nlohmann::json::json_pointer dotted_pointer(const std::string& dotted) {
    std::string s = "/" + dotted;
    std::replace(s.begin(), s.end(), '.', '/');
    return nlohmann::json::json_pointer(s);
}

inline int cmd_sweep(const RunSpec& base, const std::string& out_dir, unsigned parallel, std::ostream& out) {
    if (base.sweep.empty()) throw Error(ErrorCode::Config, "sweep: configuration has no sweep object");
    const auto points = sweep_points(base.sweep);
    nlohmann::json doc = to_json(base);
    doc.erase("sweep");
    for (const auto& [key, values] : base.sweep.items()) {
        if (!doc.contains(dotted_pointer(key))) throw Error(ErrorCode::Config, "sweep." + key + ": unknown field");
    }

    struct PointResult {
        int status = kExitPass;
        std::string message;
    };
    std::vector<PointResult> results(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                nlohmann::json d = doc;
                for (const auto& [key, v] : points[i]) d[dotted_pointer(key)] = v;
                const RunSpec spec = parse_config(d);
                const std::string dir = output_path(out_dir, "point_" + std::to_string(i));
                std::ostringstream sink;
                results[i].status = cmd_decay_check(spec, dir, sink);
                results[i].message = sink.str();
            } catch (const Error& e) {
                results[i].status = status_for(e);
                results[i].message = std::string(to_string(e.code())) + ": " + e.what();
            } catch (const std::exception& e) {
                results[i].status = kExitOperational;
                results[i].message = e.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(parallel == 0 ? hw : parallel, points.size());
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    nlohmann::json summary = nlohmann::json::array();
    int status = kExitPass;
    for (std::size_t i = 0; i < points.size(); ++i) {
        nlohmann::json row{{"point", i}, {"status", results[i].status}, {"message", results[i].message}};
        for (const auto& [key, v] : points[i]) row["values"][key] = v;
        summary.push_back(row);
        out << "point " << i << ": exit " << results[i].status << '\n';
        if (results[i].status == kExitOperational) status = kExitOperational;
        else if (results[i].status == kExitViolation && status == kExitPass) status = kExitViolation;
    }
    ensure_dir(out_dir);
    write_json_file(output_path(out_dir, "sweep_summary.json"), {{"points", summary}});
    return status;
}

}  // namespace detail

/// Command-line entry point; args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    CLI::App app{"Stability certificates for the damped viscoelastic wave equation", "kvlab"};
    app.require_subcommand(1);
    CliOptions opt;

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"simulate", "integrate and write the functional time series"},
        {"certify", "compute certificate constants and verdicts"},
        {"region", "attraction radius for each t0 in analysis.t0_list"},
        {"decay-check", "simulate and check the certified decay envelope"},
        {"sweep", "run decay-check over the Cartesian product in the sweep object"},
    };
    std::vector<CLI::App*> apps;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("config_file", opt.config, "configuration JSON");
        sub->add_option("--config", opt.config, "configuration JSON")->envname("KVLAB_CONFIG");
        sub->add_option("--out", opt.out_dir, "output directory")->envname("KVLAB_OUT");
        sub->add_option("--parallel", opt.parallel, "concurrent sweep runs (0 = all cores)")
            ->envname("KVLAB_PARALLEL");
        sub->add_option("--tol", opt.tol, "absolute tolerance on margins")->envname("KVLAB_TOL");
        apps.push_back(sub);
    }

    std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 consumes a reversed vector
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitOperational;
    }

    try {
        const RunSpec spec = detail::load_run(opt);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "simulate") return detail::cmd_simulate(spec, opt.out_dir, out);
        if (name == "certify") return detail::cmd_certify(spec, opt.out_dir, out);
        if (name == "region") return detail::cmd_region(spec, opt.out_dir, out);
        if (name == "decay-check") return detail::cmd_decay_check(spec, opt.out_dir, out);
        return detail::cmd_sweep(spec, opt.out_dir, opt.parallel, out);
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return detail::status_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOperational;
    }
}

inline int run_command(int argc, char** argv) {
    return run_command(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace kvlab
