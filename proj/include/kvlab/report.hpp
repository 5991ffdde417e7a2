#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvlab/analysis.hpp"

namespace kvlab {

namespace detail {

/// JSON cannot hold inf or NaN; those become strings so the report stays loadable.
inline nlohmann::json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

}  // namespace detail

inline nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j{{"name", v.name}, {"pass", v.pass}, {"margin", detail::number(v.margin)}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    if (!v.warnings.empty()) j["warnings"] = v.warnings;
    return j;
}

inline nlohmann::json to_json(const Constants1& k) {
    return {{"gamma", k.gamma}, {"c1_sq", k.c1_sq}, {"c2_sq", k.c2_sq}, {"c3_sq", k.c3_sq}, {"A", k.A}, {"p", k.p}};
}

inline nlohmann::json to_json(const Constants2& k) {
    return {{"gamma", k.gamma}, {"k1", k.k1},   {"k3", k.k3},       {"D", k.D},
            {"tau", k.tau},     {"E", k.E},     {"c2_sq", k.c2_sq}, {"exponential_only", k.exponential_only}};
}

inline nlohmann::json to_json(const AttractionInfo& a) {
    return {{"t0", a.t0},
            {"r_bar", a.r_bar},
            {"r_bar_at_search_limit", a.r_bar_at_boundary},
            {"r_best", a.r_best},
            {"q_r", a.q_r},
            {"M", a.M},
            {"t_prime", a.t_prime},
            {"d2_bound", a.objective},
            {"radius", a.radius}};
}

inline nlohmann::json to_json(const EnvelopeParams& e) {
    nlohmann::json j{{"kind", e.kind == EnvelopeKind::Exponential ? "exponential" : "algebraic"},
                     {"rate", e.rate},
                     {"prefactor", detail::number(e.prefactor)},
                     {"t0", e.t0}};
    if (e.kind == EnvelopeKind::Algebraic) {
        j["E"] = e.E;
        j["tau"] = e.tau;
        j["k1"] = e.k1;
    } else {
        j["r"] = e.r;
    }
    return j;
}

inline nlohmann::json to_json(const CertificateReport& r) {
    nlohmann::json j;
    j["theorem"] = r.theorem;
    j["pass"] = r.pass();
    j["params"] = {{"epsilon", r.params.epsilon}, {"c2", r.params.c2}};
    j["forcing"] = std::string(to_string(r.forcing.kind));
    if (r.constants1) j["constants"] = to_json(*r.constants1);
    if (r.constants2) j["constants"] = to_json(*r.constants2);
    if (r.q_estimate) {
        j["q"] = {{"q", r.q_estimate->q},
                  {"q_half", r.q_estimate->q_half},
                  {"indicator", r.q_estimate->indicator},
                  {"diverging", r.q_estimate->diverging}};
    }
    if (r.attraction) j["attraction"] = to_json(*r.attraction);
    if (r.envelope) j["envelope"] = to_json(*r.envelope);
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
    j["notes"] = r.notes;
    return j;
}

inline constexpr const char* kTimeseriesHeader = "t,d2,d1_2,V,W,comparison_y,envelope,margin";

namespace detail {

inline void put(std::ostream& os, const std::optional<double>& x) {
    if (x) os << *x;
}

}  // namespace detail

/// One row per observation; absent quantities are empty fields. margin = envelope - d2.
inline void write_timeseries(std::ostream& os, const Trajectory& tr,
                             const std::vector<std::optional<double>>& comparison_y = {},
                             const std::vector<std::optional<double>>& envelope = {}) {
    os.precision(std::numeric_limits<double>::max_digits10);
    os << kTimeseriesHeader << '\n';
    for (std::size_t i = 0; i < tr.observations.size(); ++i) {
        const Observation& o = tr.observations[i];
        const auto& v = o.values;
        const std::optional<double> y = i < comparison_y.size() ? comparison_y[i] : std::nullopt;
        const std::optional<double> e = i < envelope.size() ? envelope[i] : std::nullopt;
        const std::optional<double> margin = e ? std::optional<double>(*e - v.d2) : std::nullopt;
        os << o.t << ',' << v.d2 << ',';
        detail::put(os, v.d1_2);
        os << ',' << v.V << ',';
        detail::put(os, v.W);
        os << ',';
        detail::put(os, y);
        os << ',';
        detail::put(os, e);
        os << ',';
        detail::put(os, margin);
        os << '\n';
    }
}

inline void write_timeseries_file(const std::string& path, const Trajectory& tr,
                                  const std::vector<std::optional<double>>& comparison_y = {},
                                  const std::vector<std::optional<double>>& envelope = {}) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    write_timeseries(out, tr, comparison_y, envelope);
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace kvlab
