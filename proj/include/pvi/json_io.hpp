#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "pvi/connection.hpp"
#include "pvi/picard.hpp"
#include "pvi/series.hpp"
#include "pvi/verify.hpp"

// JSON forms of the library types, shared by the command-line tool and any
// embedding that wants file-based workflows.  Complex numbers are
// two-element arrays [re, im]; plain numbers are accepted on input as a
// shorthand for a real value.  Doubles are emitted by the shortest
// representation that reparses to the identical bit pattern, so every
// serialization below round-trips exactly.

namespace pvi::io {

using nlohmann::json;

// Input that does not match the published schema: the caller maps this to
// its own failure channel (the CLI exits with code 2).
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trace data off the cubic surface beyond the configured tolerance (CLI
// exit code 4).
struct surface_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from(const json& j, const std::string& where) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw schema_error(where + ": expected a number or [re, im]");
}

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw schema_error(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw schema_error(where + ": missing field \"" + key + "\"");
    return *it;
}

inline double number_from(const json& j, const std::string& where) {
    if (!j.is_number()) throw schema_error(where + ": expected a number");
    return j.get<double>();
}

inline int int_from(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw schema_error(where + ": expected an integer");
    return j.get<int>();
}

// ---------------------------------------------------------------------------
// Parameters and traces.

inline json to_json(const ThetaParams& th) {
    return {{"theta0", to_json(th.theta0)},
            {"thetax", to_json(th.thetax)},
            {"theta1", to_json(th.theta1)},
            {"thetainf", to_json(th.thetainf)}};
}

inline ThetaParams theta_from(const json& j, const std::string& where = "theta") {
    ThetaParams th;
    th.theta0 = cplx_from(member(j, "theta0", where), where + ".theta0");
    th.thetax = cplx_from(member(j, "thetax", where), where + ".thetax");
    th.theta1 = cplx_from(member(j, "theta1", where), where + ".theta1");
    th.thetainf = cplx_from(member(j, "thetainf", where), where + ".thetainf");
    return th;
}

inline json to_json(const MonodromyTraces& t) {
    return {{"p0", to_json(t.p0)},   {"px", to_json(t.px)},   {"p1", to_json(t.p1)},
            {"pinf", to_json(t.pinf)}, {"p0x", to_json(t.p0x)}, {"p01", to_json(t.p01)},
            {"px1", to_json(t.px1)}};
}

inline MonodromyTraces traces_from(const json& j, const std::string& where = "traces") {
    MonodromyTraces t;
    t.p0 = cplx_from(member(j, "p0", where), where + ".p0");
    t.px = cplx_from(member(j, "px", where), where + ".px");
    t.p1 = cplx_from(member(j, "p1", where), where + ".p1");
    t.pinf = cplx_from(member(j, "pinf", where), where + ".pinf");
    t.p0x = cplx_from(member(j, "p0x", where), where + ".p0x");
    t.p01 = cplx_from(member(j, "p01", where), where + ".p01");
    t.px1 = cplx_from(member(j, "px1", where), where + ".px1");
    return t;
}

// Surface membership gate shared by the commands that consume traces.
inline void require_on_surface(const MonodromyTraces& t, double tol) {
    const double res = std::abs(cubic_residual(t));
    if (!(res < tol))
        throw surface_error("traces violate the cubic surface equation: |residual| = "
                            + std::to_string(res) + " with tolerance "
                            + std::to_string(tol));
}

// ---------------------------------------------------------------------------
// Connection output.

inline json to_json(const BranchData& b) {
    return {{"point", point_name(b.point)},
            {"regime", regime_name(b.sigma.regime)},
            {"sigma", to_json(b.sigma.sigma)},
            {"r", to_json(b.r)},
            {"a", to_json(b.a)},
            {"A", to_json(b.A)},
            {"B", to_json(b.B)},
            {"phi", to_json(b.phi)},
            {"degenerate", b.degenerate}};
}

inline json to_json(const ConnectionResult& c) {
    return {{"at0", to_json(c.at0)}, {"at1", to_json(c.at1)}, {"atInf", to_json(c.atInf)}};
}

// ---------------------------------------------------------------------------
// Series expansions (full round trip: the table is data, not just output).

inline json to_json(const SeriesExpansion& e) {
    json coeffs = json::array();
    for (const auto& [nm, c] : e.coeffs)
        coeffs.push_back(json::array({nm.first, nm.second, to_json(c)}));
    return {{"point", point_name(e.point)}, {"regime", regime_name(e.regime)},
            {"sigma", to_json(e.sigma)},    {"r", to_json(e.r)},
            {"order", e.order},             {"theta", to_json(e.theta)},
            {"coeffs", std::move(coeffs)}};
}

inline Point point_from(const json& j, const std::string& where) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "zero") return Point::Zero;
        if (s == "one") return Point::One;
        if (s == "infinity") return Point::Infinity;
    }
    throw schema_error(where + ": expected \"zero\", \"one\" or \"infinity\"");
}

inline Regime regime_from(const json& j, const std::string& where) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "generic") return Regime::Generic;
        if (s == "oscillatory") return Regime::Oscillatory;
        if (s == "inverse_oscillatory") return Regime::InverseOscillatory;
        if (s == "log_zero") return Regime::LogZero;
        if (s == "log_one") return Regime::LogOne;
    }
    throw schema_error(where + ": unknown regime name");
}

inline SeriesExpansion expansion_from(const json& j, const std::string& where = "expansion") {
    SeriesExpansion e;
    e.point = point_from(member(j, "point", where), where + ".point");
    e.regime = regime_from(member(j, "regime", where), where + ".regime");
    e.sigma = cplx_from(member(j, "sigma", where), where + ".sigma");
    e.r = cplx_from(member(j, "r", where), where + ".r");
    e.order = int_from(member(j, "order", where), where + ".order");
    e.theta = theta_from(member(j, "theta", where), where + ".theta");
    const json& coeffs = member(j, "coeffs", where);
    if (!coeffs.is_array()) throw schema_error(where + ".coeffs: expected an array");
    for (const auto& row : coeffs) {
        if (!row.is_array() || row.size() != 3)
            throw schema_error(where + ".coeffs: expected rows [n, m, [re, im]]");
        const int n = int_from(row[0], where + ".coeffs[][0]");
        const int m = int_from(row[1], where + ".coeffs[][1]");
        e.coeffs[{n, m}] = cplx_from(row[2], where + ".coeffs[][2]");
    }
    return e;
}

// ---------------------------------------------------------------------------
// Picard catalog entries.

inline json to_json(const PicardLeading& l) {
    const char* form = l.form == PicardForm::Power              ? "power"
                       : l.form == PicardForm::SinSquareTimesX ? "sin_square_times_x"
                                                                : "inverse_sin_square";
    return {{"form", form},
            {"coefficient", to_json(l.coefficient)},
            {"exponent", to_json(l.exponent)},
            {"slope", to_json(l.slope)},
            {"offset", to_json(l.offset)},
            {"hypergeometric_correction", l.hypergeometric_correction}};
}

// ---------------------------------------------------------------------------
// Verification configuration and reports.

inline VerifyConfig verify_config_from(const json& j, VerifyConfig cfg,
                                       const std::string& where = "config") {
    if (!j.is_object()) throw schema_error(where + ": expected an object");
    for (const auto& [key, val] : j.items()) {
        if (key == "x_start") cfg.x_start = number_from(val, where + ".x_start");
        else if (key == "ray_angle") cfg.ray_angle = number_from(val, where + ".ray_angle");
        else if (key == "fit_x1") cfg.fit_x1 = number_from(val, where + ".fit_x1");
        else if (key == "fit_x2") cfg.fit_x2 = number_from(val, where + ".fit_x2");
        else if (key == "order") cfg.order = int_from(val, where + ".order");
        else if (key == "tolerance") cfg.tolerance = number_from(val, where + ".tolerance");
        else if (key == "max_step") cfg.max_step = number_from(val, where + ".max_step");
        else if (key == "max_detours") cfg.max_detours = int_from(val, where + ".max_detours");
        else if (key == "phased_samples")
            cfg.phased_samples = int_from(val, where + ".phased_samples");
        else
            throw schema_error(where + ": unknown field \"" + key + "\"");
    }
    return cfg;
}

inline json to_json(const VerifyConfig& cfg) {
    return {{"x_start", cfg.x_start},       {"ray_angle", cfg.ray_angle},
            {"fit_x1", cfg.fit_x1},         {"fit_x2", cfg.fit_x2},
            {"order", cfg.order},           {"tolerance", cfg.tolerance},
            {"max_step", cfg.max_step},     {"max_detours", cfg.max_detours},
            {"phased_samples", cfg.phased_samples}};
}

inline json to_json(const FitResult& f) {
    return {{"sigma", to_json(f.sigma)}, {"a", to_json(f.a)},
            {"B", to_json(f.B)},         {"conj_side", to_json(f.conj_side)},
            {"phi", to_json(f.phi)},     {"residual", f.residual}};
}

inline json to_json(const VerifyReport& rep) {
    json waypoints = json::array();
    for (const cplx& w : rep.waypoints) waypoints.push_back(to_json(w));
    json poles = json::array();
    for (const auto& p : rep.poles)
        poles.push_back({{"x", to_json(p.x)}, {"estimate", to_json(p.pole_estimate)}});
    return {{"theta", to_json(rep.theta)},
            {"traces", to_json(rep.traces)},
            {"config", to_json(rep.config)},
            {"predicted0", to_json(rep.predicted0)},
            {"predicted1", to_json(rep.predicted1)},
            {"fitted1", to_json(rep.fitted1)},
            {"sigma1_rel_error", rep.sigma1_rel_error},
            {"coeff1_rel_error", rep.coeff1_rel_error},
            {"waypoints", std::move(waypoints)},
            {"poles", std::move(poles)},
            {"detours", rep.detours},
            {"steps", rep.steps},
            {"diagnostics", rep.diagnostics}};
}

// List of evaluation points: one complex or an array of them.
inline std::vector<cplx> points_from(const json& j, const std::string& where) {
    std::vector<cplx> xs;
    if (j.is_array() && !j.empty() && j[0].is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            xs.push_back(cplx_from(j[i], where + "[" + std::to_string(i) + "]"));
    } else {
        xs.push_back(cplx_from(j, where));
    }
    return xs;
}

}  // namespace pvi::io
