// pvi6: command-line front end for the Painleve VI connection toolkit.
// JSON in, JSON out; every command is a thin wrapper over a library call.
//
// Exit codes: 0 success, 1 numerical failure, 2 schema violation,
// 3 non-generic / unsupported monodromy data, 4 traces off the cubic surface.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "pvi/json_io.hpp"

namespace {

using namespace pvi;
using io::json;

int log_level() {
    const char* v = std::getenv("PVI_LOG");
    return v ? std::atoi(v) : 0;
}

void logmsg(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << "pvi6: " << msg << "\n";
}

// ---------------------------------------------------------------------------
// I/O plumbing shared by all subcommands.

struct IoOptions {
    std::string in_path;    // empty: stdin
    std::string out_path;   // empty: stdout
    bool print_schema = false;
};

json read_payload(const IoOptions& io) {
    std::string text;
    if (io.in_path.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream f(io.in_path);
        if (!f) throw io::schema_error("cannot open input file: " + io.in_path);
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw io::schema_error(std::string("input is not valid JSON: ") + e.what());
    }
}

void write_output(const IoOptions& io, const json& out) {
    const std::string text = out.dump(2) + "\n";
    if (io.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(io.out_path);
        if (!f) throw io::schema_error("cannot open output file: " + io.out_path);
        f << text;
    }
}

// Defaults loaded from an optional config file; explicit flags and payload
// fields override them.
struct Defaults {
    double surface_tol = 1e-6;
    json verify_config = json::object();
};

Defaults load_defaults(const std::string& path) {
    Defaults d;
    if (path.empty()) return d;
    std::ifstream f(path);
    if (!f) throw io::schema_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw io::schema_error(std::string("config file is not valid JSON: ") + e.what());
    }
    if (j.contains("surface_tol")) d.surface_tol = io::number_from(j["surface_tol"], "config.surface_tol");
    if (j.contains("verify")) d.verify_config = j["verify"];
    return d;
}

double surface_tol_for(const json& payload, const Defaults& d) {
    if (payload.is_object() && payload.contains("surface_tol"))
        return io::number_from(payload["surface_tol"], "surface_tol");
    return d.surface_tol;
}

// ---------------------------------------------------------------------------
// Published schemas (--schema).

json complex_schema() {
    return {{"oneOf", json::array({json{{"type", "number"}},
                                   json{{"type", "array"},
                                        {"items", json{{"type", "number"}}},
                                        {"minItems", 2},
                                        {"maxItems", 2}}})}};
}

json theta_schema() {
    json props;
    for (const char* k : {"theta0", "thetax", "theta1", "thetainf"}) props[k] = complex_schema();
    return {{"type", "object"},
            {"properties", props},
            {"required", json::array({"theta0", "thetax", "theta1", "thetainf"})}};
}

json traces_schema() {
    json props;
    for (const char* k : {"p0", "px", "p1", "pinf", "p0x", "p01", "px1"})
        props[k] = complex_schema();
    return {{"type", "object"},
            {"properties", props},
            {"required", json::array({"p0", "px", "p1", "pinf", "p0x", "p01", "px1"})}};
}

json expansion_schema() {
    return {{"type", "object"},
            {"properties",
             json{{"point", json{{"enum", json::array({"zero", "one", "infinity"})}}},
                  {"regime",
                   json{{"enum", json::array({"generic", "oscillatory", "inverse_oscillatory",
                                              "log_zero", "log_one"})}}},
                  {"sigma", complex_schema()},
                  {"r", complex_schema()},
                  {"order", json{{"type", "integer"}}},
                  {"theta", theta_schema()},
                  {"coeffs",
                   json{{"type", "array"},
                        {"items", json{{"type", "array"},
                                       {"prefixItems",
                                        json::array({json{{"type", "integer"}},
                                                     json{{"type", "integer"}},
                                                     complex_schema()})}}}}}}},
            {"required",
             json::array({"point", "regime", "sigma", "r", "order", "theta", "coeffs"})}};
}

json verify_config_schema() {
    json props;
    for (const char* k : {"x_start", "ray_angle", "fit_x1", "fit_x2", "tolerance", "max_step"})
        props[k] = json{{"type", "number"}};
    for (const char* k : {"order", "max_detours", "phased_samples"})
        props[k] = json{{"type", "integer"}};
    return {{"type", "object"}, {"properties", props}};
}

json schema_for(const std::string& command) {
    json points = json{{"oneOf", json::array({complex_schema(),
                                              json{{"type", "array"},
                                                   {"items", complex_schema()}}})}};
    if (command == "connect")
        return {{"title", "pvi6 connect"},
                {"type", "object"},
                {"properties", json{{"theta", theta_schema()},
                                    {"traces", traces_schema()},
                                    {"surface_tol", json{{"type", "number"}}}}},
                {"required", json::array({"theta", "traces"})}};
    if (command == "expand")
        return {{"title", "pvi6 expand"},
                {"type", "object"},
                {"properties",
                 json{{"theta", theta_schema()},
                      {"traces", traces_schema()},
                      {"point", json{{"enum", json::array({"zero", "one", "infinity"})}}},
                      {"order", json{{"type", "integer"}}},
                      {"surface_tol", json{{"type", "number"}}}}},
                {"required", json::array({"theta", "traces", "point", "order"})}};
    if (command == "eval")
        return {{"title", "pvi6 eval"},
                {"type", "object"},
                {"properties", json{{"expansion", expansion_schema()}, {"x", points}}},
                {"required", json::array({"expansion", "x"})}};
    if (command == "braid")
        return {{"title", "pvi6 braid"},
                {"type", "object"},
                {"properties", json{{"traces", traces_schema()},
                                    {"generator", json{{"enum", json::array({"g0", "g1"})}}},
                                    {"surface_tol", json{{"type", "number"}}}}},
                {"required", json::array({"traces", "generator"})}};
    if (command == "picard")
        return {{"title", "pvi6 picard"},
                {"type", "object"},
                {"properties", json{{"nu1", complex_schema()},
                                    {"nu2", complex_schema()},
                                    {"N", json{{"type", "integer"}}},
                                    {"x", points},
                                    {"leading_calv", json{{"type", "number"}}}}},
                {"required", json::array({"nu1", "nu2", "x"})}};
    if (command == "verify")
        return {{"title", "pvi6 verify"},
                {"type", "object"},
                {"properties", json{{"theta", theta_schema()},
                                    {"traces", traces_schema()},
                                    {"config", verify_config_schema()},
                                    {"surface_tol", json{{"type", "number"}}},
                                    {"jobs", json{{"type", "array"}}}}},
                {"oneOf", json::array({json{{"required", json::array({"theta", "traces"})}},
                                       json{{"required", json::array({"jobs"})}}})}};
    throw io::schema_error("no schema for command: " + command);
}

// ---------------------------------------------------------------------------
// Command implementations.

json cmd_connect(const json& payload, const Defaults& d) {
    const ThetaParams th = io::theta_from(io::member(payload, "theta", "payload"));
    const MonodromyTraces t = io::traces_from(io::member(payload, "traces", "payload"));
    io::require_on_surface(t, surface_tol_for(payload, d));
    logmsg(1, "connect: traces on surface, resolving branches");
    try {
        const ConnectionResult con = connect(th, t);
        json out = io::to_json(con);
        out["cubic_residual"] = std::abs(cubic_residual(t));
        return out;
    } catch (const error& e) {
        if (e.code() != errc::unsupported_regime) throw;
        // name the offending regime in the rejection: callers match on it
        std::string msg = e.what();
        const std::string pre = std::string(errc_name(errc::unsupported_regime)) + ": ";
        for (std::size_t p; (p = msg.find(pre)) != std::string::npos;) msg.erase(p, pre.size());
        cplx trace = t.p0x;
        if (msg.find("at one") != std::string::npos) trace = t.p01;
        else if (msg.find("at infinity") != std::string::npos) trace = t.px1;
        const Regime reg = sigma_from_trace(trace).regime;
        fail(errc::unsupported_regime,
             std::string(regime_name(reg)) + " branch: " + msg);
    }
}

json cmd_expand(const json& payload, const Defaults& d) {
    const ThetaParams th = io::theta_from(io::member(payload, "theta", "payload"));
    const MonodromyTraces t = io::traces_from(io::member(payload, "traces", "payload"));
    io::require_on_surface(t, surface_tol_for(payload, d));
    const Point pt = io::point_from(io::member(payload, "point", "payload"), "point");
    const int order = io::int_from(io::member(payload, "order", "payload"), "order");
    if (order < 1 || order > 48) throw io::schema_error("order: expected 1 <= order <= 48");
    logmsg(1, "expand: building the recursive table");
    return io::to_json(expansion_at_point(th, t, pt, order));
}

json cmd_eval(const json& payload, const Defaults&) {
    const SeriesExpansion e = io::expansion_from(io::member(payload, "expansion", "payload"));
    const auto xs = io::points_from(io::member(payload, "x", "payload"), "x");
    json values = json::array();
    for (const cplx& x : xs) {
        const auto [y, dy] = evaluate_with_derivative(e, x);
        values.push_back(
            {{"x", io::to_json(x)}, {"y", io::to_json(y)}, {"dy", io::to_json(dy)}});
    }
    return {{"values", std::move(values)}};
}

json cmd_braid(const json& payload, const Defaults& d) {
    const MonodromyTraces t = io::traces_from(io::member(payload, "traces", "payload"));
    io::require_on_surface(t, surface_tol_for(payload, d));
    const json& gen = io::member(payload, "generator", "payload");
    if (!gen.is_string()) throw io::schema_error("generator: expected \"g0\" or \"g1\"");
    const std::string name = gen.get<std::string>();
    MonodromyTraces out;
    if (name == "g0") out = braid_around_0(t);
    else if (name == "g1") out = braid_around_1(t);
    else throw io::schema_error("generator: expected \"g0\" or \"g1\"");
    return {{"traces", io::to_json(out)},
            {"cubic_residual", std::abs(cubic_residual(out))}};
}

json cmd_picard(const json& payload, const Defaults&) {
    PicardSpec spec;
    spec.nu1 = io::cplx_from(io::member(payload, "nu1", "payload"), "nu1");
    spec.nu2 = io::cplx_from(io::member(payload, "nu2", "payload"), "nu2");
    if (payload.contains("N")) spec.N = io::int_from(payload["N"], "N");
    const auto xs = io::points_from(io::member(payload, "x", "payload"), "x");
    json values = json::array();
    for (const cplx& x : xs)
        values.push_back({{"x", io::to_json(x)}, {"y", io::to_json(picard_solution(spec, x))}});
    json out{{"values", std::move(values)}};
    if (payload.contains("leading_calv")) {
        const double calv = io::number_from(payload["leading_calv"], "leading_calv");
        out["leading"] = io::to_json(picard_leading(spec, calv));
    }
    return out;
}

json verify_one(const json& payload, const Defaults& d) {
    const ThetaParams th = io::theta_from(io::member(payload, "theta", "payload"));
    const MonodromyTraces t = io::traces_from(io::member(payload, "traces", "payload"));
    io::require_on_surface(t, surface_tol_for(payload, d));
    VerifyConfig cfg;
    if (!d.verify_config.empty()) cfg = io::verify_config_from(d.verify_config, cfg);
    if (payload.contains("config")) cfg = io::verify_config_from(payload["config"], cfg);
    logmsg(1, "verify: marching from 0 to 1");
    return io::to_json(verify_connection(th, t, cfg));
}

json cmd_verify(const json& payload, const Defaults& d, int batch) {
    if (batch <= 0) return verify_one(payload, d);
    const json& jobs = io::member(payload, "jobs", "payload");
    if (!jobs.is_array())
        throw io::schema_error("jobs: expected an array of verify payloads");
    if (static_cast<int>(jobs.size()) != batch)
        throw io::schema_error("jobs: --batch " + std::to_string(batch) + " given but "
                               + std::to_string(jobs.size()) + " jobs supplied");
    // parse and surface-check everything up front so the batch is all-librarian
    std::vector<VerifyJob> parsed;
    std::vector<json> errors(jobs.size());
    std::vector<int> slot(jobs.size(), -1);
    VerifyConfig cfg;
    if (!d.verify_config.empty()) cfg = io::verify_config_from(d.verify_config, cfg);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string where = "jobs[" + std::to_string(i) + "]";
        try {
            VerifyJob job;
            job.theta = io::theta_from(io::member(jobs[i], "theta", where), where + ".theta");
            job.traces =
                io::traces_from(io::member(jobs[i], "traces", where), where + ".traces");
            io::require_on_surface(job.traces, surface_tol_for(jobs[i], d));
            slot[i] = static_cast<int>(parsed.size());
            parsed.push_back(job);
        } catch (const io::surface_error& e) {
            errors[i] = {{"ok", false}, {"code", "off_cubic_surface"}, {"error", e.what()}};
        }
        // schema errors abort the whole batch: the input itself is malformed
    }
    const auto entries = verify_batch(parsed, cfg);
    json out_entries = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (slot[i] < 0) {
            out_entries.push_back(errors[i]);
            continue;
        }
        const BatchEntry& en = entries[slot[i]];
        if (en.ok)
            out_entries.push_back({{"ok", true}, {"report", io::to_json(en.report)}});
        else
            out_entries.push_back(
                {{"ok", false}, {"code", errc_name(en.code)}, {"error", en.failure}});
    }
    return {{"entries", std::move(out_entries)}};
}

// ---------------------------------------------------------------------------
// Exit-code mapping.

bool non_generic_code(errc c) {
    switch (c) {
        case errc::non_generic_data:
        case errc::unsupported_regime:
        case errc::wrong_regime:
        case errc::near_integer_sigma:
        case errc::zero_r:
        case errc::degenerate_conjugator:
            return true;
        default:
            return false;
    }
}

template <typename Fn>
int run_guarded(const IoOptions& io, Fn&& fn) {
    try {
        write_output(io, fn());
        return 0;
    } catch (const io::schema_error& e) {
        write_output(io, json{{"error", {{"code", "schema_violation"}, {"message", e.what()}}}});
        logmsg(1, std::string("schema violation: ") + e.what());
        return 2;
    } catch (const io::surface_error& e) {
        write_output(io, json{{"error", {{"code", "off_cubic_surface"}, {"message", e.what()}}}});
        logmsg(1, std::string("off surface: ") + e.what());
        return 4;
    } catch (const json::exception& e) {
        write_output(io, json{{"error", {{"code", "schema_violation"}, {"message", e.what()}}}});
        return 2;
    } catch (const error& e) {
        write_output(io,
                     json{{"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}});
        logmsg(1, std::string("library failure: ") + e.what());
        return non_generic_code(e.code()) ? 3 : 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Painleve VI connection toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default settings");

    struct Sub {
        CLI::App* cmd = nullptr;
        IoOptions io;
    };
    std::map<std::string, Sub> subs;
    for (const char* name : {"connect", "expand", "eval", "braid", "picard", "verify"}) {
        Sub& s = subs[name];
        s.cmd = app.add_subcommand(name);
        s.cmd->add_option("--in", s.io.in_path, "read the payload from a file");
        s.cmd->add_option("--out", s.io.out_path, "write the result to a file");
        s.cmd->add_flag("--schema", s.io.print_schema, "print the payload schema and exit");
    }
    subs["connect"].cmd->description("critical behavior constants at 0, 1, infinity");
    subs["expand"].cmd->description("recursive series expansion at a critical point");
    subs["eval"].cmd->description("evaluate a serialized expansion");
    subs["braid"].cmd->description("braid action on trace coordinates");
    subs["picard"].cmd->description("closed-form Picard family evaluation");
    subs["verify"].cmd->description("integrate across and compare with the prediction");
    int batch = 0;
    subs["verify"].cmd->add_option("--batch", batch, "run this many independent jobs");

    CLI11_PARSE(app, argc, argv);

    for (auto& [name, s] : subs) {
        if (!s.cmd->parsed()) continue;
        if (s.io.print_schema) {
            write_output(s.io, schema_for(name));
            return 0;
        }
        Defaults d;
        try {
            d = load_defaults(config_path);
        } catch (const io::schema_error& e) {
            std::cerr << "pvi6: " << e.what() << "\n";
            return 2;
        }
        const std::string cmd = name;
        return run_guarded(s.io, [&]() -> json {
            const json payload = read_payload(s.io);
            if (cmd == "connect") return cmd_connect(payload, d);
            if (cmd == "expand") return cmd_expand(payload, d);
            if (cmd == "eval") return cmd_eval(payload, d);
            if (cmd == "braid") return cmd_braid(payload, d);
            if (cmd == "picard") return cmd_picard(payload, d);
            return cmd_verify(payload, d, batch);
        });
    }
    return 0;
}
