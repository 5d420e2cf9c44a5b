#include "revorbit/config.hpp"

#include "revorbit/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace revorbit {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_real(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
        if (s == "-inf" || s == "-infinity") return -kInf;
    }
    throw ConfigError("'" + key + "' must be a number");
}

json from_real(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    return json(x);
}

double number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return to_real(j.at(key), key);
}

std::optional<double> optional_number(const json& j, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return to_real(j.at(key), key);
}

std::string text(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError("'" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

const json& object(const json& j, const std::string& what) {
    if (!j.is_object()) throw ConfigError("'" + what + "' must be an object");
    return j;
}

SurfaceSpec parse_surface(const json& j) {
    object(j, "surface");
    SurfaceSpec s;
    s.kind = text(j, "kind", "");
    s.label = text(j, "label", "");
    if (s.kind == "constant_curvature") {
        s.K = number(j, "K", s.K);
        s.C1 = number(j, "C1", s.C1);
        s.C2 = number(j, "C2", s.C2);
    } else if (s.kind == "torus") {
        s.R = number(j, "R", s.R);
        s.r = number(j, "r", s.r);
    } else if (s.kind == "custom") {
        s.f_expr = text(j, "f_expr", "");
        if (s.f_expr.empty()) throw ConfigError("custom surface needs 'f_expr'");
        if (!j.contains("domain") || !j.at("domain").is_array() || j.at("domain").size() != 2) {
            throw ConfigError("custom surface needs 'domain': [c, d]");
        }
        s.c = to_real(j.at("domain")[0], "domain");
        s.d = to_real(j.at("domain")[1], "domain");
        s.theta_ref = optional_number(j, "theta_ref");
        s.theta_const = number(j, "theta_const", 0.0);
    } else {
        throw ConfigError("unknown surface kind '" + s.kind + "'");
    }
    return s;
}

PotentialSpec parse_potential(const json& j) {
    object(j, "potential");
    PotentialSpec p;
    p.kind = text(j, "kind", "");
    if (p.kind == "gravitational") {
        p.a = number(j, "a", p.a);
    } else if (p.kind == "harmonic") {
        p.k = number(j, "k", p.k);
    } else if (p.kind == "custom") {
        p.V_expr = text(j, "V_expr", "");
        if (p.V_expr.empty()) throw ConfigError("custom potential needs 'V_expr'");
    } else {
        throw ConfigError("unknown potential kind '" + p.kind + "'");
    }
    return p;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    require(j.is_object(), "config must be a JSON object");

    RunConfig cfg;
    try {
        if (j.contains("surface")) cfg.surface = parse_surface(j.at("surface"));
        if (j.contains("potential")) cfg.potential = parse_potential(j.at("potential"));
        if (j.contains("surfaces")) {
            require(j.at("surfaces").is_array(), "'surfaces' must be an array");
            for (const json& s : j.at("surfaces")) cfg.surfaces.push_back(parse_surface(s));
        }
        if (j.contains("initial")) {
            const json& i = object(j.at("initial"), "initial");
            InitialSpec in;
            in.u = number(i, "u", 0.0);
            in.phi = number(i, "phi", 0.0);
            in.p_u = number(i, "p_u", 0.0);
            in.p_phi = number(i, "p_phi", 0.0);
            in.m = number(i, "m", 1.0);
            require(i.contains("u"), "'initial' needs 'u'");
            require(in.m > 0.0, "mass must be positive");
            cfg.initial = in;
        }
        if (j.contains("orbit")) {
            const json& o = object(j.at("orbit"), "orbit");
            OrbitSpec orb;
            orb.E = optional_number(o, "E");
            orb.l = number(o, "l", 1.0);
            orb.m = number(o, "m", 1.0);
            if (o.contains("circular")) {
                require(o.at("circular").is_boolean(), "'circular' must be a boolean");
                orb.circular = o.at("circular").get<bool>();
            }
            require(orb.m > 0.0, "mass must be positive");
            cfg.orbit = orb;
        }
        if (j.contains("integrator")) {
            const json& i = object(j.at("integrator"), "integrator");
            cfg.integrator.dt = number(i, "dt", cfg.integrator.dt);
            if (i.contains("n_steps")) {
                require(i.at("n_steps").is_number_integer(), "'n_steps' must be an integer");
                cfg.integrator.n_steps = i.at("n_steps").get<long>();
            }
            cfg.integrator.periods = optional_number(i, "periods");
        }
        require(cfg.integrator.dt > 0.0 && std::isfinite(cfg.integrator.dt), "dt must be positive");
        require(cfg.integrator.n_steps > 0, "n_steps must be positive");
        require(!cfg.integrator.periods || *cfg.integrator.periods > 0.0, "periods must be positive");
        if (j.contains("analysis")) {
            const json& a = object(j.at("analysis"), "analysis");
            if (a.contains("q_max")) {
                require(a.at("q_max").is_number_integer(), "'q_max' must be an integer");
                cfg.analysis.q_max = a.at("q_max").get<long>();
            }
            cfg.analysis.closure_tol = number(a, "closure_tol", cfg.analysis.closure_tol);
            if (a.contains("n_energies")) {
                require(a.at("n_energies").is_number_integer(), "'n_energies' must be an integer");
                cfg.analysis.n_energies = a.at("n_energies").get<int>();
            }
            if (a.contains("energies")) {
                require(a.at("energies").is_array(), "'energies' must be an array");
                for (const json& e : a.at("energies")) cfg.analysis.energies.push_back(to_real(e, "energies"));
            }
        }
        require(cfg.analysis.q_max >= 1, "q_max must be at least 1");
        require(cfg.analysis.n_energies >= 1, "n_energies must be at least 1");
        require(cfg.analysis.closure_tol > 0.0, "closure_tol must be positive");
        if (j.contains("output")) {
            const json& o = object(j.at("output"), "output");
            if (o.contains("embed")) {
                require(o.at("embed").is_boolean(), "'embed' must be a boolean");
                cfg.output.embed = o.at("embed").get<bool>();
            }
        }
        if (j.contains("planar")) {
            const json& p = object(j.at("planar"), "planar");
            PlanarSpec ps;
            ps.r = number(p, "r", ps.r);
            ps.psi = number(p, "psi", ps.psi);
            ps.dr = number(p, "dr", ps.dr);
            ps.dpsi = number(p, "dpsi", ps.dpsi);
            ps.m = number(p, "m", ps.m);
            require(ps.r > 0.0, "planar r must be positive");
            require(ps.m > 0.0, "mass must be positive");
            cfg.planar = ps;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json to_json(const SurfaceSpec& s) {
    json j;
    j["kind"] = s.kind;
    if (!s.label.empty()) j["label"] = s.label;
    if (s.kind == "constant_curvature") {
        j["K"] = s.K;
        j["C1"] = s.C1;
        j["C2"] = s.C2;
    } else if (s.kind == "torus") {
        j["R"] = s.R;
        j["r"] = s.r;
    } else {
        j["f_expr"] = s.f_expr;
        j["domain"] = json::array({from_real(s.c), from_real(s.d)});
        if (s.theta_ref) j["theta_ref"] = *s.theta_ref;
        j["theta_const"] = s.theta_const;
    }
    return j;
}

namespace {

json to_json(const PotentialSpec& p) {
    json j;
    j["kind"] = p.kind;
    if (p.kind == "gravitational") j["a"] = p.a;
    else if (p.kind == "harmonic") j["k"] = p.k;
    else j["V_expr"] = p.V_expr;
    return j;
}

} // namespace

json to_json(const RunConfig& cfg) {
    json j = json::object();
    if (cfg.surface) j["surface"] = to_json(*cfg.surface);
    if (cfg.potential) j["potential"] = to_json(*cfg.potential);
    if (!cfg.surfaces.empty()) {
        j["surfaces"] = json::array();
        for (const SurfaceSpec& s : cfg.surfaces) j["surfaces"].push_back(to_json(s));
    }
    if (cfg.initial) {
        const InitialSpec& i = *cfg.initial;
        j["initial"] = {{"u", i.u}, {"phi", i.phi}, {"p_u", i.p_u}, {"p_phi", i.p_phi}, {"m", i.m}};
    }
    if (cfg.orbit) {
        const OrbitSpec& o = *cfg.orbit;
        j["orbit"] = {{"l", o.l}, {"m", o.m}, {"circular", o.circular}};
        if (o.E) j["orbit"]["E"] = *o.E;
    }
    j["integrator"] = {{"dt", cfg.integrator.dt}, {"n_steps", cfg.integrator.n_steps}};
    if (cfg.integrator.periods) j["integrator"]["periods"] = *cfg.integrator.periods;
    j["analysis"] = {{"q_max", cfg.analysis.q_max},
                     {"closure_tol", cfg.analysis.closure_tol},
                     {"n_energies", cfg.analysis.n_energies},
                     {"energies", cfg.analysis.energies}};
    j["output"] = {{"embed", cfg.output.embed}};
    if (cfg.planar) {
        const PlanarSpec& p = *cfg.planar;
        j["planar"] = {{"r", p.r}, {"psi", p.psi}, {"dr", p.dr}, {"dpsi", p.dpsi}, {"m", p.m}};
    }
    return j;
}

std::shared_ptr<const Surface> build_surface(const SurfaceSpec& spec) {
    if (spec.kind == "constant_curvature") {
        return std::make_shared<const Surface>(make_constant_curvature(spec.K, spec.C1, spec.C2));
    }
    if (spec.kind == "torus") return std::make_shared<const Surface>(make_torus(spec.R, spec.r));
    if (spec.kind == "custom") {
        CustomSurfaceOptions opts;
        opts.theta_ref = spec.theta_ref;
        opts.theta_constant = spec.theta_const;
        return std::make_shared<const Surface>(make_custom(spec.f_expr, spec.c, spec.d, opts));
    }
    throw ConfigError("unknown surface kind '" + spec.kind + "'");
}

CentralPotential build_potential(const PotentialSpec& spec, std::shared_ptr<const Surface> s) {
    if (spec.kind == "gravitational") return gravitational(spec.a, std::move(s));
    if (spec.kind == "harmonic") return harmonic(spec.k, std::move(s));
    if (spec.kind == "custom") return custom_potential(spec.V_expr);
    throw ConfigError("unknown potential kind '" + spec.kind + "'");
}

} // namespace revorbit
