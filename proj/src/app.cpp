#include "revorbit/app.hpp"

#include "revorbit/analysis.hpp"
#include "revorbit/error.hpp"
#include "revorbit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace revorbit::app {

using nlohmann::json;

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string_view to_string(EndKind k) {
    switch (k) {
    case EndKind::Closed: return "closed";
    case EndKind::Open: return "open";
    case EndKind::Infinite: return "infinite";
    }
    return "?";
}

const SurfaceSpec& need_surface(const RunConfig& cfg) {
    if (!cfg.surface) throw ConfigError("config needs a 'surface'");
    return *cfg.surface;
}

const PotentialSpec& need_potential(const RunConfig& cfg) {
    if (!cfg.potential) throw ConfigError("config needs a 'potential'");
    return *cfg.potential;
}

json rational_json(const std::optional<Rational>& r) {
    if (!r) return nullptr;
    return {{"p", r->p}, {"q", r->q}, {"residual", r->residual}};
}

} // namespace

std::string trajectory_csv(const Trajectory& traj, const Surface& s, const CentralPotential& p, bool embed) {
    std::string out = embed ? "t,u,phi,p_u,p_phi,E,x,y,z\n" : "t,u,phi,p_u,p_phi,E\n";
    out.reserve(traj.samples.size() * (embed ? 220 : 130));
    for (const PhaseState& st : traj.samples) {
        const double vals[6] = {st.t, st.u, st.phi, st.p_u, st.p_phi, hamiltonian(st, s, p)};
        for (int i = 0; i < 6; ++i) {
            if (i) out += ',';
            out += format_real(vals[i]);
        }
        if (embed) {
            const EmbeddedPoint e = revorbit::embed(s, st.u, st.phi);
            out += ',' + format_real(e.x) + ',' + format_real(e.y) + ',' + format_real(e.z);
        }
        out += '\n';
    }
    return out;
}

CommandResult surface_info(const RunConfig& cfg, const CommandOptions& opts) {
    const SurfaceSpec& spec = need_surface(cfg);
    const auto s = build_surface(spec);
    const std::vector<double> grid = s->interior_grid(1024);
    double kmin = INFINITY, kmax = -INFINITY;
    for (double u : grid) {
        const double K = gaussian_curvature(*s, u);
        kmin = std::min(kmin, K);
        kmax = std::max(kmax, K);
    }
    const bool k_constant = kmax - kmin <= 1e-9 * (1.0 + std::abs(kmin));
    const HConstancy hc = h_constancy(*s, 512, 512, 1e-9, opts.seed);
    const Interval& d = s->domain();

    json j;
    j["label"] = spec.label.empty() ? s->label() : spec.label;
    j["class"] = std::string(to_string(s->surface_class()));
    j["domain"] = {{"lo", real_or_null(d.lo)},
                   {"hi", real_or_null(d.hi)},
                   {"lo_kind", std::string(to_string(d.lo_kind))},
                   {"hi_kind", std::string(to_string(d.hi_kind))}};
    j["poles"] = {{"lo", s->pole_at_lo()}, {"hi", s->pole_at_hi()}};
    j["K"] = {{"min", kmin}, {"max", kmax}, {"constant", k_constant}};
    j["h"] = {{"constant", hc.constant}, {"mean", hc.mean}, {"spread", hc.spread}};
    if (hc.constant) {
        const double b2 = s->b_squared() ? *s->b_squared() : hc.mean;
        j["b_squared"] = b2;
        if (b2 >= 0.0) j["b"] = std::sqrt(b2);
    }

    std::ostringstream human;
    human << "class=" << to_string(s->surface_class()) << ", ";
    if (k_constant) human << "K=" << format_real(0.5 * (kmin + kmax));
    else human << "K in [" << format_real(kmin) << ", " << format_real(kmax) << "]";
    if (hc.constant) {
        const double b2 = j["b_squared"].get<double>();
        human << ", h=" << format_real(b2) << " (constant)";
        if (b2 >= 0.0) human << ", b=" << format_real(std::sqrt(b2));
    } else {
        human << ", h non-constant";
    }
    human << "\n";

    CommandResult r;
    if (opts.format == "csv") {
        std::ostringstream csv;
        csv << "key,value\nclass," << to_string(s->surface_class()) << "\nK_min," << format_real(kmin)
            << "\nK_max," << format_real(kmax) << "\nh_constant," << (hc.constant ? "true" : "false")
            << "\nh_mean," << format_real(hc.mean) << "\nh_spread," << format_real(hc.spread) << "\n";
        r.out = csv.str();
        r.files["surface_info.csv"] = r.out;
    } else {
        r.out = dump(j);
        r.files["surface_info.json"] = r.out;
    }
    r.log = human.str();
    return r;
}

namespace {

struct OrbitSetup {
    PhaseState init;
    double E = 0.0;
    std::optional<double> radial_period;
};

OrbitSetup setup_orbit(const RunConfig& cfg, const std::shared_ptr<const Surface>& s, const CentralPotential& p) {
    OrbitSetup out;
    const bool want_period = cfg.integrator.periods.has_value();
    if (cfg.initial) {
        const InitialSpec& i = *cfg.initial;
        out.init = {0.0, i.u, i.phi, i.p_u, i.p_phi, i.m};
        out.E = hamiltonian(out.init, *s, p);
        if (want_period) {
            const EffectiveProfile w(s, p, i.p_phi, i.m);
            out.radial_period = apsidal_angle(w, out.E, stable_circular_orbit(w).u0).period;
        }
        return out;
    }
    if (!cfg.orbit) throw ConfigError("orbit needs 'initial' or 'orbit'");
    const OrbitSpec& o = *cfg.orbit;
    const EffectiveProfile w(s, p, o.l, o.m);
    const CircularOrbit c = stable_circular_orbit(w);
    double u_start;
    if (o.circular) {
        out.E = c.E;
        u_start = c.u0;
    } else {
        if (!o.E) throw ConfigError("'orbit' needs 'E' unless it is circular");
        out.E = *o.E;
        u_start = turning_points(w, out.E, c.u0).u1;
    }
    out.init = {0.0, u_start, 0.0, 0.0, o.l, o.m};
    if (want_period) out.radial_period = apsidal_angle(w, out.E, c.u0).period;
    return out;
}

} // namespace

CommandResult orbit(const RunConfig& cfg, const CommandOptions& opts) {
    const auto s = build_surface(need_surface(cfg));
    const CentralPotential p = build_potential(need_potential(cfg), s);
    const OrbitSetup setup = setup_orbit(cfg, s, p);

    double dt = cfg.integrator.dt;
    if (setup.radial_period) dt = *cfg.integrator.periods * *setup.radial_period / cfg.integrator.n_steps;
    const Trajectory traj = integrate(*s, p, setup.init, dt, cfg.integrator.n_steps);

    json summary;
    summary["E0"] = traj.E0;
    summary["l"] = traj.l;
    summary["m"] = setup.init.m;
    summary["dt"] = dt;
    summary["n_samples"] = traj.samples.size();
    summary["drift_max"] = traj.drift_max();
    summary["relative_drift"] = traj.drift_max() / std::max(1.0, std::abs(traj.E0));
    double umin = INFINITY, umax = -INFINITY;
    for (const PhaseState& st : traj.samples) {
        umin = std::min(umin, st.u);
        umax = std::max(umax, st.u);
    }
    summary["u_range"] = {umin, umax};
    if (setup.radial_period) summary["radial_period"] = *setup.radial_period;
    if (const auto meas = measured_apsidal_angle(traj)) {
        summary["apsidal_measured"] = {
            {"delta_phi", meas->delta_phi}, {"period", meas->period}, {"periods", meas->periods}};
    } else {
        summary["apsidal_measured"] = nullptr;
    }
    summary["singular_end"] = traj.singular_end.has_value();
    if (traj.singular_end) {
        summary["singular_end_t"] = traj.singular_end->t;
        summary["singular_end_u"] = traj.singular_end->u;
    }
    if (cfg.output.embed) {
        const PhaseState& a = traj.samples.front();
        const PhaseState& b = traj.samples.back();
        const EmbeddedPoint pa = embed(*s, a.u, a.phi), pb = embed(*s, b.u, b.phi);
        summary["closure_distance"] = std::hypot(pa.x - pb.x, pa.y - pb.y, pa.z - pb.z);
    }

    CommandResult r;
    const std::string csv = trajectory_csv(traj, *s, p, cfg.output.embed);
    r.files["trajectory.csv"] = csv;
    r.files["summary.json"] = dump(summary);
    r.out = opts.format == "csv" && !opts.out_dir ? csv : r.files["summary.json"];
    if (opts.require_bound && traj.singular_end) {
        r.exit_code = kSingularOnly;
        r.log = "orbit reached a singular end at t=" + format_real(traj.singular_end->t) + "\n";
    }
    return r;
}

CommandResult apsidal_sweep(const RunConfig& cfg, const CommandOptions& opts) {
    const auto s = build_surface(need_surface(cfg));
    const CentralPotential p = build_potential(need_potential(cfg), s);
    const OrbitSpec o = cfg.orbit.value_or(OrbitSpec{});
    const EffectiveProfile w(s, p, o.l, o.m);
    const CircularOrbit c = stable_circular_orbit(w);
    const std::vector<double> energies =
        cfg.analysis.energies.empty() ? energy_grid(w, c, cfg.analysis.n_energies) : cfg.analysis.energies;
    ApsidalOptions ao;
    ao.q_max = cfg.analysis.q_max;
    ao.closure_tol = cfg.analysis.closure_tol;

    std::vector<std::optional<ApsidalResult>> rows(energies.size());
    std::vector<std::string> errors(energies.size());
    try {
        const auto all = kernels::apsidal_sweep_parallel(w, energies, c.u0, ao);
        for (std::size_t i = 0; i < all.size(); ++i) rows[i] = all[i];
    } catch (const Error&) {
        for (std::size_t i = 0; i < energies.size(); ++i) {
            try {
                rows[i] = apsidal_angle(w, energies[i], c.u0, ao);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    }

    json table = json::array();
    double dmin = INFINITY, dmax = -INFINITY;
    std::ostringstream csv;
    csv << "E,u1,u2,delta_phi,beta,period,p,q,residual\n";
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!rows[i]) {
            table.push_back({{"E", energies[i]}, {"error", errors[i]}});
            csv << format_real(energies[i]) << ",,,,,,,,\n";
            continue;
        }
        const ApsidalResult& a = *rows[i];
        dmin = std::min(dmin, a.delta_phi);
        dmax = std::max(dmax, a.delta_phi);
        table.push_back({{"E", a.E},
                         {"u1", a.u1},
                         {"u2", a.u2},
                         {"delta_phi", a.delta_phi},
                         {"beta", a.beta},
                         {"period", a.period},
                         {"closure", rational_json(a.closure)}});
        csv << format_real(a.E) << ',' << format_real(a.u1) << ',' << format_real(a.u2) << ','
            << format_real(a.delta_phi) << ',' << format_real(a.beta) << ',' << format_real(a.period) << ',';
        if (a.closure) csv << a.closure->p << ',' << a.closure->q << ',' << format_real(a.closure->residual);
        else csv << ",,";
        csv << '\n';
    }
    const double spread = dmax >= dmin ? dmax - dmin : 0.0;

    json j;
    j["circular"] = {{"u0", c.u0}, {"l", c.l}, {"E", c.E}, {"type", std::string(to_string(c.type))}};
    j["rows"] = table;
    j["delta_phi_spread"] = spread;
    j["energy_independent"] = spread <= 1e-6;

    CommandResult r;
    if (opts.format == "csv") {
        r.out = csv.str();
        r.files["apsidal_sweep.csv"] = r.out;
    } else {
        r.out = dump(j);
        r.files["apsidal_sweep.json"] = r.out;
    }
    r.log = "delta_phi spread over " + std::to_string(energies.size()) + " energies: " + format_real(spread) + "\n";
    return r;
}

namespace {

json report_json(const BertrandReport& rep) {
    json j;
    j["label"] = rep.label;
    j["verdict"] = std::string(to_string(rep.verdict));
    j["h_constant"] = rep.h_constant;
    if (rep.b_squared) j["b_squared"] = *rep.b_squared;
    j["h_spread"] = rep.h_spread;
    json roots = json::array();
    for (const QuarticSample& q : rep.roots) {
        roots.push_back({{"u", q.u}, {"z1", q.roots.z1}, {"z2", q.roots.z2}, {"real", q.roots.real}});
    }
    j["roots"] = roots;
    j["root_spread"] = {rep.root_spread[0], rep.root_spread[1]};
    j["constant_roots"] = rep.constant_roots;
    j["admissible"] = rep.admissible;
    j["beta"] = rep.beta;
    json rat = json::array();
    for (std::size_t i = 0; i < rep.rational.size(); ++i) {
        rat.push_back({{"p", rep.rational[i].p},
                       {"q", rep.rational[i].q},
                       {"residual", rep.rational[i].residual},
                       {"rational", static_cast<bool>(rep.rational_flag[i])}});
    }
    j["rational"] = rat;
    return j;
}

} // namespace

CommandResult bertrand(const RunConfig& cfg, const CommandOptions& opts) {
    std::vector<SurfaceSpec> specs = cfg.surfaces;
    if (specs.empty() && cfg.surface) specs.push_back(*cfg.surface);
    if (specs.empty()) throw ConfigError("config needs 'surface' or 'surfaces'");

    BertrandOptions bo;
    bo.q_max = cfg.analysis.q_max;
    bo.closure_tol = cfg.analysis.closure_tol;

    json reports = json::array();
    std::ostringstream human, csv;
    csv << "label,verdict,h_constant,b_squared,admissible,beta\n";
    for (const SurfaceSpec& spec : specs) {
        const auto s = build_surface(spec);
        BertrandReport rep = bertrand_classify(*s, bo);
        if (!spec.label.empty()) rep.label = spec.label;
        reports.push_back(report_json(rep));

        std::string adm, betas;
        for (std::size_t i = 0; i < rep.admissible.size(); ++i) {
            adm += (i ? ";" : "") + rep.admissible[i];
            betas += (i ? ";" : "") + format_real(rep.beta[i]);
        }
        human << rep.label << ": verdict=" << to_string(rep.verdict) << " admissible=[" << adm << "]"
              << " beta=[" << betas << "]\n";
        csv << '"' << rep.label << "\"," << to_string(rep.verdict) << ',' << (rep.h_constant ? "true" : "false") << ','
            << (rep.b_squared ? format_real(*rep.b_squared) : "") << ',' << adm << ',' << betas << '\n';
    }

    CommandResult r;
    if (opts.format == "csv") {
        r.out = csv.str();
        r.files["bertrand.csv"] = r.out;
    } else {
        r.out = dump(json{{"reports", reports}});
        r.files["bertrand.json"] = r.out;
    }
    r.log = human.str();
    return r;
}

CommandResult appell_check(const RunConfig& cfg, const CommandOptions& opts) {
    const auto s = build_surface(need_surface(cfg));
    const PotentialSpec& pspec = need_potential(cfg);
    if (pspec.kind == "custom") throw ConfigError("appell-check needs a gravitational or harmonic potential");
    const CentralPotential p = build_potential(pspec, s);
    const PlanarSpec ps = cfg.planar.value_or(PlanarSpec{});

    const auto plane = std::make_shared<const Surface>(make_constant_curvature(0.0, 1.0, 0.0));
    const CentralPotential planar_p = build_potential(pspec, plane);
    const PhaseState planar_init{0.0, ps.r, ps.psi, ps.m * ps.dr, ps.m * ps.r * ps.r * ps.dpsi, ps.m};
    const double dt = cfg.integrator.dt;
    const Trajectory plane_run = integrate(*plane, planar_p, planar_init, dt, cfg.integrator.n_steps);
    const std::vector<PlanarState> planar = planar_from_plane_run(plane_run);
    const Trajectory mapped = appell_map(*s, planar, ps.m);

    PhaseState init = mapped.samples.front();
    init.t = 0.0;
    const double span = mapped.samples.back().t;
    const long n_direct = std::max(1L, static_cast<long>(std::ceil(span / dt)));
    const Trajectory direct = integrate(*s, p, init, dt, n_direct);
    const double deviation = max_trace_deviation(mapped, direct);

    json j;
    j["max_deviation"] = deviation;
    j["planar_energy"] = plane_run.E0;
    j["surface_energy"] = direct.E0;
    j["planar_samples"] = plane_run.samples.size();
    j["direct_samples"] = direct.samples.size();
    j["surface_time_span"] = span;
    j["planar_singular_end"] = plane_run.singular_end.has_value();
    j["direct_singular_end"] = direct.singular_end.has_value();

    CommandResult r;
    r.out = dump(j);
    r.files["appell_check.json"] = r.out;
    r.files["mapped.csv"] = trajectory_csv(mapped, *s, p, cfg.output.embed);
    r.files["direct.csv"] = trajectory_csv(direct, *s, p, cfg.output.embed);
    if (opts.format == "csv" && !opts.out_dir) r.out = r.files["mapped.csv"];
    r.log = "max trace deviation " + format_real(deviation) + "\n";
    return r;
}

CommandResult run(const std::string& command, const std::string& config_path, const CommandOptions& opts) {
    CommandResult r;
    try {
        if (opts.format != "csv" && opts.format != "json") throw ConfigError("--format must be csv or json");
        const RunConfig cfg = load_config(config_path);
        if (command == "surface-info") return surface_info(cfg, opts);
        if (command == "orbit") return orbit(cfg, opts);
        if (command == "apsidal-sweep") return apsidal_sweep(cfg, opts);
        if (command == "bertrand") return bertrand(cfg, opts);
        if (command == "appell-check") return appell_check(cfg, opts);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const NoCriticalPoint& e) {
        r.exit_code = kNoCircularOrbit;
        r.log = std::string("error: ") + e.what() + "\n";
    } catch (const ConfigError& e) {
        r.exit_code = kConfigError;
        r.log = std::string("config error: ") + e.what() + "\n";
    } catch (const ParseError& e) {
        r.exit_code = kConfigError;
        r.log = std::string("config error: ") + e.what() + "\n";
    } catch (const InvalidSurface& e) {
        r.exit_code = kConfigError;
        r.log = std::string("config error: ") + e.what() + "\n";
    } catch (const InvalidArgument& e) {
        r.exit_code = kConfigError;
        r.log = std::string("config error: ") + e.what() + "\n";
    } catch (const Error& e) {
        r.exit_code = kRuntimeError;
        r.log = std::string("error: ") + e.what() + "\n";
    }
    return r;
}

void write_files(const CommandResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
    for (const auto& [name, contents] : r.files) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + name + "' in '" + dir + "'");
        out << contents;
    }
}

} // namespace revorbit::app
