// psgzt command-line front end. Every subcommand writes one data table (CSV or JSON) and a
// metadata record holding the config echo, version, wall time and result summary.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "psgzt/atlas.hpp"
#include "psgzt/error.hpp"
#include "psgzt/floquet.hpp"
#include "psgzt/ivp.hpp"
#include "psgzt/model.hpp"
#include "psgzt/orbit.hpp"
#include "psgzt/smooth.hpp"

#ifndef PSGZT_VERSION
#define PSGZT_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace psgzt;

namespace {

struct Config {
    double tau = 0.0, c = 0.0, theta = 0.0, kappa = 33.0;
    long k = 0;
    int j = 1;
    std::string branch = "low", half = "lower", id = "T", grid, out = "-", format = "csv";
    double t_end = 20.0, dt = 0.0, tol = 1e-6, transient = -1.0, horizon = 300.0;
    double smooth_transient = 100.0, c_lo = -1.0, c_hi = -1.0;
    int points = 0, phi_sign = -1;
    double phi0 = 0.0;
    long long seed = 0;
    bool emit_profile = false, power_check = false;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Output {
    Table data;
    std::map<std::string, Table> extra;  // written next to the main file with a suffix
    json results = json::object();
};

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_float()) return fmt_double(v.get<double>());
    if (v.is_number()) return v.dump();
    return v.get<std::string>();
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell(r[i]);
        os << '\n';
    }
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(json(r));
    return json{{"columns", t.columns}, {"rows", rows}};
}

// Split "a:b:n" into an axis.
GridAxis parse_axis(const std::string& s) {
    GridAxis g;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.n, &tail) != 3 || g.n < 1)
        throw CLI::ValidationError("--grid", "expected tmin:tmax:n[,cmin:cmax:n] with n >= 1, got '" + s + "'");
    return g;
}

std::pair<GridAxis, std::optional<GridAxis>> parse_grid(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {parse_axis(s), std::nullopt};
    return {parse_axis(s.substr(0, comma)), parse_axis(s.substr(comma + 1))};
}

GridAxis require_2d(const Config& cfg, GridAxis& second) {
    auto [a, b] = parse_grid(cfg.grid);
    if (!b) throw CLI::ValidationError("--grid", "this subcommand needs two axes tmin:tmax:n,cmin:cmax:n");
    second = *b;
    return a;
}

Branch parse_branch(const std::string& s) { return s == "high" ? Branch::High : Branch::Low; }

// Half-open grid lo + i (hi - lo)/n, i = 0..n-1, with the first point moved off lo.
std::vector<double> curve_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / n);
    if (!g.empty()) g.front() = lo + 1e-6;
    return g;
}

json curve_row(const CurveSample& s) {
    return json::array({to_string(s.id), s.tau, s.c, num(s.rho), s.j ? json(*s.j) : json(nullptr)});
}

// ---- subcommands ----------------------------------------------------------------------

Output cmd_simulate(const Config& cfg, bool smooth) {
    Output o;
    const double transient = cfg.transient >= 0.0 ? cfg.transient : 0.5 * cfg.t_end;
    o.data.columns = {"t", "h", "segment_index"};
    if (smooth) {
        const SmoothParams sp{cfg.kappa, cfg.c, cfg.tau};
        const double dt = cfg.dt > 0.0 ? cfg.dt : default_smooth_dt(cfg.tau);
        const SampledTrajectory tr = integrate_smooth(sp, seed_history(sp), cfg.t_end, dt);
        for (std::size_t i = 0; i < tr.h.size(); ++i)
            o.data.rows.push_back({tr.t0 + dt * static_cast<double>(i), tr.h[i], -1});
        o.results["model"] = "smooth";
        o.results["dt"] = dt;
        return o;
    }
    const ModelParams p{cfg.c, cfg.tau};
    const InitialFunction phi{0.0, ConstantSign{cfg.phi_sign, cfg.phi0}};
    const PiecewiseTrajectory tr = solve_exact(phi, p, cfg.t_end);
    const double dt = cfg.dt > 0.0 ? cfg.dt : 0.01;
    const long n = static_cast<long>(std::floor(cfg.t_end / dt + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double t = dt * static_cast<double>(i);
        o.data.rows.push_back({t, tr.eval(t), static_cast<long>(tr.segment_index(t))});
    }
    Table z;
    z.columns = {"z", "direction", "degenerate"};
    for (const Zero& e : tr.zeros) z.rows.push_back({e.z, to_string(e.dir), e.degenerate});
    o.extra["zeros"] = z;

    o.results["model"] = "psgzt";
    o.results["segments"] = tr.segments.size();
    o.results["zeros"] = tr.zeros.size();
    o.results["transient"] = transient;
    try {
        const auto per = detect_period(tr, transient, cfg.tol);
        o.results["detected_period"] = per ? json(*per) : json(nullptr);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TooShort) throw;
        o.results["detected_period"] = nullptr;
        o.results["period_note"] = e.what();
    }
    return o;
}

Output cmd_orbit(const Config& cfg) {
    Output o;
    const ModelParams p{cfg.c, cfg.tau};
    const OrbitProfile orb = build_orbit(p, parse_branch(cfg.branch));
    if (!orb.validity.valid) fail(ErrorCode::NoOrbit, orb.validity.reason);
    o.results["alpha"] = orb.alpha();
    o.results["branch"] = cfg.branch;
    o.results["degenerate"] = orb.validity.degenerate;
    o.results["subregion"] = to_string(orb.shape.subregion);
    o.results["in_R"] = orb.region.in_R;
    o.results["in_S"] = orb.region.in_S;
    o.results["min_h"] = orb.positivity.min_h;
    o.results["hprime_alpha"] = orb.phase.hprime_alpha;
    const int n = cfg.points > 0 ? cfg.points : 1000;
    o.results["symmetry_residual"] = orb.symmetry_residual(n);
    if (cfg.emit_profile) {
        o.data.columns = {"t", "h", "symmetry_residual"};
        for (int i = 0; i < n; ++i) {
            const double t = orb.alpha() + static_cast<double>(i) / n;
            const double h = orb.eval(t);
            o.data.rows.push_back({t, h, std::abs(h + orb.eval(t + 0.5))});
        }
    } else {
        o.data.columns = {"t_start", "t_end", "s", "p_start"};
        for (const auto& pc : orb.pieces) o.data.rows.push_back({pc.t_start, pc.t_end, pc.s, pc.p_start});
    }
    return o;
}

void region_row(Table& t, double theta, double c) {
    const RegionVerdict v = region_verdict(theta, c);
    t.rows.push_back({theta, c, v.in_R, v.in_S, to_string(classify_any(theta, c)), to_string(v.binding)});
}

Output cmd_region(const Config& cfg, bool have_theta) {
    Output o;
    o.data.columns = {"theta", "c", "in_R", "in_S", "subregion", "binding_constraint"};
    if (!cfg.grid.empty()) {
        GridAxis cs;
        const GridAxis th = require_2d(cfg, cs);
        for (double a : th.values())
            for (double b : cs.values()) region_row(o.data, snap_theta(a), b);
    } else {
        const double theta = have_theta ? snap_theta(cfg.theta) : delay_decomp(cfg.tau).theta;
        region_row(o.data, theta, cfg.c);
    }
    o.results["points"] = o.data.rows.size();
    return o;
}

json spectrum_json(const FloquetSpectrum& sp) {
    json r = {{"verdict", to_string(sp.verdict)},
              {"max_modulus", sp.max_modulus},
              {"dominant_rho", sp.dominant_rho()},
              {"max_residual", sp.max_residual}};
    r["crossing_rho"] = sp.crossing ? json(sp.crossing->rho) : json(nullptr);
    return r;
}

Output cmd_floquet(const Config& cfg) {
    Output o;
    const Branch br = parse_branch(cfg.branch);
    if (!cfg.grid.empty()) {
        o.data.columns = {"tau", "c", "branch", "verdict", "max_modulus", "rho"};
        GridAxis cs;
        const GridAxis ts = require_2d(cfg, cs);
        for (double t : ts.values())
            for (double c : cs.values()) {
                try {
                    const FloquetSpectrum sp = spectrum(char_poly(ModelParams{c, t}, br));
                    o.data.rows.push_back({t, c, cfg.branch, to_string(sp.verdict), sp.max_modulus, sp.dominant_rho()});
                } catch (const Error& e) {
                    if (!is_domain_error(e.code())) throw;
                    o.data.rows.push_back({t, c, cfg.branch, error_name(e.code()), nullptr, nullptr});
                }
            }
        return o;
    }
    const ModelParams p{cfg.c, cfg.tau};
    const CharPoly cp = char_poly(p, br);
    const FloquetSpectrum sp = spectrum(cp);
    o.data.columns = {"tau", "c", "branch", "re", "im", "modulus"};
    for (const auto& z : sp.roots) o.data.rows.push_back({cfg.tau, cfg.c, cfg.branch, z.real(), z.imag(), std::abs(z)});
    o.results = spectrum_json(sp);
    o.results["degree"] = cp.degree;
    o.results["hprime_alpha"] = cp.hprime;
    o.results["coefficients"] = cp.coeffs;
    if (cfg.power_check)
        o.results["power_iteration_growth"] = power_iteration_check(p, br, 4000, static_cast<std::uint64_t>(cfg.seed));
    return o;
}

Output cmd_curve(const Config& cfg) {
    Output o;
    o.data.columns = {"curve_id", "tau", "c", "rho", "j"};
    const bool upper = cfg.half == "upper";
    const int n = cfg.points > 0 ? cfg.points : 200;
    const double lo = upper ? 0.5 : 0.0, hi = upper ? 1.0 : 0.5;
    std::vector<CurveSample> samples;
    if (cfg.id == "T") {
        samples = torus_curve_T(cfg.k, upper, curve_grid(lo, hi, n));
    } else if (cfg.id == "SN") {
        const double th = theta_hat();
        std::vector<double> g;
        for (int i = 0; i < n; ++i) g.push_back(n == 1 ? 0.25 : (0.5 - th) + (2.0 * th - 0.5) * i / (n - 1));
        samples = sn_curve(g);
    } else if (cfg.id == "BC") {
        samples = bc_curves(curve_grid(0.0, 0.5, n));
    } else if (cfg.id == "Bj") {
        const JBranch b = general_j_branch(cfg.k, upper, cfg.j);
        for (double t : curve_grid(lo, hi, n)) samples.push_back(b.sample(t));
        o.results["hprime_alpha"] = b.hprime;
        o.results["omega"] = b.omega;
    } else if (cfg.id == "SIGNUM_T") {
        samples.push_back(signum_forced_boundary(cfg.k, upper));
    } else {  // B
        if (cfg.grid.empty()) throw CLI::ValidationError("--grid", "curve B needs --grid tmin:tmax:n over tau");
        samples = stability_boundary_B(parse_grid(cfg.grid).first.values());
    }
    for (const auto& s : samples) o.data.rows.push_back(curve_row(s));
    o.results["samples"] = samples.size();
    return o;
}

Output cmd_sweep(const Config& cfg) {
    Output o;
    o.data.columns = {"tau", "c", "in_R", "in_S", "verdict", "max_modulus", "rho"};
    GridAxis cs;
    const GridAxis ts = require_2d(cfg, cs);
    const auto rows = sweep(ts, cs);
    std::map<std::string, int> counts;
    json errors = json::array();
    for (const auto& r : rows) {
        o.data.rows.push_back({r.tau, r.c, r.in_R, r.in_S, r.verdict, num(r.max_modulus), num(r.rho)});
        ++counts[r.verdict];
        if (!r.error.empty()) errors.push_back({{"tau", r.tau}, {"c", r.c}, {"error", r.error}});
    }
    o.results["verdict_counts"] = counts;
    o.results["errors"] = errors;
    return o;
}

Output cmd_compare(const Config& cfg, bool have_tau) {
    Output o;
    o.data.columns = {"tau", "kappa", "c_smooth", "c_psgzt", "rel_gap"};
    std::vector<double> taus;
    if (!cfg.grid.empty()) taus = parse_grid(cfg.grid).first.values();
    else if (have_tau) taus = {cfg.tau};
    else throw CLI::ValidationError("--tau", "compare needs --tau or --grid tmin:tmax:n");
    ClassifyOptions opt;
    opt.transient = cfg.smooth_transient;
    opt.horizon = cfg.horizon;
    opt.tol = cfg.tol;
    opt.dt = cfg.dt;
    json brackets = json::array();
    for (double t : taus) {
        const auto b = boundary_at(t);
        if (!b) continue;
        const double lo = cfg.c_lo >= 0.0 ? cfg.c_lo : std::max(0.05, b->c - 1.5);
        const double hi = cfg.c_hi >= 0.0 ? cfg.c_hi : b->c + 1.5;
        const BoundaryEstimate e = smooth_boundary_bisect(cfg.kappa, t, lo, hi, opt);
        o.data.rows.push_back({t, cfg.kappa, e.c, b->c, (e.c - b->c) / b->c});
        brackets.push_back({{"tau", t}, {"c_lo", e.c_lo}, {"c_hi", e.c_hi}, {"evaluations", e.evaluations}});
    }
    o.results["horizon"] = opt.horizon;
    o.results["brackets"] = brackets;
    return o;
}

// ---- config echo and reload -----------------------------------------------------------

std::string option_key(const CLI::Option* op) {
    const auto& names = op->get_lnames();
    return names.empty() ? std::string() : names.front();
}

json config_echo(const std::string& sub, CLI::App* app) {
    json c = json::object();
    c["subcommand"] = sub;
    for (const CLI::Option* op : app->get_options()) {
        const std::string key = option_key(op);
        if (key.empty() || key == "help" || key == "config" || op->count() == 0) continue;
        if (op->get_type_size() == 0) c[key] = true;
        else c[key] = op->results().back();
    }
    return c;
}

// Expand --config FILE into explicit flags placed before the user's own flags.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> user(argv + 1, argv + argc);
    std::optional<std::string> path;
    for (std::size_t i = 0; i < user.size(); ++i) {
        if (user[i] == "--config" && i + 1 < user.size()) {
            path = user[i + 1];
            user.erase(user.begin() + static_cast<long>(i), user.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (user[i].rfind("--config=", 0) == 0) {
            path = user[i].substr(9);
            user.erase(user.begin() + static_cast<long>(i));
            break;
        }
    }
    std::vector<std::string> args{argv[0]};
    if (!path) {
        args.insert(args.end(), user.begin(), user.end());
        return args;
    }
    std::ifstream in(*path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + *path);
    json j = json::parse(in);
    if (j.contains("config")) j = j["config"];
    std::string sub;
    if (!user.empty() && user.front().rfind("-", 0) != 0) {
        sub = user.front();
        user.erase(user.begin());
    } else {
        sub = j.value("subcommand", "");
    }
    args.push_back(sub);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "subcommand") continue;
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) args.push_back("--" + it.key());
            continue;
        }
        args.push_back("--" + it.key());
        args.push_back(it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
    }
    args.insert(args.end(), user.begin(), user.end());
    return args;
}

void emit(const Config& cfg, const Output& o, const json& meta) {
    const bool to_stdout = cfg.out.empty() || cfg.out == "-";
    if (cfg.format == "json") {
        json doc = meta;
        doc["data"] = table_json(o.data);
        for (const auto& [name, t] : o.extra) doc["extra"][name] = table_json(t);
        if (to_stdout) {
            std::cout << doc.dump(2) << '\n';
        } else {
            std::ofstream f(cfg.out);
            f << doc.dump(2) << '\n';
        }
        return;
    }
    if (to_stdout) {
        write_csv(std::cout, o.data);
        std::cerr << meta.dump() << '\n';
        return;
    }
    {
        std::ofstream f(cfg.out);
        write_csv(f, o.data);
    }
    std::string stem = cfg.out;
    if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
    for (const auto& [name, t] : o.extra) {
        std::ofstream f(stem + "." + name + ".csv");
        write_csv(f, t);
    }
    std::ofstream m(stem + ".meta.json");
    m << meta.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solver and bifurcation atlas for h'(t) = -sign(h(t - tau)) + c cos(2 pi t)"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", PSGZT_VERSION);
    Config cfg;

    struct Flags {
        CLI::Option *tau, *theta, *kappa;
    };
    std::map<std::string, Flags> flags;
    auto add_common = [&](CLI::App* s) {
        Flags f{};
        f.tau = s->add_option("--tau", cfg.tau, "delay tau > 0");
        s->add_option("--c", cfg.c, "forcing amplitude c >= 0");
        f.theta = s->add_option("--theta", cfg.theta, "fractional delay in [0, 1)");
        s->add_option("--k", cfg.k, "integer part of tau")->check(CLI::NonNegativeNumber);
        s->add_option("--branch", cfg.branch, "orbit branch")->check(CLI::IsMember({"low", "high"}));
        s->add_option("--half", cfg.half, "half-interval of theta")->check(CLI::IsMember({"lower", "upper"}));
        f.kappa = s->add_option("--kappa", cfg.kappa, "smooth model slope in [1, 200]; simulate switches to the smooth model")->check(CLI::Range(1.0, 200.0));
        s->add_option("--t-end", cfg.t_end, "integration end time")->check(CLI::PositiveNumber);
        s->add_option("--dt", cfg.dt, "sample spacing (exact) or step (smooth); 0 = default")->check(CLI::NonNegativeNumber);
        s->add_option("--tol", cfg.tol, "period / convergence tolerance")->check(CLI::PositiveNumber);
        s->add_option("--transient", cfg.transient, "time discarded before period detection");
        s->add_option("--smooth-transient", cfg.smooth_transient, "smooth classifier transient (periods)")->check(CLI::NonNegativeNumber);
        s->add_option("--horizon", cfg.horizon, "smooth classifier horizon (periods)")->check(CLI::PositiveNumber);
        s->add_option("--c-lo", cfg.c_lo, "lower end of the bisection bracket");
        s->add_option("--c-hi", cfg.c_hi, "upper end of the bisection bracket");
        s->add_option("--points", cfg.points, "number of samples")->check(CLI::NonNegativeNumber);
        s->add_option("--grid", cfg.grid, "tmin:tmax:n[,cmin:cmax:n]");
        s->add_option("--out", cfg.out, "output path, '-' for stdout");
        s->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--seed", cfg.seed, "seed for randomized steps");
        s->add_option("--id", cfg.id, "curve id")->check(CLI::IsMember({"T", "SN", "BC", "Bj", "SIGNUM_T", "B"}));
        s->add_option("--j", cfg.j, "general branch index j")->check(CLI::PositiveNumber);
        s->add_option("--phi-sign", cfg.phi_sign, "sign of the constant-slope initial function")->check(CLI::IsMember({-1, 1}));
        s->add_option("--phi0", cfg.phi0, "initial function value at t = 0");
        s->add_flag("--emit-profile", cfg.emit_profile, "orbit: emit sampled profile instead of pieces");
        s->add_flag("--power-check", cfg.power_check, "floquet: also run the power iteration");
        s->add_option("--config", "JSON config or metadata file to replay");
        flags[s->get_name()] = f;
    };
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"simulate", "integrate an initial value problem"},
        {"orbit", "construct the 1:1 periodic orbit"},
        {"region", "existence region verdicts"},
        {"floquet", "Floquet spectrum of the orbit"},
        {"curve", "bifurcation curves"},
        {"sweep", "stability sweep over a (tau, c) grid"},
        {"compare", "smooth model boundary against the closed form"},
    };
    for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help));

    const auto t_start = std::chrono::steady_clock::now();
    std::string sub;
    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<char*> ptrs;
        for (auto& a : args) ptrs.push_back(a.data());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
        CLI::App* chosen = app.get_subcommands().front();
        sub = chosen->get_name();
        const Flags& f = flags[sub];
        const bool have_tau = f.tau->count() > 0;
        const bool have_theta = f.theta->count() > 0;
        const bool need_point = cfg.grid.empty() &&
                                (sub == "simulate" || sub == "orbit" || sub == "floquet" || sub == "region");
        if (need_point && !have_tau && !(sub == "region" && have_theta))
            throw CLI::ValidationError("--tau", "required (tau > 0)");

        Output o;
        if (sub == "simulate") o = cmd_simulate(cfg, f.kappa->count() > 0);
        else if (sub == "orbit") o = cmd_orbit(cfg);
        else if (sub == "region") o = cmd_region(cfg, have_theta);
        else if (sub == "floquet") o = cmd_floquet(cfg);
        else if (sub == "curve") o = cmd_curve(cfg);
        else if (sub == "sweep") o = cmd_sweep(cfg);
        else o = cmd_compare(cfg, have_tau);

        json meta;
        meta["tool"] = "psgzt";
        meta["version"] = PSGZT_VERSION;
        meta["config"] = config_echo(sub, chosen);
        meta["results"] = o.results;
        meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        emit(cfg, o, meta);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "psgzt " << sub << ": " << e.what() << '\n';
        return is_domain_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "psgzt " << sub << ": " << e.what() << '\n';
        return 3;
    }
}
