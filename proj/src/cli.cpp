#include "mel/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mel/equilibrium.hpp"
#include "mel/golden.hpp"
#include "mel/household.hpp"
#include "mel/simulate.hpp"

namespace mel {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double x, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return buf;
}

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + v);
    }
}

void parse_grid_spec(RunConfig& cfg, const std::string& v) {
    std::istringstream is(v);
    std::string a, s, b;
    if (!std::getline(is, a, ':') || !std::getline(is, s, ':') || !std::getline(is, b))
        throw ConfigError("grid must be A:STEP:B, got '" + v + "'");
    cfg.grid_lo = to_double(a, "grid");
    cfg.grid_step = to_double(s, "grid");
    cfg.grid_hi = to_double(b, "grid");
    cfg.has_grid = true;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto phi_key = [&](double PayoffMatrix::*field) {
        cfg.phi.*field = to_double(value, key);
        cfg.has_payoffs = true;
    };
    if (key == "command") cfg.command = value;
    else if (key == "phi_hh") phi_key(&PayoffMatrix::hh);
    else if (key == "phi_hl") phi_key(&PayoffMatrix::hl);
    else if (key == "phi_lh") phi_key(&PayoffMatrix::lh);
    else if (key == "phi_ll") phi_key(&PayoffMatrix::ll);
    else if (key == "k") { cfg.k = to_double(value, key); cfg.has_household = true; }
    else if (key == "alpha") { cfg.cd_share = to_double(value, key); cfg.has_household = true; }
    else if (key == "t_l") { cfg.t_l = to_double(value, key); cfg.has_household = true; }
    else if (key == "t_h") { cfg.t_h = to_double(value, key); cfg.has_household = true; }
    else if (key == "c") cfg.c = to_double(value, key);
    else if (key == "lambda") cfg.lambda = to_double(value, key);
    else if (key == "r") cfg.r = to_double(value, key);
    else if (key == "grid") parse_grid_spec(cfg, value);
    else if (key == "ceiling") cfg.ceiling = to_double(value, key);
    else if (key == "n_agents") cfg.n_agents = static_cast<int>(to_double(value, key));
    else if (key == "horizon") cfg.horizon = to_double(value, key);
    else if (key == "replications") cfg.replications = static_cast<int>(to_double(value, key));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(value, key));
    else if (key == "theta_m") { cfg.theta_m = to_double(value, key); cfg.has_profile = true; }
    else if (key == "theta_w") { cfg.theta_w = to_double(value, key); cfg.has_profile = true; }
    else if (key == "accept_mh") cfg.accept_mh = to_double(value, key);
    else if (key == "accept_ml") cfg.accept_ml = to_double(value, key);
    else if (key == "accept_wh") cfg.accept_wh = to_double(value, key);
    else if (key == "accept_wl") cfg.accept_wl = to_double(value, key);
    else if (key == "format") cfg.format = value;
    else if (key == "precision") cfg.precision = static_cast<int>(to_double(value, key));
    else if (key == "out") cfg.out_path = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        ordered_json j;
        try {
            in >> j;
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("bad JSON config: ") + ex.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.value().is_string())
                apply_config_entry(cfg, it.key(), it.value().get<std::string>());
            else
                apply_config_entry(cfg, it.key(), it.value().dump());
        }
        return cfg;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return cfg;
}

Economy economy_from(const RunConfig& cfg) {
    if (cfg.has_payoffs == cfg.has_household)
        throw ConfigError("exactly one economy source required: phi_* or household k/alpha/t_l/t_h");
    Economy e;
    if (cfg.has_payoffs) {
        e.phi = cfg.phi;
    } else {
        e.phi = derive_match_payoffs(cobb_douglas_pih(cfg.k, cfg.cd_share), cfg.t_l, cfg.t_h).phi;
    }
    e.cost = CostFunction::affine(cfg.c);
    e.lambda = cfg.lambda;
    e.r = cfg.r;
    e.validate();
    return e;
}

PihEnvironment environment_from(const RunConfig& cfg) {
    if (!cfg.has_household)
        throw ConfigError("this command requires a household economy source (k/alpha/t_l)");
    PihEnvironment env;
    env.pih = cobb_douglas_pih(cfg.k, cfg.cd_share);
    env.t_l = cfg.t_l;
    env.c = cfg.c;
    env.lambda = cfg.lambda;
    env.r = cfg.r;
    return env;
}

namespace {

int cmd_payoffs(const RunConfig& cfg, std::ostream& out) {
    PihEnvironment env = environment_from(cfg);
    DerivedPayoffs d = derive_match_payoffs(env.pih, env.t_l, cfg.t_h);
    DeltaPair dd = deltas(d.phi);
    int p = cfg.precision;
    if (cfg.format == "json") {
        ordered_json j;
        j["t_h"] = cfg.t_h;
        j["phi_hh"] = d.phi.hh;
        j["phi_hl"] = d.phi.hl;
        j["phi_lh"] = d.phi.lh;
        j["phi_ll"] = d.phi.ll;
        j["delta"] = dd.delta;
        j["delta_h"] = dd.delta_h;
        j["ranking_ok"] = !d.ranking_violated;
        out << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        out << "t_h,phi_hh,phi_hl,phi_lh,phi_ll,delta,delta_h,ranking_ok\n";
        out << fmt_full(cfg.t_h) << ',' << fmt_full(d.phi.hh) << ',' << fmt_full(d.phi.hl) << ','
            << fmt_full(d.phi.lh) << ',' << fmt_full(d.phi.ll) << ',' << fmt_full(dd.delta) << ','
            << fmt_full(dd.delta_h) << ',' << (d.ranking_violated ? 0 : 1) << "\n";
    } else {
        out << fmt(d.phi.hh, p) << ' ' << fmt(d.phi.hl, p) << ' ' << fmt(d.phi.lh, p) << ' '
            << fmt(d.phi.ll, p) << "\n";
        out << "delta = " << fmt(dd.delta, p) << "  delta_h = " << fmt(dd.delta_h, p) << "\n";
        out << "ranking: " << (d.ranking_violated ? "VIOLATED" : "ok") << "\n";
    }
    return 0;
}

const char* relation_str(ParetoRelation r) {
    switch (r) {
        case ParetoRelation::FirstDominates: return "dominates";
        case ParetoRelation::SecondDominates: return "dominated";
        default: return "incomparable";
    }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    Economy e = economy_from(cfg);
    EquilibriumSet set = enumerate_equilibria(e);
    int p = cfg.precision;
    if (cfg.format == "json") {
        ordered_json j;
        j["equilibria"] = ordered_json::array();
        for (const auto& r : set.equilibria) {
            ordered_json je;
            je["kind"] = to_string(r.kind);
            je["theta_m"] = r.theta_m;
            je["theta_w"] = r.theta_w;
            je["knife_edge"] = r.knife_edge;
            je["on_path_note"] = r.on_path_note;
            ordered_json ics = ordered_json::array();
            for (const auto& ic : r.ic) {
                ordered_json ji;
                ji["name"] = ic.name;
                ji["slack"] = ic.slack;
                ji["on_path"] = ic.on_path;
                ics.push_back(ji);
            }
            je["ic"] = ics;
            j["equilibria"].push_back(je);
        }
        j["pareto"] = ordered_json::array();
        for (const auto& v : set.pareto) {
            ordered_json jv;
            jv["first"] = v.first;
            jv["second"] = v.second;
            jv["relation"] = relation_str(v.relation);
            j["pareto"].push_back(jv);
        }
        out << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.format == "csv") {
        out << "kind,theta_m,theta_w,knife_edge\n";
        for (const auto& r : set.equilibria)
            out << to_string(r.kind) << ',' << fmt_full(r.theta_m) << ',' << fmt_full(r.theta_w)
                << ',' << (r.knife_edge ? 1 : 0) << "\n";
        return 0;
    }
    if (set.equilibria.empty()) {
        out << "no equilibrium found\n";
        return 0;
    }
    for (const auto& r : set.equilibria) {
        out << to_string(r.kind) << "  theta_m=" << fmt(r.theta_m, p)
            << "  theta_w=" << fmt(r.theta_w, p);
        if (r.knife_edge) out << "  [knife-edge]";
        out << "\n";
        for (const auto& ic : r.ic) {
            out << "    " << ic.name << " slack=" << fmt(ic.slack, p)
                << (ic.on_path ? "" : " (off path)") << "\n";
        }
        if (!r.on_path_note.empty()) out << "    note: " << r.on_path_note << "\n";
    }
    for (const auto& v : set.pareto) {
        out << "pareto(" << to_string(set.equilibria[v.first].kind) << ", "
            << to_string(set.equilibria[v.second].kind) << "): " << relation_str(v.relation)
            << "\n";
    }
    return 0;
}

int cmd_thresholds(const RunConfig& cfg, std::ostream& out) {
    PihEnvironment env = environment_from(cfg);
    double ceiling = cfg.ceiling > 0.0 ? cfg.ceiling : 10.0 * env.t_l;
    Thresholds ts = threshold_t_sym(env, ceiling);
    Thresholds tf = threshold_t_fios(env, ceiling);
    int p = cfg.precision;
    if (cfg.format == "json") {
        ordered_json j;
        j["t_sym"] = ts.t_sym;
        j["t_sym_bracket"] = {std::min(ts.sym_delta_branch.lo, ts.sym_phi_branch.lo),
                              std::max(ts.sym_delta_branch.hi, ts.sym_phi_branch.hi)};
        j["t_fios"] = tf.t_fios;
        j["t_fios_binding"] = tf.fios_binding;
        j["tolerance"] = ts.tolerance;
        j["ceiling"] = ceiling;
        out << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.format == "csv") {
        out << "name,value,lo,hi,tolerance\n";
        out << "t_sym," << fmt_full(ts.t_sym) << ','
            << fmt_full(ts.sym_delta_branch.found ? ts.sym_delta_branch.lo : ts.sym_phi_branch.lo)
            << ','
            << fmt_full(ts.sym_delta_branch.found ? ts.sym_delta_branch.hi : ts.sym_phi_branch.hi)
            << ',' << fmt_full(ts.tolerance) << "\n";
        out << "t_fios," << fmt_full(tf.t_fios) << ',' << fmt_full(tf.lo_fios) << ','
            << fmt_full(tf.hi_fios) << ',' << fmt_full(tf.tolerance) << "\n";
        return 0;
    }
    out << "t_sym  = " << fmt(ts.t_sym, p) << "  (tolerance " << fmt_full(ts.tolerance);
    if (ts.sym_delta_branch.found)
        out << ", 1+q*delta crossing at " << fmt(ts.sym_delta_branch.t, p);
    if (ts.sym_phi_branch.found) out << ", Phi crossing at " << fmt(ts.sym_phi_branch.t, p);
    out << ")\n";
    out << "t_fios = " << fmt(tf.t_fios, p) << "  (binding: " << tf.fios_binding << ", tolerance "
        << fmt_full(tf.tolerance) << ", tail certified to " << fmt(ceiling, p) << ")\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    PihEnvironment env = environment_from(cfg);
    if (!cfg.has_grid) throw ConfigError("sweep requires --grid A:STEP:B");
    SweepResult res = sweep(env, make_grid(cfg.grid_lo, cfg.grid_step, cfg.grid_hi));
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& pt : res.points) {
            ordered_json j;
            j["t_h"] = pt.t_h;
            j["phi_hh"] = pt.phi.hh;
            j["phi_hl"] = pt.phi.hl;
            j["phi_lh"] = pt.phi.lh;
            j["phi_ll"] = pt.phi.ll;
            j["delta"] = pt.d.delta;
            j["delta_h"] = pt.d.delta_h;
            j["theta_sym"] = pt.theta_sym;
            j["theta_lb"] = pt.theta_lb;
            j["theta_ub"] = pt.theta_ub;
            j["phi_constraint"] = pt.phi_constraint;
            j["one_plus_lr_delta"] = pt.one_plus_lr_delta;
            j["regime"] = pt.derivation_failed ? "failed" : to_string(pt.regime);
            rows.push_back(j);
        }
        out << rows.dump(2) << "\n";
        return 0;
    }
    // table and csv share the csv layout; header row mandatory
    out << "t_h,phi_hh,phi_hl,phi_lh,phi_ll,delta,delta_h,theta_sym,theta_lb,theta_ub,"
           "phi_constraint,one_plus_lr_delta,regime\n";
    for (const auto& pt : res.points) {
        if (pt.derivation_failed) {
            out << fmt_full(pt.t_h) << ",,,,,,,,,,,,failed\n";
            continue;
        }
        out << fmt_full(pt.t_h) << ',' << fmt_full(pt.phi.hh) << ',' << fmt_full(pt.phi.hl) << ','
            << fmt_full(pt.phi.lh) << ',' << fmt_full(pt.phi.ll) << ',' << fmt_full(pt.d.delta)
            << ',' << fmt_full(pt.d.delta_h) << ',' << fmt_full(pt.theta_sym) << ','
            << fmt_full(pt.theta_lb) << ',' << fmt_full(pt.theta_ub) << ','
            << fmt_full(pt.phi_constraint) << ',' << fmt_full(pt.one_plus_lr_delta) << ','
            << to_string(pt.regime) << "\n";
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    SimConfig sim;
    sim.economy = economy_from(cfg);
    if (cfg.has_profile) {
        sim.profile.theta_m = cfg.theta_m;
        sim.profile.theta_w = cfg.theta_w;
        sim.profile.accept_m = {cfg.accept_mh, cfg.accept_ml};
        sim.profile.accept_w = {cfg.accept_wh, cfg.accept_wl};
    } else {
        EquilibriumSet set = enumerate_equilibria(sim.economy);
        if (set.equilibria.empty())
            throw SolverError("simulate: no equilibrium to simulate; pass theta_m/theta_w");
        sim.profile = set.equilibria.front().profile;
    }
    sim.n_agents = cfg.n_agents;
    sim.horizon = cfg.horizon > 0.0 ? cfg.horizon : 20.0 / sim.economy.r;
    sim.n_replications = cfg.replications;
    sim.seed = cfg.seed;
    SimResult res = simulate_market(sim);

    int p = cfg.precision;
    const char* gname[2] = {"m", "w"};
    const char* sname[2] = {"H", "L"};
    if (cfg.format == "json") {
        ordered_json j;
        j["theta_m"] = sim.profile.theta_m;
        j["theta_w"] = sim.profile.theta_w;
        for (int g = 0; g < 2; ++g)
            for (int s = 0; s < 2; ++s) {
                ordered_json jc;
                const ClassStats& cs = res.value[g][s];
                jc["mean"] = cs.mean;
                jc["se"] = cs.se;
                jc["generations"] = cs.generations;
                jc["censored"] = cs.censored;
                j[std::string("value_") + gname[g] + "_" + sname[s]] = jc;
            }
        j["pool_share_m"] = res.pool_share_m;
        j["pool_share_w"] = res.pool_share_w;
        j["matches_per_unit_time"] = res.matches_per_unit_time;
        j["truncation_bound"] = res.truncation_bound;
        out << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.format == "csv") {
        out << "gender,skill,mean,se,generations,censored\n";
        for (int g = 0; g < 2; ++g)
            for (int s = 0; s < 2; ++s) {
                const ClassStats& cs = res.value[g][s];
                out << gname[g] << ',' << sname[s] << ',' << fmt_full(cs.mean) << ','
                    << fmt_full(cs.se) << ',' << cs.generations << ',' << (cs.censored ? 1 : 0)
                    << "\n";
            }
        return 0;
    }
    out << "profile: theta_m=" << fmt(sim.profile.theta_m, p)
        << " theta_w=" << fmt(sim.profile.theta_w, p) << "\n";
    for (int g = 0; g < 2; ++g)
        for (int s = 0; s < 2; ++s) {
            const ClassStats& cs = res.value[g][s];
            out << "V(" << gname[g] << "," << sname[s] << ") = " << fmt(cs.mean, p) << " +/- "
                << fmt(cs.se, p) << "  (" << cs.generations << " generations"
                << (cs.censored ? ", censored" : "") << ")\n";
        }
    out << "pool high-skill shares: m=" << fmt(res.pool_share_m, p)
        << " w=" << fmt(res.pool_share_w, p) << "\n";
    out << "matches per unit time: " << fmt(res.matches_per_unit_time, p) << "\n";
    out << "horizon truncation bound: " << fmt_full(res.truncation_bound) << "\n";
    return 0;
}

int cmd_verify(const RunConfig&, std::ostream& out) {
    auto checks = golden_suite();
    int failures = 0;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": expected " << fmt_full(c.expected)
            << ", got " << fmt_full(c.actual) << " (tol " << fmt_full(c.tol) << ")\n";
        if (!c.pass) ++failures;
    }
    out << checks.size() - failures << "/" << checks.size() << " reference values reproduced\n";
    return failures == 0 ? 0 : 3;
}

const char* kUsage =
    "usage: mel COMMAND [--config PATH] [--t-h X] [--grid A:STEP:B] [--seed N]\n"
    "           [--out PATH] [--format table|csv|json] [--precision N]\n"
    "commands: payoffs solve sweep thresholds simulate verify\n"
    "config file: flat `key = value` lines (# comments) or JSON (.json)\n";

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        std::string command;
        std::string config_path;
        std::vector<std::pair<std::string, std::string>> overrides;
        for (int i = 1; i < argc; ++i) {
            std::string arg = argv[i];
            auto next = [&](const char* flag) {
                if (i + 1 >= argc) throw ConfigError(std::string(flag) + " needs a value");
                return std::string(argv[++i]);
            };
            if (arg == "--help" || arg == "-h") {
                out << kUsage;
                return 0;
            } else if (arg == "--config") config_path = next("--config");
            else if (arg == "--t-h") overrides.emplace_back("t_h", next("--t-h"));
            else if (arg == "--grid") overrides.emplace_back("grid", next("--grid"));
            else if (arg == "--seed") overrides.emplace_back("seed", next("--seed"));
            else if (arg == "--out") overrides.emplace_back("out", next("--out"));
            else if (arg == "--format") overrides.emplace_back("format", next("--format"));
            else if (arg == "--precision") overrides.emplace_back("precision", next("--precision"));
            else if (!arg.empty() && arg[0] == '-') throw ConfigError("unknown flag " + arg);
            else if (command.empty()) command = arg;
            else throw ConfigError("unexpected argument " + arg);
        }
        if (!config_path.empty()) cfg = load_config_file(config_path);
        for (const auto& [k, v] : overrides) apply_config_entry(cfg, k, v);
        if (!command.empty()) cfg.command = command;
        if (cfg.command.empty()) {
            err << kUsage;
            return 1;
        }
        if (cfg.format != "table" && cfg.format != "csv" && cfg.format != "json")
            throw ConfigError("format must be table, csv or json");

        std::ostringstream buffer;
        std::ostream& sink = cfg.out_path.empty() ? out : static_cast<std::ostream&>(buffer);
        int rc;
        if (cfg.command == "payoffs") rc = cmd_payoffs(cfg, sink);
        else if (cfg.command == "solve") rc = cmd_solve(cfg, sink);
        else if (cfg.command == "thresholds") rc = cmd_thresholds(cfg, sink);
        else if (cfg.command == "sweep") rc = cmd_sweep(cfg, sink);
        else if (cfg.command == "simulate") rc = cmd_simulate(cfg, sink);
        else if (cfg.command == "verify") rc = cmd_verify(cfg, sink);
        else throw ConfigError("unknown command '" + cfg.command + "'");

        if (!cfg.out_path.empty()) {
            std::ofstream f(cfg.out_path);
            if (!f) throw ConfigError("cannot write output file: " + cfg.out_path);
            f << buffer.str();
        }
        return rc;
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const InternalConsistencyError& ex) {
        err << "internal consistency error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        err << "solver error: " << ex.what() << "\n";
        return 2;
    }
}

}  // namespace mel
