#include "mel/statics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mel/bisect.hpp"
#include "mel/parallel.hpp"

namespace mel {

namespace {

constexpr int kThresholdGrid = 512;
constexpr double kThresholdTol = 1e-6;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

double bisect_crossing(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    bool lo_neg = flo < 0.0;
    for (int it = 0; it < 80 && hi - lo > kThresholdTol; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PayoffMatrix PihEnvironment::payoffs_at(double t_h) const {
    return derive_match_payoffs(pih, t_l, t_h).phi;
}

Economy PihEnvironment::economy_at(double t_h) const {
    Economy e;
    e.phi = payoffs_at(t_h);
    e.cost = CostFunction::affine(c);
    e.lambda = lambda;
    e.r = r;
    return e;
}

PihEnvironment baseline_environment() {
    PihEnvironment env;
    env.pih = cobb_douglas_pih(8.0, 0.6);
    env.t_l = 2.0;
    env.c = 0.25;
    env.lambda = 1.0;
    env.r = 1.0;
    return env;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::SymmetricOnly: return "symmetric-only";
        case Regime::MultiplicityWindow: return "multiplicity-window";
        case Regime::FiosOnly: return "fios-only";
        default: return "degenerate";
    }
}

double phi_constraint_from(const PayoffMatrix& phi, double lambda, double r, double c) {
    DeltaPair d = deltas(phi);
    double q = lambda / (r + lambda);
    double denom = 1.0 - q * d.delta;
    double theta = denom != 0.0 ? (q * d.delta_h - c) / denom : 1.0;
    theta = std::clamp(theta, 0.0, 1.0);
    return lambda * theta * (phi.lh - phi.ll) - r * phi.ll;
}

double phi_constraint(const PihEnvironment& env, double t_h) {
    return phi_constraint_from(env.payoffs_at(t_h), env.lambda, env.r, env.c);
}

namespace {

struct FormulaPoint {
    double t = 0.0;
    DeltaPair d;
    double phi_c = 0.0;
    double one_plus = 0.0;
    double theta_lb = 0.0;
    double hl_slack_at_lb = 0.0;  // FIOS on-path H-L acceptance margin
};

FormulaPoint formulas_at(const PihEnvironment& env, double t_h) {
    FormulaPoint p;
    p.t = t_h;
    PayoffMatrix phi = env.payoffs_at(t_h);
    p.d = deltas(phi);
    double q = env.lambda / (env.r + env.lambda);
    p.phi_c = phi_constraint_from(phi, env.lambda, env.r, env.c);
    p.one_plus = 1.0 + q * p.d.delta;
    p.theta_lb = q * (p.d.delta + p.d.delta_h) - env.c;
    p.hl_slack_at_lb =
        env.r * phi.hl - env.lambda * std::clamp(p.theta_lb, 0.0, 1.0) * (phi.hh - phi.hl);
    return p;
}

}  // namespace

Thresholds threshold_t_sym(const PihEnvironment& env, double search_ceiling) {
    if (!(search_ceiling > env.t_l)) throw ConfigError("threshold_t_sym: ceiling must exceed t_l");
    auto grid = log_grid(env.t_l, search_ceiling, kThresholdGrid);
    std::vector<FormulaPoint> pts(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { pts[i] = formulas_at(env, grid[i]); });

    Thresholds out;
    auto first_crossing = [&](auto value_of) {
        BranchCrossing bc;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            double a = value_of(pts[i - 1]);
            double b = value_of(pts[i]);
            if (a < 0.0 && b >= 0.0) {
                bc.found = true;
                bc.lo = pts[i - 1].t;
                bc.hi = pts[i].t;
                bc.t = bisect_crossing(
                    [&](double t) { return value_of(formulas_at(env, t)); }, bc.lo, bc.hi);
                return bc;
            }
        }
        return bc;
    };
    // both functions start negative at t_l and cross upward
    out.sym_delta_branch = first_crossing([](const FormulaPoint& p) { return -p.one_plus; });
    out.sym_phi_branch = first_crossing([](const FormulaPoint& p) { return p.phi_c; });
    if (!out.sym_delta_branch.found && !out.sym_phi_branch.found) {
        std::ostringstream os;
        os << "threshold_t_sym: no crossing below ceiling " << search_ceiling
           << " (1+q*delta at ceiling = " << pts.back().one_plus
           << ", Phi at ceiling = " << pts.back().phi_c << ")";
        throw SolverError(os.str());
    }
    double best = std::numeric_limits<double>::infinity();
    if (out.sym_delta_branch.found) best = std::min(best, out.sym_delta_branch.t);
    if (out.sym_phi_branch.found) best = std::min(best, out.sym_phi_branch.t);
    out.t_sym = best;
    out.tolerance = kThresholdTol;
    return out;
}

Thresholds threshold_t_fios(const PihEnvironment& env, double search_ceiling) {
    if (!(search_ceiling > env.t_l)) throw ConfigError("threshold_t_fios: ceiling must exceed t_l");
    auto grid = log_grid(env.t_l, search_ceiling, kThresholdGrid);
    std::vector<FormulaPoint> pts(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { pts[i] = formulas_at(env, grid[i]); });

    struct Frontier {
        const char* name;
        std::function<double(const FormulaPoint&)> margin;  // > 0 means the condition holds
    };
    std::vector<Frontier> fronts = {
        {"Phi > 0", [](const FormulaPoint& p) { return p.phi_c; }},
        {"1 + q*delta < 0", [](const FormulaPoint& p) { return -p.one_plus; }},
        {"theta_lb in (0,1)",
         [](const FormulaPoint& p) { return std::min(p.theta_lb, 1.0 - p.theta_lb); }},
        {"FIOS H-L acceptance", [](const FormulaPoint& p) { return p.hl_slack_at_lb; }},
    };

    Thresholds out;
    out.tolerance = kThresholdTol;
    double sup = env.t_l;
    for (const auto& fr : fronts) {
        if (fr.margin(pts.back()) <= 0.0) {
            std::ostringstream os;
            os << "threshold_t_fios: condition '" << fr.name << "' still fails at ceiling "
               << search_ceiling;
            throw SolverError(os.str());
        }
        std::ptrdiff_t last_fail = -1;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (fr.margin(pts[i]) <= 0.0) last_fail = static_cast<std::ptrdiff_t>(i);
        if (last_fail < 0) continue;  // holds everywhere
        double lo = pts[last_fail].t;
        double hi = pts[last_fail + 1].t;
        double crossing = bisect_crossing(
            [&](double t) { return fr.margin(formulas_at(env, t)); }, lo, hi);
        if (crossing > sup) {
            sup = crossing;
            out.fios_binding = fr.name;
            out.lo_fios = lo;
            out.hi_fios = hi;
        }
    }
    out.t_fios = sup;
    // certify the tail on the grid up to the ceiling
    for (const auto& p : pts) {
        if (p.t <= out.t_fios) continue;
        for (const auto& fr : fronts) {
            if (fr.margin(p) <= 0.0) {
                std::ostringstream os;
                os << "threshold_t_fios: tail violated at t_h = " << p.t << " by '" << fr.name
                   << "'";
                throw SolverError(os.str());
            }
        }
    }
    return out;
}

std::vector<double> make_grid(double lo, double step, double hi) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid: expected A:STEP:B with B >= A");
    std::vector<double> g;
    for (double t = lo; t <= hi + 1e-12; t += step) g.push_back(std::min(t, hi));
    if (g.empty() || g.back() < hi - 1e-12) g.push_back(hi);
    return g;
}

SweepResult sweep(const PihEnvironment& env, const std::vector<double>& t_grid) {
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1]) throw ConfigError("sweep: grid must be ascending");
    if (!t_grid.empty() && t_grid.front() < env.t_l - 1e-12)
        throw ConfigError("sweep: grid must start at or above t_l");

    SweepResult res;
    res.points.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        SweepPoint p;
        p.t_h = t_grid[i];
        try {
            p.phi = env.payoffs_at(p.t_h);
        } catch (const std::exception&) {
            p.derivation_failed = true;
            res.points[i] = p;
            return;
        }
        p.d = deltas(p.phi);
        double q = env.lambda / (env.r + env.lambda);
        double denom = 1.0 - q * p.d.delta;
        p.theta_sym = denom != 0.0 ? (q * p.d.delta_h - env.c) / denom
                                   : std::numeric_limits<double>::infinity();
        p.theta_lb = q * (p.d.delta + p.d.delta_h) - env.c;
        p.theta_ub = q * p.d.delta_h - env.c;
        p.phi_constraint = phi_constraint_from(p.phi, env.lambda, env.r, env.c);
        p.one_plus_lr_delta = 1.0 + q * p.d.delta;

        Economy e = env.economy_at(p.t_h);
        EquilibriumSet set = enumerate_equilibria(e);
        if (set.equilibria.size() >= 2) {
            p.regime = Regime::MultiplicityWindow;
        } else if (set.equilibria.size() == 1) {
            const auto& r0 = set.equilibria.front();
            if (r0.kind == EqKind::FIOS)
                p.regime = Regime::FiosOnly;
            else if (r0.kind == EqKind::SymmetricAM && r0.theta_m > 1e-9)
                p.regime = Regime::SymmetricOnly;
            else
                p.regime = Regime::Degenerate;
        } else {
            p.regime = Regime::Degenerate;
        }
        res.points[i] = p;
    });

    // within-run checks: monotone symmetric cutoff under the derivative
    // hypothesis, and the discontinuous jump at the fios transition
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        const auto& a = res.points[i - 1];
        const auto& b = res.points[i];
        if (a.derivation_failed || b.derivation_failed) continue;
        double dt = b.t_h - a.t_h;
        if (dt <= 0.0) continue;
        if (a.regime == Regime::SymmetricOnly && b.regime == Regime::SymmetricOnly) {
            double fd_dh = (b.d.delta_h - a.d.delta_h) / dt;
            double fd_d = (b.d.delta - a.d.delta) / dt;
            if (fd_dh >= std::fabs(fd_d) - 1e-9 && b.theta_sym < a.theta_sym - 1e-9)
                throw InternalConsistencyError(
                    "sweep: symmetric cutoff decreased although delta_h' >= |delta'|");
        }
        if (!res.jump_found && b.regime == Regime::FiosOnly && a.regime != Regime::FiosOnly) {
            res.jump_found = true;
            res.theta_sym_before_jump = std::clamp(a.theta_sym, 0.0, 1.0);
            res.theta_lb_after_jump = b.theta_lb;
        }
    }
    return res;
}

AdmissibilityReport admissibility_check(const PihEnvironment& env, double horizon,
                                        int grid_points) {
    if (!(horizon > env.t_l)) throw ConfigError("admissibility_check: horizon must exceed t_l");
    auto grid = log_grid(env.t_l, horizon, grid_points);
    std::vector<SweepPoint> pts(grid.size());
    std::vector<double> hl_slack(grid.size());
    std::vector<char> ranked(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        SweepPoint p;
        p.t_h = grid[i];
        p.phi = env.payoffs_at(p.t_h);
        p.d = deltas(p.phi);
        double q = env.lambda / (env.r + env.lambda);
        double denom = 1.0 - q * p.d.delta;
        p.theta_sym = denom != 0.0 ? (q * p.d.delta_h - env.c) / denom : 1.0;
        p.theta_lb = q * (p.d.delta + p.d.delta_h) - env.c;
        hl_slack[i] = env.r * p.phi.hl -
                      env.lambda * std::clamp(p.theta_lb, 0.0, 1.0) * (p.phi.hh - p.phi.hl);
        ranked[i] = check_ranking(p.phi).ok ? 1 : 0;
        pts[i] = p;
    });

    AdmissibilityReport rep;

    // (C1): delta monotonically more negative on the tail with growing
    // magnitude; delta_h mirror image
    std::size_t tail0 = pts.size() / 2;
    bool monotone = true;
    for (std::size_t i = tail0 + 1; i < pts.size(); ++i) {
        monotone = monotone && pts[i].d.delta < pts[i - 1].d.delta + 1e-12 &&
                   pts[i].d.delta_h > pts[i - 1].d.delta_h - 1e-12;
    }
    rep.c1_delta_start = pts[tail0].d.delta;
    rep.c1_delta_end = pts.back().d.delta;
    rep.c1_delta_h_start = pts[tail0].d.delta_h;
    rep.c1_delta_h_end = pts.back().d.delta_h;
    rep.c1 = monotone && rep.c1_delta_end < 0.0 &&
             std::fabs(rep.c1_delta_end) >= 1.3 * std::max(std::fabs(rep.c1_delta_start), 1e-9) &&
             rep.c1_delta_h_end > 0.0 &&
             rep.c1_delta_h_end >= 1.3 * std::max(rep.c1_delta_h_start, 1e-9);

    // (C2): liminf of the symmetric cutoff over the tail stays positive
    rep.c2_min_theta_sym = std::numeric_limits<double>::infinity();
    for (std::size_t i = tail0; i < pts.size(); ++i) {
        double th = std::clamp(pts[i].theta_sym, 0.0, 1.0);
        if (th < rep.c2_min_theta_sym) {
            rep.c2_min_theta_sym = th;
            rep.c2_at = pts[i].t_h;
        }
    }
    rep.c2 = rep.c2_min_theta_sym > 0.01;

    // (C3): ranking holds on the whole grid; FIOS structure from some T on
    bool all_ranked = true;
    for (char ok : ranked) all_ranked = all_ranked && ok != 0;
    std::size_t from = pts.size();
    for (std::size_t i = pts.size(); i-- > 0;) {
        bool ok = pts[i].theta_lb > 0.0 && pts[i].theta_lb < 1.0 && hl_slack[i] >= 0.0;
        if (!ok) break;
        from = i;
    }
    rep.c3 = all_ranked && from < pts.size();
    rep.c3_fios_from = from < pts.size() ? pts[from].t_h : horizon;
    return rep;
}

PayoffMatrix construct_high_premium(const PayoffMatrix& base, double lambda, double r, double c) {
    DeltaPair d = deltas(base);
    double q = lambda / (r + lambda);
    if (!(lambda * (base.hh - base.ll) < r * base.ll))
        throw ConfigError("construct_high_premium: needs lambda(phi_hh - phi_ll) < r phi_ll");
    if (!(lambda * (base.hh - base.ll) < r + lambda))
        throw ConfigError("construct_high_premium: needs lambda(phi_hh - phi_ll) < r + lambda");
    double ub = q * d.delta_h - c;
    if (!(ub > 0.0 && ub < 1.0))
        throw ConfigError("construct_high_premium: needs q*delta_h - c in (0,1)");

    double eps = 1e-3 * std::max(1.0, std::fabs(base.hh));
    // scan phi_lh upward until the asymmetric ICs and the symmetric L-L
    // violation all hold, then verify the uniqueness claim end to end
    double a = std::max({base.lh, base.ll + (1.05) / q + eps, base.ll + 1e-3});
    for (int step = 0; step < 400; ++step) {
        double b = a - eps + (c + 0.5) / q;  // targets theta_lb = 1/2
        b = std::max({b, base.hl, base.hh - eps});
        double hh = b + eps;
        PayoffMatrix cand{hh, b, a, base.ll};
        DeltaPair dc = deltas(cand);
        bool lb_ok;
        {
            double lb = q * (dc.delta + dc.delta_h) - c;
            lb_ok = lb > 1e-6 && lb < 1.0 - 1e-6;
        }
        bool asym_feasible = 1.0 + q * dc.delta < -1e-9;
        bool phi_violated = phi_constraint_from(cand, lambda, r, c) > 1e-9;
        bool premium = cand.hh >= base.hh && cand.hl >= base.hl && cand.lh >= base.lh;
        if (lb_ok && asym_feasible && phi_violated && premium && check_ranking(cand).ok) {
            Economy e;
            e.phi = cand;
            e.cost = CostFunction::affine(c);
            e.lambda = lambda;
            e.r = r;
            EquilibriumSet set = enumerate_equilibria(e);
            if (set.equilibria.size() == 1 && set.equilibria.front().kind == EqKind::FIOS &&
                !set.equilibria.front().knife_edge)
                return cand;
        }
        a *= 1.15;
    }
    throw SolverError("construct_high_premium: scan exhausted without a verified construction");
}

}  // namespace mel
