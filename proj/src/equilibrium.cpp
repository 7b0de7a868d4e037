#include "mel/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>

#include "mel/bisect.hpp"
#include "mel/parallel.hpp"

namespace mel {

namespace {

// Reduced all-match acceptance slacks at the opposite side's cutoff tb:
//   V_A(H; tb) <= phi_hl  <=>  lambda tb (phi_hh - phi_hl) <= r phi_hl
//   V_A(L; tb) <= phi_ll  <=>  lambda tb (phi_lh - phi_ll) <= r phi_ll
double am_hl_slack(const Economy& e, double tb) {
    return e.r * e.phi.hl - e.lambda * tb * (e.phi.hh - e.phi.hl);
}
double am_ll_slack(const Economy& e, double tb) {
    return e.r * e.phi.ll - e.lambda * tb * (e.phi.lh - e.phi.ll);
}

double econ_scale(const Economy& e) {
    return std::max(1.0, e.phi.max_abs() * std::max(1.0, std::max(e.lambda, e.r)));
}

// Best-response cutoff for a value gap: 0 if the gap cannot cover C(0),
// 1 if it covers C(1), else the indifferent type.
double cutoff_br(const CostFunction& cost, double gap) {
    if (gap <= cost(0.0)) return 0.0;
    if (gap >= cost(1.0)) return 1.0;
    return std::clamp(cost.inverse(gap), 0.0, 1.0);
}

struct AmFill {
    AcceptancePair m, w;
    bool off[4] = {false, false, false, false};  // m.h, m.l, w.h, w.l
};

// IC-AL fills for an all-match profile: on-path entries are 1; entries whose
// low-encounter never happens on path are set by the IC-AL sign at the
// class's all-match value and flagged off_path.
AmFill am_fill(const Economy& e, double tm, double tw) {
    AmFill f;
    double scale = econ_scale(e);
    auto fill = [&](Skill s, double own_theta, double opp_theta, bool& off) {
        bool class_present = (s == Skill::H) ? own_theta > 0.0 : own_theta < 1.0;
        bool low_partner_exists = opp_theta < 1.0;
        bool on_path = class_present && low_partner_exists;
        double v = value_am(e, s, opp_theta);
        double limit = (s == Skill::H) ? e.phi.hl : e.phi.ll;
        double a = (v <= limit + ic_tol(scale)) ? 1.0 : 0.0;
        off = !on_path;
        return on_path ? 1.0 : a;
    };
    f.m.h = fill(Skill::H, tm, tw, f.off[0]);
    f.m.l = fill(Skill::L, tm, tw, f.off[1]);
    f.w.h = fill(Skill::H, tw, tm, f.off[2]);
    f.w.l = fill(Skill::L, tw, tm, f.off[3]);
    return f;
}

EquilibriumReport none_report(const std::string& reason, bool knife = false) {
    EquilibriumReport rep;
    rep.kind = EqKind::None;
    rep.none_reason = reason;
    rep.knife_edge = knife;
    return rep;
}

void attach_am_profile(EquilibriumReport& rep, const Economy& e) {
    AmFill f = am_fill(e, rep.theta_m, rep.theta_w);
    rep.profile.theta_m = rep.theta_m;
    rep.profile.theta_w = rep.theta_w;
    rep.profile.accept_m = f.m;
    rep.profile.accept_w = f.w;
    for (int i = 0; i < 4; ++i) rep.accept_off_path[i] = f.off[i];
}

// Whether a decisive slack sits inside the knife-edge band.
struct KnifeTracker {
    double scale;
    bool hit = false;
    bool require(double slack) {  // slack must be >= 0; returns pass/fail
        if (knife_edge_band(slack, scale)) hit = true;
        return slack >= -ic_tol(scale);
    }
};

}  // namespace

const char* to_string(EqKind k) {
    switch (k) {
        case EqKind::SymmetricAM: return "SymmetricAM";
        case EqKind::FIOS: return "FIOS";
        case EqKind::NIOS: return "NIOS";
        case EqKind::InteriorAsymmetricAM: return "InteriorAsymmetricAM";
        case EqKind::PAM: return "PAM";
        default: return "None";
    }
}

bool EquilibriumSet::contains(EqKind k) const { return find(k) != nullptr; }

const EquilibriumReport* EquilibriumSet::find(EqKind k) const {
    for (const auto& r : equilibria)
        if (r.kind == k) return &r;
    return nullptr;
}

// ---- symmetric AM -----------------------------------------------------------

namespace {

// All symmetric all-match equilibria. G(x) = q[x*delta + delta_h] - C(x) is
// affine; decreasing (the submodular and mildly supermodular cases) gives at
// most one branch, increasing (q*delta > 1) can support several.
std::vector<EquilibriumReport> symmetric_candidates(const Economy& e) {
    std::vector<EquilibriumReport> out;
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    double c = e.cost.intercept();
    double scale = econ_scale(e);
    double g0 = q * d.delta_h - c;
    double g1 = q * (d.delta + d.delta_h) - (1.0 + c);
    double denom = 1.0 - q * d.delta;

    auto try_interior = [&]() {
        if (std::fabs(denom) <= ic_tol(1.0)) return;
        double theta = g0 / denom;
        if (!(theta > 0.0 && theta < 1.0)) return;
        KnifeTracker kt{scale};
        bool ok = kt.require(am_hl_slack(e, theta)) & kt.require(am_ll_slack(e, theta));
        if (knife_edge_band(theta, 1.0) || knife_edge_band(theta - 1.0, 1.0)) kt.hit = true;
        if (!ok) return;
        EquilibriumReport rep;
        rep.kind = EqKind::SymmetricAM;
        rep.theta_m = rep.theta_w = theta;
        rep.ic.push_back({"AM:Invest-m", 0.0, true});
        rep.ic.push_back({"AM:Invest-w", 0.0, true});
        rep.ic.push_back({"AM:H-L", am_hl_slack(e, theta), true});
        rep.ic.push_back({"AM:L-L", am_ll_slack(e, theta), true});
        rep.knife_edge = kt.hit;
        attach_am_profile(rep, e);
        out.push_back(rep);
    };
    auto try_zero = [&]() {
        KnifeTracker kt{scale};
        if (!kt.require(-g0)) return;  // G(0) <= 0: nobody wants to invest
        EquilibriumReport rep;
        rep.kind = EqKind::SymmetricAM;
        rep.theta_m = rep.theta_w = 0.0;
        rep.ic.push_back({"AM:Invest-m", -g0, true});
        rep.ic.push_back({"AM:Invest-w", -g0, true});
        rep.ic.push_back({"AM:H-L", am_hl_slack(e, 0.0), false});
        rep.ic.push_back({"AM:L-L", am_ll_slack(e, 0.0), true});
        rep.on_path_note = "H-L vacuous on path (no high types)";
        rep.knife_edge = kt.hit;
        attach_am_profile(rep, e);
        out.push_back(rep);
    };
    auto try_one = [&]() {
        KnifeTracker kt{scale};
        bool ok = kt.require(g1);  // G(1) >= 0: everyone invests
        // all-accept consistency for the investing population facing a
        // hypothetical low partner; its failure is the assortative branch
        ok = ok & kt.require(am_hl_slack(e, 1.0));
        if (!ok) return;
        EquilibriumReport rep;
        rep.kind = EqKind::SymmetricAM;
        rep.theta_m = rep.theta_w = 1.0;
        rep.ic.push_back({"AM:Invest-m", g1, true});
        rep.ic.push_back({"AM:Invest-w", g1, true});
        rep.ic.push_back({"AM:H-L", am_hl_slack(e, 1.0), false});
        rep.ic.push_back({"AM:L-L", am_ll_slack(e, 1.0), false});
        rep.on_path_note = "L-L vacuous on path (no low types); H-L checked off path";
        rep.knife_edge = kt.hit;
        attach_am_profile(rep, e);
        out.push_back(rep);
    };

    try_zero();
    try_interior();
    try_one();
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.theta_m < b.theta_m; });
    return out;
}

}  // namespace

EquilibriumReport solve_symmetric_am(const Economy& e) {
    if (!e.cost.is_affine())
        throw UnsupportedCostError(
            "solve_symmetric_am: affine cost required (use fixed_point_search for general costs)");
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    auto cands = symmetric_candidates(e);
    if (!cands.empty()) {
        // decreasing G has a unique branch; otherwise report the lowest cutoff
        return cands.front();
    }
    // name the violated acceptance constraint at the clipped cutoff
    double denom = 1.0 - q * d.delta;
    double c = e.cost.intercept();
    double g0 = q * d.delta_h - c;
    double theta = denom > ic_tol(1.0) ? std::clamp(g0 / denom, 0.0, 1.0) : 1.0;
    if (am_ll_slack(e, theta) < 0.0 && theta < 1.0)
        return none_report("AM:L-L violated at the symmetric cutoff");
    return none_report("AM:H-L violated at the symmetric cutoff");
}

// ---- FIOS -------------------------------------------------------------------

EquilibriumReport solve_fios(const Economy& e) {
    if (!e.cost.is_affine())
        throw UnsupportedCostError("solve_fios: affine cost required");
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    double c = e.cost.intercept();
    double scale = econ_scale(e);
    double theta_lb = q * (d.delta + d.delta_h) - c;

    if (theta_lb >= 1.0)
        return none_report("FIOS formula >= 1: profile collapses to the symmetric boundary");

    if (theta_lb > 0.0) {
        // Case A: (1, theta_lb); the partially-investing side is indifferent
        // by construction.
        KnifeTracker kt{scale};
        double invest_full = q * (theta_lb * d.delta + d.delta_h) - (1.0 + c);
        bool ok = kt.require(invest_full);
        double hl = am_hl_slack(e, theta_lb);
        ok = ok & kt.require(hl);
        if (knife_edge_band(theta_lb, 1.0) || knife_edge_band(theta_lb - 1.0, 1.0)) kt.hit = true;
        if (!ok) {
            return none_report(invest_full < 0.0 ? "FIOS full-investment IC fails"
                                                 : "FIOS on-path H-L acceptance fails",
                               kt.hit);
        }
        EquilibriumReport rep;
        rep.kind = EqKind::FIOS;
        rep.theta_m = 1.0;
        rep.theta_w = theta_lb;
        rep.ic.push_back({"AM:Invest-m", invest_full, true});
        rep.ic.push_back({"AM:Invest-w", 0.0, true});
        rep.ic.push_back({"AM:H-L", hl, true});
        rep.ic.push_back({"AM:L-L", am_ll_slack(e, 1.0), false});
        rep.on_path_note = "L-L vacuous on path (low types meet only high partners)";
        rep.knife_edge = kt.hit;
        attach_am_profile(rep, e);
        return rep;
    }

    // Case B: (1, 0) with boundary ICs on both sides.
    KnifeTracker kt{scale};
    double invest_full = q * d.delta_h - (1.0 + c);
    double invest_zero = c - q * (d.delta + d.delta_h);
    bool ok = kt.require(invest_full) & kt.require(invest_zero);
    if (!ok)
        return none_report(invest_full < 0.0 ? "FIOS boundary full-investment IC fails"
                                             : "FIOS boundary zero-investment IC fails",
                           kt.hit);
    EquilibriumReport rep;
    rep.kind = EqKind::FIOS;
    rep.theta_m = 1.0;
    rep.theta_w = 0.0;
    rep.ic.push_back({"AM:Invest-m", invest_full, true});
    rep.ic.push_back({"AM:Invest-w", invest_zero, true});
    rep.ic.push_back({"AM:H-L", am_hl_slack(e, 0.0), true});
    rep.ic.push_back({"AM:L-L", am_ll_slack(e, 1.0), false});
    rep.on_path_note = "only H-L meetings occur on path; remaining acceptance filled off path";
    rep.knife_edge = kt.hit;
    attach_am_profile(rep, e);
    return rep;
}

// ---- NIOS -------------------------------------------------------------------

EquilibriumReport solve_nios(const Economy& e) {
    if (!e.cost.is_affine())
        throw UnsupportedCostError("solve_nios: affine cost required");
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    double c = e.cost.intercept();
    double scale = econ_scale(e);
    double theta_ub = q * d.delta_h - c;

    if (theta_ub <= 0.0)
        return none_report("NIOS formula <= 0: nobody invests on either side");

    if (theta_ub < 1.0) {
        KnifeTracker kt{scale};
        // zero-side IC; rearranges to (q delta_h - c)(1 + q delta) <= 0
        double invest_zero = c - q * (theta_ub * d.delta + d.delta_h);
        double ll = am_ll_slack(e, theta_ub);
        bool ok = kt.require(invest_zero) & kt.require(ll);
        if (knife_edge_band(theta_ub, 1.0) || knife_edge_band(theta_ub - 1.0, 1.0)) kt.hit = true;
        if (!ok)
            return none_report(invest_zero < 0.0 ? "NIOS zero-side investment IC fails"
                                                 : "NIOS L-L acceptance fails",
                               kt.hit);
        EquilibriumReport rep;
        rep.kind = EqKind::NIOS;
        rep.theta_m = theta_ub;  // canonical: the investing side on gender m
        rep.theta_w = 0.0;
        rep.ic.push_back({"AM:Invest-m", 0.0, true});
        rep.ic.push_back({"AM:Invest-w", invest_zero, true});
        rep.ic.push_back({"AM:H-L", am_hl_slack(e, 0.0), true});
        rep.ic.push_back({"AM:L-L", ll, true});
        rep.knife_edge = kt.hit;
        attach_am_profile(rep, e);
        return rep;
    }

    // Boundary branch (formula >= 1): the profile collapses to (1, 0), the
    // same strategy profile as FIOS Case B up to permutation.
    KnifeTracker kt{scale};
    double invest_full = q * d.delta_h - (1.0 + c);
    double invest_zero = c - q * (d.delta + d.delta_h);
    double ll = am_ll_slack(e, 1.0);
    bool ok = kt.require(invest_full) & kt.require(invest_zero) & kt.require(ll);
    if (!ok) {
        std::string why = "NIOS boundary fails:";
        if (invest_full < 0.0) why += " full-investment IC";
        if (invest_zero < 0.0) why += " zero-side IC";
        if (ll < 0.0) why += " L-L acceptance";
        return none_report(why, kt.hit);
    }
    EquilibriumReport rep;
    rep.kind = EqKind::NIOS;
    rep.theta_m = 1.0;
    rep.theta_w = 0.0;
    rep.ic.push_back({"AM:Invest-m", invest_full, true});
    rep.ic.push_back({"AM:Invest-w", invest_zero, true});
    rep.ic.push_back({"AM:H-L", am_hl_slack(e, 0.0), true});
    rep.ic.push_back({"AM:L-L", ll, false});
    rep.on_path_note = "boundary profile coincides with FIOS (1,0) up to permutation";
    rep.knife_edge = kt.hit;
    attach_am_profile(rep, e);
    return rep;
}

// ---- PAM --------------------------------------------------------------------

std::vector<EquilibriumReport> pam_candidates(const Economy& e) {
    std::vector<EquilibriumReport> out;
    double scale = econ_scale(e);
    // non-existence: even an all-high pool cannot justify waiting
    if (e.lambda * (e.phi.hh - e.phi.hl) < e.r * e.phi.hl - ic_tol(scale)) return out;

    auto indiff = [&](double t) {
        return value_pam(e, Skill::H, t) - value_pam(e, Skill::L, t) - e.cost(t);
    };
    auto assort_slack = [&](double t) {
        return e.lambda * t * (e.phi.hh - e.phi.hl) - e.r * e.phi.hl;
    };

    auto push = [&](double theta, double invest_slack, bool boundary) {
        KnifeTracker kt{scale};
        double as = assort_slack(theta);
        bool ok = kt.require(as);
        if (boundary) ok = ok & kt.require(invest_slack);
        if (!ok) return;
        EquilibriumReport rep;
        rep.kind = EqKind::PAM;
        rep.theta_m = rep.theta_w = theta;
        rep.ic.push_back({"PAM:Invest", boundary ? invest_slack : 0.0, true});
        rep.ic.push_back({"PAM:Assortativity", as, theta < 1.0});
        rep.knife_edge = kt.hit;
        rep.profile.theta_m = rep.profile.theta_w = theta;
        rep.profile.accept_m = {0.0, 1.0};
        rep.profile.accept_w = {0.0, 1.0};
        if (theta >= 1.0) {
            rep.accept_off_path[0] = rep.accept_off_path[2] = true;
            rep.on_path_note = "cross-skill meetings never occur on path";
        }
        out.push_back(rep);
    };

    for (double root : scan_roots(indiff, 0.0, 1.0)) {
        if (root <= ic_tol(1.0) || root >= 1.0 - ic_tol(1.0)) continue;
        push(root, 0.0, false);
    }
    double h1 = indiff(1.0);  // boundary invest IC at cutoff 1
    if (h1 >= -ic_tol(scale)) {
        bool dup = false;
        for (const auto& r : out) dup = dup || r.theta_m > 1.0 - 1e-7;
        if (!dup) push(1.0, h1, true);
    }
    return out;
}

EquilibriumReport solve_pam(const Economy& e) {
    double scale = econ_scale(e);
    if (e.lambda * (e.phi.hh - e.phi.hl) < e.r * e.phi.hl - ic_tol(scale))
        return none_report("no PAM: lambda (phi_hh - phi_hl) < r phi_hl",
                           knife_edge_band(e.lambda * (e.phi.hh - e.phi.hl) - e.r * e.phi.hl,
                                           scale));
    auto cands = pam_candidates(e);
    if (cands.empty())
        return none_report("no PAM root satisfies indifference and assortativity");
    return cands.front();
}

// ---- interior asymmetric ----------------------------------------------------

bool interior_asym_monotone_bound(const Economy& e) {
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    double a = q * d.delta;
    double b = q * d.delta_h;
    double cb = e.cost.inverse(b);
    if (cb > 1.0) cb = 1.0;
    return a * a > e.cost.deriv(1.0) * e.cost.deriv(cb);
}

std::vector<EquilibriumReport> solve_interior_asymmetric(const Economy& e) {
    std::vector<EquilibriumReport> out;
    DeltaPair d = deltas(e.phi);
    double scale = econ_scale(e);
    if (d.delta >= 0.0) return out;  // supermodular: all AM equilibria symmetric
    if (e.cost.is_affine()) return out;  // two linear indifference equations force symmetry
    try {
        e.cost.validate();  // the root system inverts C on its range
    } catch (const ConfigError& ex) {
        throw UnsupportedCostError(std::string("solve_interior_asymmetric: ") + ex.what());
    }

    double q = discount_factor(e);
    double a = q * d.delta;
    double b = q * d.delta_h;
    double c0 = e.cost(0.0);
    if (b <= c0) return out;  // partner cutoff identically zero
    double x_star = std::min(1.0, (c0 - b) / a);

    auto f = [&](double x) {
        double y = a * x + b;
        double partner = y <= c0 ? 0.0 : std::min(1.0, e.cost.inverse(y));
        return a * partner + b - e.cost(x);
    };

    for (double root : scan_roots(f, 0.0, x_star)) {
        double partner = e.cost.inverse(a * root + b);
        if (partner > 1.0) continue;
        if (std::fabs(root - partner) <= 1e-7) continue;  // symmetric root
        double hi = std::max(root, partner);
        double lo = std::min(root, partner);
        if (lo <= ic_tol(1.0) || hi >= 1.0 - ic_tol(1.0)) continue;  // not interior
        bool dup = false;
        for (const auto& r : out)
            dup = dup || (std::fabs(r.theta_m - hi) < 1e-6 && std::fabs(r.theta_w - lo) < 1e-6);
        if (dup) continue;
        KnifeTracker kt{scale};
        double hl = am_hl_slack(e, hi);
        double ll = am_ll_slack(e, hi);
        if (!(kt.require(hl) & kt.require(ll))) continue;
        EquilibriumReport rep;
        rep.kind = EqKind::InteriorAsymmetricAM;
        rep.theta_m = hi;
        rep.theta_w = lo;
        rep.ic.push_back({"AM:Invest-m", 0.0, true});
        rep.ic.push_back({"AM:Invest-w", 0.0, true});
        rep.ic.push_back({"AM:H-L", hl, true});
        rep.ic.push_back({"AM:L-L", ll, true});
        rep.knife_edge = kt.hit;
        if (d.delta + d.delta_h < 0.0)
            rep.on_path_note = "delta + delta_h < 0: payoff ranking violated";
        attach_am_profile(rep, e);
        out.push_back(rep);
    }
    return out;
}

// ---- enumeration ------------------------------------------------------------

namespace {

double type_payoff(const Economy& e, const EquilibriumReport& rep, Gender g, double tau) {
    double opp = (g == Gender::M) ? rep.theta_w : rep.theta_m;
    double own = (g == Gender::M) ? rep.theta_m : rep.theta_w;
    double vh, vl;
    if (rep.kind == EqKind::PAM) {
        vh = value_pam(e, Skill::H, opp);
        vl = value_pam(e, Skill::L, opp);
    } else {
        vh = value_am(e, Skill::H, opp);
        vl = value_am(e, Skill::L, opp);
    }
    return tau <= own ? vh - e.cost(tau) : vl;
}

ParetoVerdict pareto_compare(const Economy& e, const std::vector<EquilibriumReport>& eqs,
                             std::size_t i, std::size_t j) {
    const auto& A = eqs[i];
    const auto& B = eqs[j];
    double tol = ic_tol(econ_scale(e));
    bool prefers_a = false, prefers_b = false;
    for (Gender g : {Gender::M, Gender::W}) {
        double ca = (g == Gender::M) ? A.theta_m : A.theta_w;
        double cb = (g == Gender::M) ? B.theta_m : B.theta_w;
        std::vector<double> probes = {0.0, ca, cb, 1.0};
        std::sort(probes.begin(), probes.end());
        std::vector<double> taus;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            taus.push_back(probes[k]);
            if (k + 1 < probes.size() && probes[k + 1] > probes[k])
                taus.push_back(0.5 * (probes[k] + probes[k + 1]));
        }
        for (double tau : taus) {
            double diff = type_payoff(e, A, g, tau) - type_payoff(e, B, g, tau);
            if (diff > tol) prefers_a = true;
            if (diff < -tol) prefers_b = true;
        }
    }
    ParetoVerdict v{i, j, ParetoRelation::Incomparable};
    if (prefers_a && !prefers_b) v.relation = ParetoRelation::FirstDominates;
    if (prefers_b && !prefers_a) v.relation = ParetoRelation::SecondDominates;
    return v;
}

}  // namespace

EquilibriumSet enumerate_equilibria(const Economy& e) {
    e.validate();
    EquilibriumSet set;
    auto add = [&](const EquilibriumReport& r) {
        if (r.found()) set.equilibria.push_back(r);
    };

    if (e.cost.is_affine()) {
        for (const auto& r : symmetric_candidates(e)) add(r);
        EquilibriumReport fios = solve_fios(e);
        add(fios);
        EquilibriumReport nios = solve_nios(e);
        if (nios.found()) {
            bool same_as_fios = fios.found() && std::fabs(nios.theta_m - fios.theta_m) < 1e-9 &&
                                std::fabs(nios.theta_w - fios.theta_w) < 1e-9;
            if (!same_as_fios) add(nios);  // boundary (1,0) profile kept under its FIOS label
        }
    }
    for (const auto& r : pam_candidates(e)) add(r);
    for (const auto& r : solve_interior_asymmetric(e)) add(r);

    for (std::size_t i = 0; i < set.equilibria.size(); ++i)
        for (std::size_t j = i + 1; j < set.equilibria.size(); ++j)
            set.pareto.push_back(pareto_compare(e, set.equilibria, i, j));

    // Structural exclusions hold for affine costs and submodular payoffs off
    // the knife edges; a violation there is a solver bug.
    DeltaPair d = deltas(e.phi);
    bool in_scope = e.cost.is_affine() && check_ranking(e.phi).ok && d.delta < -ic_tol(1.0);
    for (const auto& r : set.equilibria) in_scope = in_scope && !r.knife_edge;
    if (in_scope) {
        int n_sym = 0;
        for (const auto& r : set.equilibria)
            if (r.kind == EqKind::SymmetricAM) ++n_sym;
        if (n_sym > 1) throw InternalConsistencyError("multiple symmetric AM equilibria");
        if (set.contains(EqKind::FIOS) && set.contains(EqKind::NIOS))
            throw InternalConsistencyError("FIOS and NIOS coexist");
        if (set.contains(EqKind::NIOS) && n_sym == 0)
            throw InternalConsistencyError("NIOS without a symmetric equilibrium");
    }
    return set;
}

// ---- best responses ---------------------------------------------------------

namespace {

AcceptBr accept_br_from_sign(double bc_minus_ad, double scale) {
    if (knife_edge_band(bc_minus_ad, scale)) return AcceptBr::Any;
    return bc_minus_ad > 0.0 ? AcceptBr::AcceptLow : AcceptBr::RejectLow;
}

}  // namespace

bool accept_br_contains(AcceptBr br, double alpha) {
    switch (br) {
        case AcceptBr::Any: return true;
        case AcceptBr::AcceptLow: return alpha >= 1.0;
        default: return alpha <= 0.0;
    }
}

BestResponse best_response_map(const Economy& e, const StrategyProfile& profile) {
    profile.validate();
    BestResponse br;
    double scale = econ_scale(e);
    auto side = [&](Gender g, double& cutoff, AcceptBr& bh, AcceptBr& bl) {
        double tb = profile.theta(other(g));
        const AcceptancePair& own = profile.accept(g);
        const AcceptancePair& opp = profile.accept(other(g));
        double vh = value_general(e, Skill::H, own.h, tb, opp);
        double vl = value_general(e, Skill::L, own.l, tb, opp);
        cutoff = cutoff_br(e.cost, vh - vl);
        // value in own acceptance alpha has the form (a + b alpha)/(c + d alpha)
        {
            double a0 = e.lambda * tb * e.phi.hh;
            double b0 = e.lambda * (1.0 - tb) * e.phi.hl;
            double c0 = e.r + e.lambda * tb;
            double d0 = e.lambda * (1.0 - tb);
            bh = accept_br_from_sign(b0 * c0 - a0 * d0, scale * (e.r + e.lambda) * (1 + scale));
        }
        {
            double a0 = e.lambda * tb * opp.h * e.phi.lh;
            double b0 = e.lambda * (1.0 - tb) * opp.l * e.phi.ll;
            double c0 = e.r + e.lambda * tb * opp.h;
            double d0 = e.lambda * (1.0 - tb) * opp.l;
            bl = accept_br_from_sign(b0 * c0 - a0 * d0, scale * (e.r + e.lambda) * (1 + scale));
        }
    };
    side(Gender::M, br.cutoff_m, br.accept_m_h, br.accept_m_l);
    side(Gender::W, br.cutoff_w, br.accept_w_h, br.accept_w_l);
    return br;
}

// ---- brute-force oracle -----------------------------------------------------

namespace {

struct CellEval {
    bool am = false;
    bool pam = false;
    double am_gap = 0.0;
    double pam_gap = 0.0;
    bool am_knife = false;
    bool pam_knife = false;
};

// The best-response cutoff of one gender depends only on the opposite
// cutoff and is monotone in it, so the image of a grid cell is an interval
// with endpoints at the cell's corners. A cell is retained when that image
// overlaps the cell in both coordinates; a pointwise |B - theta| test would
// skip fixed points where the best response is steeper than the grid.
bool interval_fixed_point(double b_lo, double b_hi, double lo, double hi) {
    if (b_lo > b_hi) std::swap(b_lo, b_hi);
    return b_hi >= lo && b_lo <= hi;
}

CellEval eval_cell(const Economy& e, double tm, double tw, double cell) {
    CellEval ev;
    double scale = econ_scale(e);
    double tol = ic_tol(scale);
    double half = 0.5 * cell * (1.0 + 1e-9);
    double tm_lo = std::max(0.0, tm - half), tm_hi = std::min(1.0, tm + half);
    double tw_lo = std::max(0.0, tw - half), tw_hi = std::min(1.0, tw + half);

    // all-match pattern: every on-path meeting matches
    {
        auto br_at = [&](double tb) {
            return cutoff_br(e.cost, value_am(e, Skill::H, tb) - value_am(e, Skill::L, tb));
        };
        double bm = br_at(tw);
        double bw = br_at(tm);
        double gap = std::max(std::fabs(bm - tm), std::fabs(bw - tw));
        bool keep = interval_fixed_point(br_at(tw_lo), br_at(tw_hi), tm_lo, tm_hi) &&
                    interval_fixed_point(br_at(tm_lo), br_at(tm_hi), tw_lo, tw_hi);
        bool knife = false;
        auto need = [&](double slack) {
            if (std::fabs(slack) <= tol) knife = true;
            keep = keep && slack >= -tol;
        };
        double vmh = value_am(e, Skill::H, tw);
        double vml = value_am(e, Skill::L, tw);
        double vwh = value_am(e, Skill::H, tm);
        double vwl = value_am(e, Skill::L, tm);
        if (tm > 0.0 && tw < 1.0) need(e.phi.hl - vmh);  // men H accept low women
        if (tm < 1.0 && tw < 1.0) need(e.phi.ll - vml);  // men L accept low women
        if (tw > 0.0 && tm < 1.0) need(e.phi.hl - vwh);
        if (tw < 1.0 && tm < 1.0) need(e.phi.ll - vwl);
        if (tm >= 1.0 && tw >= 1.0) need(am_hl_slack(e, 1.0));  // all-high: accept fill must hold
        ev.am = keep;
        ev.am_gap = gap;
        ev.am_knife = knife;
    }

    // assortative pattern: like matches like, cross meetings do not match,
    // every present class matches eventually
    {
        bool classes_ok = ((tm > 0.0) == (tw > 0.0)) && ((tm < 1.0) == (tw < 1.0));
        auto br_at = [&](double tb) {
            return cutoff_br(e.cost, value_pam(e, Skill::H, tb) - value_pam(e, Skill::L, tb));
        };
        double bm = br_at(tw);
        double bw = br_at(tm);
        double gap = std::max(std::fabs(bm - tm), std::fabs(bw - tw));
        bool keep = classes_ok &&
                    interval_fixed_point(br_at(tw_lo), br_at(tw_hi), tm_lo, tm_hi) &&
                    interval_fixed_point(br_at(tm_lo), br_at(tm_hi), tw_lo, tw_hi);
        bool knife = false;
        auto need = [&](double slack) {
            if (std::fabs(slack) <= tol) knife = true;
            keep = keep && slack >= -tol;
        };
        need(value_pam(e, Skill::H, tw) - e.phi.hl);  // waiting beats matching a low partner
        need(value_pam(e, Skill::H, tm) - e.phi.hl);
        ev.pam = keep;
        ev.pam_gap = gap;
        ev.pam_knife = knife;
    }
    return ev;
}

}  // namespace

std::vector<FixedPointCluster> fixed_point_search(const Economy& e, int grid_n) {
    if (grid_n < 16) throw ConfigError("fixed_point_search: grid_n must be >= 16");
    const int n = grid_n;
    const double cell = 1.0 / (n - 1);

    std::vector<std::uint8_t> keep_am(static_cast<std::size_t>(n) * n, 0);
    std::vector<std::uint8_t> keep_pam(static_cast<std::size_t>(n) * n, 0);

    // endpoints snapped exactly so boundary rows classify their class presence
    auto grid_val = [&](int idx) { return idx == n - 1 ? 1.0 : idx * cell; };

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        double tm = grid_val(static_cast<int>(i));
        for (int j = 0; j < n; ++j) {
            double tw = grid_val(j);
            CellEval ev = eval_cell(e, tm, tw, cell);
            if (ev.am) keep_am[i * n + j] = 1;
            if (ev.pam) keep_pam[i * n + j] = 1;
        }
    });

    std::vector<FixedPointCluster> clusters;
    auto flood = [&](std::vector<std::uint8_t>& keep, bool pam) {
        std::vector<std::uint8_t> seen(keep.size(), 0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                std::size_t idx = static_cast<std::size_t>(i) * n + j;
                if (!keep[idx] || seen[idx]) continue;
                FixedPointCluster cl;
                cl.pam_pattern = pam;
                cl.gap = std::numeric_limits<double>::infinity();
                std::deque<std::pair<int, int>> queue{{i, j}};
                seen[idx] = 1;
                while (!queue.empty()) {
                    auto [a, b] = queue.front();
                    queue.pop_front();
                    ++cl.cells;
                    double tm = grid_val(a), tw = grid_val(b);
                    CellEval ev = eval_cell(e, tm, tw, cell);
                    double gap = pam ? ev.pam_gap : ev.am_gap;
                    if (gap < cl.gap) {
                        cl.gap = gap;
                        cl.theta_m = tm;
                        cl.theta_w = tw;
                        cl.knife_edge = pam ? ev.pam_knife : ev.am_knife;
                    }
                    for (int da = -1; da <= 1; ++da) {
                        for (int db = -1; db <= 1; ++db) {
                            int na = a + da, nb = b + db;
                            if (na < 0 || nb < 0 || na >= n || nb >= n) continue;
                            std::size_t nidx = static_cast<std::size_t>(na) * n + nb;
                            if (keep[nidx] && !seen[nidx]) {
                                seen[nidx] = 1;
                                queue.emplace_back(na, nb);
                            }
                        }
                    }
                }
                clusters.push_back(cl);
            }
        }
    };
    flood(keep_am, false);
    flood(keep_pam, true);
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
        if (a.pam_pattern != b.pam_pattern) return !a.pam_pattern;
        if (a.theta_m != b.theta_m) return a.theta_m < b.theta_m;
        return a.theta_w < b.theta_w;
    });
    return clusters;
}

double cluster_distance_cells(const FixedPointCluster& c, double theta_m, double theta_w,
                              int grid_n) {
    double cell = 1.0 / (grid_n - 1);
    double direct = std::max(std::fabs(c.theta_m - theta_m), std::fabs(c.theta_w - theta_w));
    double mirror = std::max(std::fabs(c.theta_m - theta_w), std::fabs(c.theta_w - theta_m));
    return std::min(direct, mirror) / cell;
}

bool oracle_retains_near(const Economy& e, double theta_m, double theta_w, int grid_n) {
    int n = grid_n;
    double cell = 1.0 / (n - 1);
    auto grid_val = [&](int idx) { return idx == n - 1 ? 1.0 : idx * cell; };
    auto probe = [&](double tm, double tw) {
        int i0 = static_cast<int>(std::lround(tm / cell));
        int j0 = static_cast<int>(std::lround(tw / cell));
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                int i = std::clamp(i0 + di, 0, n - 1);
                int j = std::clamp(j0 + dj, 0, n - 1);
                CellEval ev = eval_cell(e, grid_val(i), grid_val(j), cell);
                if (ev.am || ev.pam) return true;
            }
        }
        return false;
    };
    return probe(theta_m, theta_w) || probe(theta_w, theta_m);
}

}  // namespace mel
