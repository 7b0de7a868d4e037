#include "mel/golden.hpp"

#include <cmath>

#include "mel/equilibrium.hpp"
#include "mel/household.hpp"
#include "mel/statics.hpp"

namespace mel {

namespace {

void check(std::vector<GoldenCheck>& out, const std::string& name, double expected, double actual,
           double tol) {
    GoldenCheck c{name, expected, actual, tol, std::fabs(expected - actual) <= tol};
    out.push_back(c);
}

Economy affine_economy(PayoffMatrix phi, double c, double lambda, double r) {
    Economy e;
    e.phi = phi;
    e.cost = CostFunction::affine(c);
    e.lambda = lambda;
    e.r = r;
    return e;
}

}  // namespace

std::vector<GoldenCheck> golden_suite() {
    std::vector<GoldenCheck> out;

    // payoff algebra on the published matrix
    {
        PayoffMatrix p{5.3547, 5.2733, 4.7733, 3.4085};
        DeltaPair d = deltas(p);
        check(out, "deltas: delta at t_h=3 matrix", -1.2834, d.delta, 1e-9);
        check(out, "deltas: delta_h at t_h=3 matrix", 1.8648, d.delta_h, 1e-9);
        check(out, "ranking (7,6,3,1) holds", 1.0,
              check_ranking(PayoffMatrix{7, 6, 3, 1}).ok ? 1.0 : 0.0, 0.0);
        Economy unit = affine_economy(p, 0.25, 1.0, 1.0);
        check(out, "discount factor lambda=r=1", 0.5, discount_factor(unit), 1e-15);
    }

    // two-environment example, affine cost c=2
    {
        Economy e1 = affine_economy(PayoffMatrix{7, 6, 3, 1}, 2.0, 1.0, 1.0);
        EquilibriumSet s1 = enumerate_equilibria(e1);
        check(out, "env(i): unique equilibrium", 1.0, static_cast<double>(s1.equilibria.size()),
              0.0);
        const EquilibriumReport* sym = s1.find(EqKind::SymmetricAM);
        check(out, "env(i): symmetric cutoff 1/3", 1.0 / 3.0, sym ? sym->theta_m : -1.0, 1e-9);

        Economy e2 = affine_economy(PayoffMatrix{11, 10, 6, 1}, 2.0, 1.0, 1.0);
        EquilibriumSet s2 = enumerate_equilibria(e2);
        check(out, "env(ii): unique equilibrium", 1.0, static_cast<double>(s2.equilibria.size()),
              0.0);
        const EquilibriumReport* fios = s2.find(EqKind::FIOS);
        check(out, "env(ii): FIOS cutoff 0.5", 0.5, fios ? fios->theta_w : -1.0, 1e-9);
        // the symmetric candidate 5/6 fails its low-side acceptance
        DeltaPair d2 = deltas(e2.phi);
        double q = discount_factor(e2);
        double theta_formula = (q * d2.delta_h - 2.0) / (1.0 - q * d2.delta);
        check(out, "env(ii): symmetric candidate 5/6", 5.0 / 6.0, theta_formula, 1e-12);
        check(out, "env(ii): symmetric candidate rejected", 0.0,
              solve_symmetric_am(e2).found() ? 1.0 : 0.0, 0.0);
    }

    // household game, K=8, share=0.6, g(z)=z^2/2
    PihSpec pih = cobb_douglas_pih(8.0, 0.6);
    {
        EffortSolution sym = solve_nash(pih, {3.0, 3.0});
        check(out, "household: symmetric effort root", 0.6222, sym.e_m, 5e-4);

        EffortSolution corner = solve_nash(pih, {6.5, 2.0});
        check(out, "household (6.5,2): specialized e_m", 1.0, corner.e_m, 0.0);
        check(out, "household (6.5,2): specialized e_w", 0.0, corner.e_w, 0.0);
        check(out, "household (6.5,2): high-wage corner margin K(2a-1)", 1.6, corner.kkt_m, 1e-9);
        check(out, "household (6.5,2): low-wage corner margin", -0.72, corner.kkt_w, 5e-3);

        EffortSolution knife = solve_nash(pih, {3.0, 2.0});
        check(out, "household (3,2): specialization adopted", 1.0, knife.e_m, 0.0);
        check(out, "household (3,2): adopted flag", 1.0,
              knife.regime == EffortRegime::BoundaryOther ? 1.0 : 0.0, 0.0);
    }

    // derived match payoffs at the two published wages
    {
        DerivedPayoffs p3 = derive_match_payoffs(pih, 2.0, 3.0);
        check(out, "payoffs t_h=3: phi_hh", 5.3547, p3.phi.hh, 5e-4);
        check(out, "payoffs t_h=3: phi_hl", 5.2733, p3.phi.hl, 5e-4);
        check(out, "payoffs t_h=3: phi_lh", 4.7733, p3.phi.lh, 5e-4);
        check(out, "payoffs t_h=3: phi_ll", 3.4085, p3.phi.ll, 5e-4);

        DerivedPayoffs p65 = derive_match_payoffs(pih, 2.0, 6.5);
        check(out, "payoffs t_h=6.5: phi_hh", 9.0660, p65.phi.hh, 5e-4);
        check(out, "payoffs t_h=6.5: phi_hl", 8.9847, p65.phi.hl, 5e-4);
        check(out, "payoffs t_h=6.5: phi_lh", 8.4847, p65.phi.lh, 5e-4);
        check(out, "payoffs t_h=6.5: phi_ll", 3.4085, p65.phi.ll, 5e-4);

        DerivedPayoffs peq = derive_match_payoffs(pih, 2.0, 2.0);
        check(out, "payoffs t_h=t_l: all four coincide", 0.0,
              std::max({std::fabs(peq.phi.hh - peq.phi.ll), std::fabs(peq.phi.hl - peq.phi.ll),
                        std::fabs(peq.phi.lh - peq.phi.ll)}),
              1e-9);

        MixedMatchPayoffs mm3 = mixed_match_closed_form(8.0, 0.6, 3.0);
        check(out, "mixed closed form t_h=3: phi_hl", 5.2733, mm3.phi_hl, 1e-4);
        check(out, "mixed closed form t_h=3: phi_lh", 4.7733, mm3.phi_lh, 1e-4);
        MixedMatchPayoffs mm65 = mixed_match_closed_form(8.0, 0.6, 6.5);
        check(out, "mixed closed form t_h=6.5: phi_hl", 8.9847, mm65.phi_hl, 1e-4);
        check(out, "mixed closed form t_h=6.5: phi_lh", 8.4847, mm65.phi_lh, 1e-4);

        DeltaPair d3 = deltas(p3.phi);
        check(out, "derived deltas t_h=3: delta", -1.2834, d3.delta, 5e-4);
        check(out, "derived deltas t_h=3: delta_h", 1.8648, d3.delta_h, 5e-4);
        DeltaPair d65 = deltas(p65.phi);
        check(out, "derived deltas t_h=6.5: delta", -4.9948, d65.delta, 5e-4);
        check(out, "derived deltas t_h=6.5: delta_h", 5.5762, d65.delta_h, 5e-4);
        check(out, "t_h=6.5: 1 + q*delta", -1.497, 1.0 + 0.5 * d65.delta, 5e-3);
    }

    // equilibria of the derived environments, c=0.25
    PihEnvironment env = baseline_environment();
    {
        Economy e3 = env.economy_at(3.0);
        EquilibriumSet s3 = enumerate_equilibria(e3);
        const EquilibriumReport* sym = s3.find(EqKind::SymmetricAM);
        check(out, "t_h=3: unique equilibrium", 1.0, static_cast<double>(s3.equilibria.size()),
              0.0);
        check(out, "t_h=3: symmetric cutoff", 0.4157, sym ? sym->theta_m : -1.0, 5e-4);
        double ll_lhs = sym ? e3.lambda * sym->theta_m * (e3.phi.lh - e3.phi.ll) : -1.0;
        check(out, "t_h=3: L-L acceptance lhs", 0.5673, ll_lhs, 5e-4);
        check(out, "t_h=3: L-L acceptance rhs", 3.4085, e3.r * e3.phi.ll, 5e-4);

        Economy e65 = env.economy_at(6.5);
        EquilibriumSet s65 = enumerate_equilibria(e65);
        const EquilibriumReport* fios = s65.find(EqKind::FIOS);
        check(out, "t_h=6.5: unique equilibrium", 1.0, static_cast<double>(s65.equilibria.size()),
              0.0);
        check(out, "t_h=6.5: FIOS cutoff", 0.0407, fios ? fios->theta_w : -1.0, 5e-4);
        DeltaPair d65 = deltas(e65.phi);
        double q = discount_factor(e65);
        double theta_hat = (q * d65.delta_h - env.c) / (1.0 - q * d65.delta);
        check(out, "t_h=6.5: symmetric candidate formula", 0.7257, theta_hat, 5e-4);
        check(out, "t_h=6.5: violated L-L lhs", 3.6838,
              e65.lambda * theta_hat * (e65.phi.lh - e65.phi.ll), 5e-4);
        check(out, "t_h=6.5: symmetric candidate rejected", 0.0,
              solve_symmetric_am(e65).found() ? 1.0 : 0.0, 0.0);
    }

    // constraint margins and wage thresholds
    {
        check(out, "Phi at t_h=3", 0.5673 - 3.4085, phi_constraint(env, 3.0), 1e-3);
        check(out, "Phi at t_h=6.5", 3.6838 - 3.4085, phi_constraint(env, 6.5), 1e-3);
        check(out, "Phi at t_l equals -r*phi_ll", -3.4085, phi_constraint(env, env.t_l), 5e-4);

        Thresholds ts = threshold_t_sym(env, 20.0);
        check(out, "threshold t_sym", 3.48, ts.t_sym, 0.02);
        Thresholds tf = threshold_t_fios(env, 20.0);
        check(out, "threshold t_fios", 6.11, tf.t_fios, 0.02);

        // regime labels at the two published wages
        SweepResult sr = sweep(env, {3.0, 6.5});
        check(out, "regime at t_h=3 is symmetric-only", 1.0,
              sr.points[0].regime == Regime::SymmetricOnly ? 1.0 : 0.0, 0.0);
        check(out, "regime at t_h=6.5 is fios-only", 1.0,
              sr.points[1].regime == Regime::FiosOnly ? 1.0 : 0.0, 0.0);

        // cutoffs just around the transition jump
        double q = env.lambda / (env.r + env.lambda);
        PayoffMatrix just_below = env.payoffs_at(tf.t_fios - 1e-3);
        DeltaPair db = deltas(just_below);
        double theta_before = (q * db.delta_h - env.c) / (1.0 - q * db.delta);
        check(out, "jump: symmetric cutoff just below t_fios", 0.72, theta_before, 0.01);
        double theta_lb = q * (db.delta + db.delta_h) - env.c;
        check(out, "jump: FIOS cutoff", 0.04, theta_lb, 5e-3);

        // delta_h' = -delta' = K*share/t_h in the specialized symmetric regime
        double t0 = 3.0, h = 0.01;
        DeltaPair dp = deltas(env.payoffs_at(t0 + h));
        DeltaPair dm = deltas(env.payoffs_at(t0 - h));
        double fd_dh = (dp.delta_h - dm.delta_h) / (2 * h);
        double fd_d = (dp.delta - dm.delta) / (2 * h);
        check(out, "derivative identity: delta_h'", 4.8 / t0, fd_dh, 1e-3 * (4.8 / t0));
        check(out, "derivative identity: -delta'", 4.8 / t0, -fd_d, 1e-3 * (4.8 / t0));
    }

    return out;
}

}  // namespace mel
