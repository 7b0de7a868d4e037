#pragma once

#include <string>
#include <vector>

#include "mel/equilibrium.hpp"
#include "mel/household.hpp"

namespace mel {

// A household environment indexed by the high-skill wage: payoffs are derived
// from the PIH game at each t_h, the marriage market keeps affine cost
// C(x) = x + c and rates (lambda, r).
struct PihEnvironment {
    PihSpec pih;
    double t_l = 2.0;
    double c = 0.25;  // affine cost intercept
    double lambda = 1.0;
    double r = 1.0;

    PayoffMatrix payoffs_at(double t_h) const;
    Economy economy_at(double t_h) const;
};

PihEnvironment baseline_environment();  // K=8, share 0.6, t_l=2, c=0.25, lambda=r=1

enum class Regime { SymmetricOnly, MultiplicityWindow, FiosOnly, Degenerate };

const char* to_string(Regime r);

struct SweepPoint {
    double t_h = 0.0;
    PayoffMatrix phi;
    DeltaPair d;
    double theta_sym = 0.0;  // unclipped cutoff formulas
    double theta_lb = 0.0;
    double theta_ub = 0.0;
    double phi_constraint = 0.0;       // symmetric L-L margin
    double one_plus_lr_delta = 0.0;    // 1 + q*delta
    Regime regime = Regime::Degenerate;
    bool derivation_failed = false;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool jump_found = false;           // first transition into fios-only
    double theta_sym_before_jump = 0.0;
    double theta_lb_after_jump = 0.0;
};

struct BranchCrossing {
    bool found = false;
    double t = 0.0;
    double lo = 0.0;   // bracketing interval
    double hi = 0.0;
};

struct Thresholds {
    double t_sym = 0.0;
    double t_fios = 0.0;
    BranchCrossing sym_delta_branch;   // where 1 + q*delta crosses zero
    BranchCrossing sym_phi_branch;     // where the L-L margin crosses zero
    double lo_fios = 0.0;              // bracket of the binding fios frontier
    double hi_fios = 0.0;
    double tolerance = 1e-6;           // achieved bisection tolerance in t_h
    std::string fios_binding;          // name of the frontier that pins t_fios
};

// Symmetric L-L acceptance margin at the symmetric profile:
//   Phi(t_h) = lambda * theta * (phi_lh - phi_ll) - r * phi_ll
// with theta the symmetric-cutoff formula clipped to [0,1] (the boundary L-L
// constraint at cutoff 1 when the formula exceeds 1, -r*phi_ll below 0).
double phi_constraint(const PihEnvironment& env, double t_h);
double phi_constraint_from(const PayoffMatrix& phi, double lambda, double r, double c);

// Smallest wage where either 1 + q*delta or Phi first crosses zero; bisected
// to 1e-6 in t_h from the first sign-change bracket on a 512-point log grid.
Thresholds threshold_t_sym(const PihEnvironment& env, double search_ceiling);

// Smallest T such that Phi > 0, 1 + q*delta < 0, theta_lb in (0,1) and the
// FIOS H-L acceptance all hold on [T, ceiling]; the tail is certified on the
// grid up to the finite ceiling only.
Thresholds threshold_t_fios(const PihEnvironment& env, double search_ceiling);

SweepResult sweep(const PihEnvironment& env, const std::vector<double>& t_grid);

std::vector<double> make_grid(double lo, double step, double hi);

struct AdmissibilityReport {
    bool c1 = false;  // delta falls without bound, delta_h grows without bound
    bool c2 = false;  // symmetric cutoff stays away from zero in the tail
    bool c3 = false;  // ranking holds everywhere; FIOS structure holds beyond some T
    double c1_delta_start = 0.0, c1_delta_end = 0.0;
    double c1_delta_h_start = 0.0, c1_delta_h_end = 0.0;
    double c2_min_theta_sym = 0.0;
    double c2_at = 0.0;
    double c3_fios_from = 0.0;  // smallest grid point from which FIOS structure holds
    bool all() const { return c1 && c2 && c3; }
    // finite-horizon evidence, not proof
    std::string caveat = "finite-horizon evidence, not proof";
};

AdmissibilityReport admissibility_check(const PihEnvironment& env, double horizon,
                                        int grid_points = 200);

// Constructive half of the skill-premium comparative static: from a base
// matrix satisfying (i) lambda(phi_hh - phi_ll) < r phi_ll,
// (ii) lambda(phi_hh - phi_ll) < r + lambda, (iii) q*delta_h - c in (0,1),
// builds a higher-skill-premium matrix whose unique equilibrium is FIOS.
PayoffMatrix construct_high_premium(const PayoffMatrix& base, double lambda, double r, double c);

}  // namespace mel
