#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mel/economy.hpp"
#include "mel/values.hpp"

namespace mel {

enum class EqKind { SymmetricAM, FIOS, NIOS, InteriorAsymmetricAM, PAM, None };

const char* to_string(EqKind k);

// Named incentive-constraint slack; slack >= 0 means satisfied.
struct IcResidual {
    std::string name;   // AM:Invest-m, AM:Invest-w, AM:H-L, AM:L-L, PAM:Invest, PAM:Assortativity
    double slack = 0.0;
    bool on_path = true;  // false: constraint is vacuous on path, reported only
};

// One equilibrium (or a None verdict). Canonical orientation: the weakly
// larger cutoff sits on gender m; mirror images are implied, never listed.
struct EquilibriumReport {
    EqKind kind = EqKind::None;
    double theta_m = 0.0;
    double theta_w = 0.0;
    StrategyProfile profile;           // acceptance entries include off-path fills
    bool accept_off_path[4] = {false, false, false, false};  // m.h, m.l, w.h, w.l
    std::vector<IcResidual> ic;
    bool knife_edge = false;
    std::string on_path_note;          // which acceptance constraints are vacuous
    std::string none_reason;           // violated constraint when kind == None

    bool found() const { return kind != EqKind::None; }
};

enum class ParetoRelation { Incomparable, FirstDominates, SecondDominates };

struct ParetoVerdict {
    std::size_t first = 0;
    std::size_t second = 0;
    ParetoRelation relation = ParetoRelation::Incomparable;
};

struct EquilibriumSet {
    std::vector<EquilibriumReport> equilibria;
    std::vector<ParetoVerdict> pareto;

    bool contains(EqKind k) const;
    const EquilibriumReport* find(EqKind k) const;
};

// ---- closed-form solvers (affine cost unless noted) ------------------------

// Symmetric all-match equilibrium via theta_sym = (q*delta_h - c)/(1 - q*delta)
// with q = lambda/(r+lambda); out-of-range formulas classify through the signs
// of G(x) = q[x*delta + delta_h] - C(x) at the boundaries. Verifies the on-path
// acceptance constraints lambda*theta*(phi_hh-phi_hl) <= r*phi_hl and
// lambda*theta*(phi_lh-phi_ll) <= r*phi_ll.
EquilibriumReport solve_symmetric_am(const Economy& e);

// Full investment from one side: (1, theta_lb), theta_lb = q(delta+delta_h)-c.
// Case A (formula in (0,1)): the partially-investing side is indifferent by
// construction; checks the fully-investing side's boundary IC and the on-path
// H-L acceptance; L-L is vacuous on path. Case B (formula < 0): profile (1,0)
// with boundary ICs q(delta+delta_h) <= c and q*delta_h >= 1+c.
EquilibriumReport solve_fios(const Economy& e);

// No investment from one side, canonical (theta_ub, 0), theta_ub = q*delta_h-c.
// Interior: zero-side IC (q*delta_h - c)(1 + q*delta) <= 0 plus the L-L
// acceptance lambda*theta_ub*(phi_lh-phi_ll) <= r*phi_ll. Boundary
// (theta_ub >= 1): collapses to the (1,0) profile; requires q*delta_h >= 1+c,
// q(delta+delta_h) <= c and lambda*(phi_lh-phi_ll) <= r*phi_ll.
EquilibriumReport solve_nios(const Economy& e);

// Assortative equilibrium (general convex cost allowed). Fast-fails when
// lambda(phi_hh-phi_hl) < r*phi_hl; otherwise root-finds the symmetric
// indifference and verifies assortativity at each root.
EquilibriumReport solve_pam(const Economy& e);
std::vector<EquilibriumReport> pam_candidates(const Economy& e);

// Interior asymmetric all-match pairs from the root system
// f(x) = a*Cinv(a x + b) + b - C(x), a = q*delta, b = q*delta_h. Requires an
// invertible cost on its range. Affine costs yield no asymmetric interior
// pair (the linear system forces symmetry); supermodular payoffs none either.
std::vector<EquilibriumReport> solve_interior_asymmetric(const Economy& e);

// Sufficient condition for at most one root of f below x*: a^2 > C'(1) C'(Cinv(b)).
bool interior_asym_monotone_bound(const Economy& e);

// Runs every solver, assembles the canonical-orientation set, deduplicates the
// shared (1,0) boundary profile, computes pairwise Pareto verdicts, and checks
// the structural exclusions (affine submodular non-knife-edge inputs): at most
// one symmetric, never FIOS and NIOS together, NIOS implies a symmetric.
// Throws InternalConsistencyError when an exclusion fails.
EquilibriumSet enumerate_equilibria(const Economy& e);

// ---- best responses and the brute-force oracle ------------------------------

// Acceptance best-response set {0}, {1} or [0,1] per (gender, skill).
enum class AcceptBr { RejectLow, AcceptLow, Any };

struct BestResponse {
    double cutoff_m = 0.0;
    double cutoff_w = 0.0;
    AcceptBr accept_m_h = AcceptBr::Any;
    AcceptBr accept_m_l = AcceptBr::Any;
    AcceptBr accept_w_h = AcceptBr::Any;
    AcceptBr accept_w_l = AcceptBr::Any;
};

// h^g(tau) = V(H,.) - V(L,.) - C(tau) evaluated at the profile's acceptance;
// unique best-response cutoff per gender plus acceptance best-response sets
// from the monotone-in-alpha structure of value_general.
BestResponse best_response_map(const Economy& e, const StrategyProfile& profile);

bool accept_br_contains(AcceptBr br, double alpha);

struct FixedPointCluster {
    double theta_m = 0.0;   // representative (smallest best-response gap)
    double theta_w = 0.0;
    double gap = 0.0;       // max |B - theta| at the representative
    bool pam_pattern = false;
    bool knife_edge = false;
    int cells = 0;          // retained grid cells in the cluster
};

// Brute-force oracle: scans the (theta_m, theta_w) grid crossed with the 16
// corner acceptance profiles, keeps profiles whose best-response image
// contains them within one grid cell, restricts candidates to on-path match
// patterns that are all-match or assortative (the taxonomy the closed forms
// classify; everyone matched eventually), and clusters the retained cells.
std::vector<FixedPointCluster> fixed_point_search(const Economy& e, int grid_n);

// Mirror-insensitive cutoff distance in grid cells.
double cluster_distance_cells(const FixedPointCluster& c, double theta_m, double theta_w,
                              int grid_n);

// Whether the oracle's retention test holds in the 3x3 cell neighbourhood of
// the grid point nearest to (theta_m, theta_w), in either orientation. Used
// to recognise equilibria that the grid cannot separate from a neighbouring
// one (their retained cells merge into a single cluster).
bool oracle_retains_near(const Economy& e, double theta_m, double theta_w, int grid_n);

}  // namespace mel
