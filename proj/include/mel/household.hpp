#pragma once

#include <functional>
#include <string>

#include "mel/economy.hpp"

namespace mel {

// Pooled-income household: members with wages (t_m, t_w) split one unit of
// time each between market work e_i and home time. Shared utility
// psi(y, h) with y = t_m e_m + t_w e_w and h = 2 - e_m - e_w; private home
// cost g(1 - e_i). psi must supply analytic first partials; second partials
// are finite-differenced where needed (uniqueness diagnostic only).
struct PihSpec {
    std::function<double(double, double)> psi;    // psi(y, h)
    std::function<double(double, double)> psi_y;  // d psi / d y
    std::function<double(double, double)> psi_h;  // d psi / d h
    std::function<double(double)> g;              // g(z), z in [0,1]
    std::function<double(double)> g_prime;        // g'(z)
    std::string family = "custom";

    double utility(double e_own, double e_other, double t_own, double t_other) const;
    // dU_i/de_i = psi_y * t_i - psi_h + g'(1 - e_i)
    double foc(double e_own, double e_other, double t_own, double t_other) const;
};

// psi(y,h) = K [ alpha log y + (1-alpha) log h ], g(z) = z^2/2.
PihSpec cobb_douglas_pih(double k, double cd_share);

struct WagePair {
    double t_m = 0.0;
    double t_w = 0.0;
    void validate() const;
};

enum class EffortRegime { Interior, CornerSpecialized, BoundaryOther };

const char* to_string(EffortRegime r);

struct EffortSolution {
    double e_m = 0.0;
    double e_w = 0.0;
    EffortRegime regime = EffortRegime::Interior;
    double kkt_m = 0.0;  // FOC residual (interior) or constrained gradient (corner)
    double kkt_w = 0.0;
    double u_m = 0.0;
    double u_w = 0.0;
};

// Nash equilibrium of the simultaneous-move effort game. Equal wages reduce
// to the symmetric one-dimensional root. Unequal wages: damped Newton on the
// 2x2 FOC system from deterministic multi-starts ({0.25,0.5,0.75}^2 plus the
// symmetric root); when no interior solution exists the household specializes
// completely, (1,0) ordered by wage. The specialization point is classified
// corner-specialized when the full KKT sign conditions hold and boundary-other
// when it is adopted by convention (residuals reported either way).
EffortSolution solve_nash(const PihSpec& spec, const WagePair& wages);

// Match payoffs from the household game at wage pairs (t_h,t_h), (t_h,t_l),
// (t_l,t_l). phi_hl is the high-wage member's payoff in the mixed match,
// phi_lh the low-wage member's. ranking_violated is informational: the
// result is flagged, not rejected.
struct DerivedPayoffs {
    PayoffMatrix phi;
    EffortSolution sol_hh, sol_hl, sol_ll;
    bool ranking_violated = false;
};

DerivedPayoffs derive_match_payoffs(const PihSpec& spec, double t_l, double t_h);

// Closed form for the fully specialized mixed match under Cobb-Douglas:
// phi_hl = K*at*ln(t_h), phi_lh = phi_hl - g(1).
struct MixedMatchPayoffs {
    double phi_hl = 0.0;
    double phi_lh = 0.0;
};
MixedMatchPayoffs mixed_match_closed_form(double k, double cd_share, double t_h);

// Numeric diagonal-strict-concavity diagnostic on a grid over the effort box.
// margin > 0 everywhere is evidence of Nash uniqueness; advisory only.
struct UniquenessReport {
    double min_margin = 0.0;  // smallest eigenvalue of -sym Jacobian over the grid
    double at_e_m = 0.0;
    double at_e_w = 0.0;
    bool positive = false;
};

UniquenessReport uniqueness_diagnostic(const PihSpec& spec, const WagePair& wages,
                                       int grid_n = 21);

}  // namespace mel
