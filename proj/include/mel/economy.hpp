#pragma once

#include <functional>
#include <string>

#include "mel/common.hpp"

namespace mel {

enum class Skill { H, L };
enum class Gender { M, W };

inline Gender other(Gender g) { return g == Gender::M ? Gender::W : Gender::M; }

// Match utilities, own skill first: hh = phi(H,H), hl = phi(H,L), ...
struct PayoffMatrix {
    double hh = 0.0;
    double hl = 0.0;
    double lh = 0.0;
    double ll = 0.0;

    double at(Skill own, Skill partner) const {
        if (own == Skill::H) return partner == Skill::H ? hh : hl;
        return partner == Skill::H ? lh : ll;
    }
    double max_abs() const;
};

// Verdict for phi_hh >= phi_hl >= phi_lh >= phi_ll with per-inequality slacks.
struct RankingReport {
    bool ok = false;
    double slack_hh_hl = 0.0;  // phi_hh - phi_hl
    double slack_hl_lh = 0.0;  // phi_hl - phi_lh
    double slack_lh_ll = 0.0;  // phi_lh - phi_ll
    bool knife_edge = false;   // some slack inside the tolerance band
};

// delta = phi_hh + phi_ll - phi_hl - phi_lh, delta_h = phi_hl - phi_ll.
// delta <= 0 iff payoffs are submodular.
struct DeltaPair {
    double delta = 0.0;
    double delta_h = 0.0;
};

// Skill-acquisition cost C on [0,1]. Affine: C(x) = x + c (slope normalized
// to 1; non-unit slopes must be pre-scaled by the caller). General case wraps
// increasing, weakly convex evaluators for C and C'.
class CostFunction {
  public:
    static CostFunction affine(double intercept);
    static CostFunction convex(std::function<double(double)> c,
                               std::function<double(double)> dc,
                               std::string label = "general-convex");

    double operator()(double x) const { return is_affine_ ? x + intercept_ : c_(x); }
    double deriv(double x) const { return is_affine_ ? 1.0 : dc_(x); }

    // Inverse on [C(0), C(1)]; below C(0) returns 0 (the convention used by
    // the interior-asymmetric root system). Above C(1) returns a value > 1.
    double inverse(double y) const;

    bool is_affine() const { return is_affine_; }
    double intercept() const { return (*this)(0.0); }  // C(0)
    const std::string& label() const { return label_; }

    // Sanity checks: C(0) >= 0, strictly increasing, C' non-decreasing
    // (general case checked on a grid). Throws ConfigError on violation.
    void validate() const;

  private:
    CostFunction() = default;
    bool is_affine_ = true;
    double intercept_ = 0.0;
    std::function<double(double)> c_;
    std::function<double(double)> dc_;
    std::string label_ = "affine";
};

struct Economy {
    PayoffMatrix phi;
    CostFunction cost = CostFunction::affine(0.0);
    double lambda = 1.0;  // meeting rate, > 0
    double r = 1.0;       // discount rate, > 0

    void validate() const;
};

// Acceptance probabilities for meeting a LOW-skill partner, by own skill.
// High-skill partners are always accepted.
struct AcceptancePair {
    double h = 1.0;
    double l = 1.0;
    double at(Skill own) const { return own == Skill::H ? h : l; }
};

// Cutoff strategies plus acceptance: types tau <= theta_g invest.
struct StrategyProfile {
    double theta_m = 0.0;
    double theta_w = 0.0;
    AcceptancePair accept_m;
    AcceptancePair accept_w;

    double theta(Gender g) const { return g == Gender::M ? theta_m : theta_w; }
    const AcceptancePair& accept(Gender g) const { return g == Gender::M ? accept_m : accept_w; }
    void validate() const;
};

RankingReport check_ranking(const PayoffMatrix& p);
DeltaPair deltas(const PayoffMatrix& p);

// lambda / (r + lambda), in (0,1).
double discount_factor(const Economy& e);

}  // namespace mel
