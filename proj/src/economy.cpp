#include "mel/economy.hpp"

#include <algorithm>
#include <cmath>

#include "mel/bisect.hpp"

namespace mel {

double PayoffMatrix::max_abs() const {
    return std::max({std::fabs(hh), std::fabs(hl), std::fabs(lh), std::fabs(ll)});
}

CostFunction CostFunction::affine(double intercept) {
    CostFunction f;
    f.is_affine_ = true;
    f.intercept_ = intercept;
    f.label_ = "affine";
    return f;
}

CostFunction CostFunction::convex(std::function<double(double)> c,
                                  std::function<double(double)> dc, std::string label) {
    CostFunction f;
    f.is_affine_ = false;
    f.c_ = std::move(c);
    f.dc_ = std::move(dc);
    f.label_ = std::move(label);
    return f;
}

double CostFunction::inverse(double y) const {
    if (is_affine_) return std::max(0.0, y - intercept_);
    double c0 = (*this)(0.0);
    double c1 = (*this)(1.0);
    if (y <= c0) return 0.0;
    if (y >= c1) {
        // extrapolate linearly past 1 so callers can detect out-of-range
        double d = deriv(1.0);
        return d > 0.0 ? 1.0 + (y - c1) / d : 1.0 + (y - c1);
    }
    return bisect([&](double x) { return (*this)(x) - y; }, 0.0, 1.0, 1e-14, 300);
}

void CostFunction::validate() const {
    if ((*this)(0.0) < 0.0) throw ConfigError("cost: C(0) must be >= 0");
    const int n = 64;
    double prev_c = (*this)(0.0);
    double prev_d = deriv(0.0);
    if (!is_finite(prev_c) || !is_finite(prev_d))
        throw ConfigError("cost: non-finite evaluation");
    for (int i = 1; i <= n; ++i) {
        double x = static_cast<double>(i) / n;
        double cx = (*this)(x);
        double dx = deriv(x);
        if (!is_finite(cx) || !is_finite(dx)) throw ConfigError("cost: non-finite evaluation");
        if (cx <= prev_c) throw ConfigError("cost: C must be strictly increasing on [0,1]");
        if (dx < prev_d - 1e-9) throw ConfigError("cost: C' must be non-decreasing on [0,1]");
        prev_c = cx;
        prev_d = dx;
    }
}

void Economy::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("economy: lambda must be > 0");
    if (!(r > 0.0)) throw ConfigError("economy: r must be > 0");
    if (!is_finite(phi.hh) || !is_finite(phi.hl) || !is_finite(phi.lh) || !is_finite(phi.ll))
        throw ConfigError("economy: payoff entries must be finite");
    cost.validate();
}

void StrategyProfile::validate() const {
    auto in01 = [](double x) { return is_finite(x) && x >= 0.0 && x <= 1.0; };
    if (!in01(theta_m) || !in01(theta_w) || !in01(accept_m.h) || !in01(accept_m.l) ||
        !in01(accept_w.h) || !in01(accept_w.l))
        throw ConfigError("profile: cutoffs and acceptance probabilities must lie in [0,1]");
}

RankingReport check_ranking(const PayoffMatrix& p) {
    RankingReport rep;
    rep.slack_hh_hl = p.hh - p.hl;
    rep.slack_hl_lh = p.hl - p.lh;
    rep.slack_lh_ll = p.lh - p.ll;
    rep.ok = rep.slack_hh_hl >= 0.0 && rep.slack_hl_lh >= 0.0 && rep.slack_lh_ll >= 0.0;
    double scale = p.max_abs();
    rep.knife_edge = knife_edge_band(rep.slack_hh_hl, scale) ||
                     knife_edge_band(rep.slack_hl_lh, scale) ||
                     knife_edge_band(rep.slack_lh_ll, scale);
    return rep;
}

DeltaPair deltas(const PayoffMatrix& p) {
    return {p.hh + p.ll - p.hl - p.lh, p.hl - p.ll};
}

double discount_factor(const Economy& e) {
    return e.lambda / (e.r + e.lambda);
}

}  // namespace mel
