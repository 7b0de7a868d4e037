#include "mel/household.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mel/bisect.hpp"

namespace mel {

namespace {

constexpr double kFocTol = 1e-10;   // interior FOCs must vanish within this
constexpr double kBoxMargin = 1e-9; // strict interior margin

struct GameAtWages {
    const PihSpec& spec;
    double t_own, t_other;

    double foc(double e_own, double e_other) const {
        return spec.foc(e_own, e_other, t_own, t_other);
    }
};

// Damped Newton on the 2x2 system F = (foc_m, foc_w), Jacobian by central
// differences of the analytic first partials.
bool newton_interior(const PihSpec& spec, const WagePair& w, double e0m, double e0w,
                     double& out_m, double& out_w) {
    double em = e0m, ew = e0w;
    const double lo = 1e-7, hi = 1.0 - 1e-7;
    for (int it = 0; it < 80; ++it) {
        em = std::clamp(em, lo, hi);
        ew = std::clamp(ew, lo, hi);
        double fm = spec.foc(em, ew, w.t_m, w.t_w);
        double fw = spec.foc(ew, em, w.t_w, w.t_m);
        double err = std::max(std::fabs(fm), std::fabs(fw));
        if (err <= kFocTol) {
            if (em <= kBoxMargin || em >= 1.0 - kBoxMargin || ew <= kBoxMargin ||
                ew >= 1.0 - kBoxMargin)
                return false;
            out_m = em;
            out_w = ew;
            return true;
        }
        double h = 1e-7;
        double j11 = (spec.foc(em + h, ew, w.t_m, w.t_w) - spec.foc(em - h, ew, w.t_m, w.t_w)) / (2 * h);
        double j12 = (spec.foc(em, ew + h, w.t_m, w.t_w) - spec.foc(em, ew - h, w.t_m, w.t_w)) / (2 * h);
        double j21 = (spec.foc(ew, em + h, w.t_w, w.t_m) - spec.foc(ew, em - h, w.t_w, w.t_m)) / (2 * h);
        double j22 = (spec.foc(ew + h, em, w.t_w, w.t_m) - spec.foc(ew - h, em, w.t_w, w.t_m)) / (2 * h);
        // j21: d foc_w / d e_m, j22: d foc_w / d e_w
        double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || std::fabs(det) < 1e-14) return false;
        double dm = (fm * j22 - fw * j12) / det;
        double dw = (fw * j11 - fm * j21) / det;
        double step = 1.0;
        double base = fm * fm + fw * fw;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls) {
            double cm = std::clamp(em - step * dm, lo, hi);
            double cw = std::clamp(ew - step * dw, lo, hi);
            double gm = spec.foc(cm, cw, w.t_m, w.t_w);
            double gw = spec.foc(cw, cm, w.t_w, w.t_m);
            if (std::isfinite(gm) && std::isfinite(gw) && gm * gm + gw * gw < base) {
                em = cm;
                ew = cw;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return false;
    }
    return false;
}

// Symmetric root for equal wages: foc(e, e) = 0 on (0,1).
double symmetric_effort(const PihSpec& spec, double t) {
    auto f = [&](double e) { return spec.foc(e, e, t, t); };
    const double lo = 1e-9, hi = 1.0 - 1e-9;
    double flo = f(lo), fhi = f(hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && flo * fhi > 0.0) {
        // no interior sign change: corner pinned by the gradient direction
        return flo < 0.0 ? 0.0 : 1.0;
    }
    // singular utilities at the edges (log forms): bracket inward
    double a = lo, b = hi;
    if (!std::isfinite(flo)) {
        a = 1e-6;
        while (!std::isfinite(f(a)) && a < 0.4) a *= 4.0;
    }
    if (!std::isfinite(fhi)) {
        b = 1.0 - 1e-6;
        while (!std::isfinite(f(b)) && b > 0.6) b = 1.0 - 4.0 * (1.0 - b);
    }
    return bisect(f, a, b, 1e-13, 300);
}

EffortSolution finish(const PihSpec& spec, const WagePair& w, double em, double ew,
                      EffortRegime regime) {
    EffortSolution s;
    s.e_m = em;
    s.e_w = ew;
    s.regime = regime;
    s.kkt_m = spec.foc(em, ew, w.t_m, w.t_w);
    s.kkt_w = spec.foc(ew, em, w.t_w, w.t_m);
    s.u_m = spec.utility(em, ew, w.t_m, w.t_w);
    s.u_w = spec.utility(ew, em, w.t_w, w.t_m);
    return s;
}

}  // namespace

double PihSpec::utility(double e_own, double e_other, double t_own, double t_other) const {
    double y = t_own * e_own + t_other * e_other;
    double h = 2.0 - e_own - e_other;
    return psi(y, h) - g(1.0 - e_own);
}

double PihSpec::foc(double e_own, double e_other, double t_own, double t_other) const {
    double y = t_own * e_own + t_other * e_other;
    double h = 2.0 - e_own - e_other;
    return psi_y(y, h) * t_own - psi_h(y, h) + g_prime(1.0 - e_own);
}

PihSpec cobb_douglas_pih(double k, double cd_share) {
    if (!(k > 0.0)) throw ConfigError("cobb_douglas_pih: K must be > 0");
    if (!(cd_share > 0.0 && cd_share < 1.0))
        throw ConfigError("cobb_douglas_pih: share must lie in (0,1)");
    PihSpec s;
    s.psi = [k, cd_share](double y, double h) {
        if (y <= 0.0 || h <= 0.0) return -std::numeric_limits<double>::infinity();
        return k * (cd_share * std::log(y) + (1.0 - cd_share) * std::log(h));
    };
    s.psi_y = [k, cd_share](double y, double) { return k * cd_share / y; };
    s.psi_h = [k, cd_share](double, double h) { return k * (1.0 - cd_share) / h; };
    s.g = [](double z) { return 0.5 * z * z; };
    s.g_prime = [](double z) { return z; };
    s.family = "cobb-douglas";
    return s;
}

void WagePair::validate() const {
    if (!is_finite(t_m) || !is_finite(t_w) || t_m < 0.0 || t_w < 0.0)
        throw ConfigError("wages: must be finite and >= 0");
    if (!(t_m > 0.0 || t_w > 0.0)) throw ConfigError("wages: at least one must be > 0");
}

const char* to_string(EffortRegime r) {
    switch (r) {
        case EffortRegime::Interior: return "interior";
        case EffortRegime::CornerSpecialized: return "corner-specialized";
        default: return "boundary-other";
    }
}

EffortSolution solve_nash(const PihSpec& spec, const WagePair& wages) {
    wages.validate();

    if (wages.t_m == wages.t_w) {
        double e = symmetric_effort(spec, wages.t_m);
        EffortRegime reg = (e <= 0.0 || e >= 1.0) ? EffortRegime::BoundaryOther
                                                  : EffortRegime::Interior;
        return finish(spec, wages, e, e, reg);
    }

    // wage-sorted view: hi works weakly more
    bool m_high = wages.t_m > wages.t_w;
    WagePair sorted{std::max(wages.t_m, wages.t_w), std::min(wages.t_m, wages.t_w)};

    double e_sym = symmetric_effort(spec, 0.5 * (sorted.t_m + sorted.t_w));
    std::array<std::pair<double, double>, 10> starts = {{{0.25, 0.25},
                                                         {0.25, 0.5},
                                                         {0.25, 0.75},
                                                         {0.5, 0.25},
                                                         {0.5, 0.5},
                                                         {0.5, 0.75},
                                                         {0.75, 0.25},
                                                         {0.75, 0.5},
                                                         {0.75, 0.75},
                                                         {0.0, 0.0}}};
    starts[9] = {std::clamp(e_sym, 0.05, 0.95), std::clamp(e_sym, 0.05, 0.95)};

    for (const auto& s0 : starts) {
        double em, ew;
        if (newton_interior(spec, sorted, s0.first, s0.second, em, ew)) {
            EffortSolution hi = finish(spec, sorted, em, ew, EffortRegime::Interior);
            if (!m_high) {
                std::swap(hi.e_m, hi.e_w);
                std::swap(hi.kkt_m, hi.kkt_w);
                std::swap(hi.u_m, hi.u_w);
            }
            return hi;
        }
    }

    // No interior solution: complete specialization, high wage to the market.
    double grad_hi = spec.foc(1.0, 0.0, sorted.t_m, sorted.t_w);  // want >= 0
    double grad_lo = spec.foc(0.0, 1.0, sorted.t_w, sorted.t_m);  // want <= 0
    bool kkt_ok = grad_hi >= -kFocTol && grad_lo <= kFocTol;
    EffortSolution hi = finish(spec, sorted, 1.0, 0.0,
                               kkt_ok ? EffortRegime::CornerSpecialized
                                      : EffortRegime::BoundaryOther);
    if (!m_high) {
        std::swap(hi.e_m, hi.e_w);
        std::swap(hi.kkt_m, hi.kkt_w);
        std::swap(hi.u_m, hi.u_w);
    }
    return hi;
}

DerivedPayoffs derive_match_payoffs(const PihSpec& spec, double t_l, double t_h) {
    if (!(t_l > 0.0) || !(t_h >= t_l))
        throw ConfigError("derive_match_payoffs: need t_h >= t_l > 0");
    DerivedPayoffs out;
    out.sol_hh = solve_nash(spec, {t_h, t_h});
    out.sol_ll = solve_nash(spec, {t_l, t_l});
    out.sol_hl = solve_nash(spec, {t_h, t_l});
    out.phi.hh = out.sol_hh.u_m;
    out.phi.ll = out.sol_ll.u_m;
    out.phi.hl = out.sol_hl.u_m;  // high-wage member
    out.phi.lh = out.sol_hl.u_w;  // low-wage member
    out.ranking_violated = !check_ranking(out.phi).ok;
    return out;
}

MixedMatchPayoffs mixed_match_closed_form(double k, double cd_share, double t_h) {
    MixedMatchPayoffs p;
    p.phi_hl = k * cd_share * std::log(t_h);
    p.phi_lh = p.phi_hl - 0.5;  // g(1) = 1/2
    return p;
}

UniquenessReport uniqueness_diagnostic(const PihSpec& spec, const WagePair& wages, int grid_n) {
    UniquenessReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const double step = 1e-6;
    const double lo = 0.02, hi = 0.98;
    for (int i = 0; i < grid_n; ++i) {
        double em = lo + (hi - lo) * i / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            double ew = lo + (hi - lo) * j / (grid_n - 1);
            // Jacobian of the pseudo-gradient (foc_m, foc_w), finite differences
            double j11 = (spec.foc(em + step, ew, wages.t_m, wages.t_w) -
                          spec.foc(em - step, ew, wages.t_m, wages.t_w)) / (2 * step);
            double j12 = (spec.foc(em, ew + step, wages.t_m, wages.t_w) -
                          spec.foc(em, ew - step, wages.t_m, wages.t_w)) / (2 * step);
            double j21 = (spec.foc(ew, em + step, wages.t_w, wages.t_m) -
                          spec.foc(ew, em - step, wages.t_w, wages.t_m)) / (2 * step);
            double j22 = (spec.foc(ew + step, em, wages.t_w, wages.t_m) -
                          spec.foc(ew - step, em, wages.t_w, wages.t_m)) / (2 * step);
            if (!std::isfinite(j11) || !std::isfinite(j12) || !std::isfinite(j21) ||
                !std::isfinite(j22))
                continue;
            // diagonal strict concavity: -(J + J^T)/2 positive definite
            double a = -j11, d = -j22, b = -0.5 * (j12 + j21);
            double tr = a + d;
            double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + b * b));
            double eig_min = 0.5 * tr - disc;
            if (eig_min < rep.min_margin) {
                rep.min_margin = eig_min;
                rep.at_e_m = em;
                rep.at_e_w = ew;
            }
        }
    }
    rep.positive = rep.min_margin > 0.0;
    return rep;
}

}  // namespace mel
