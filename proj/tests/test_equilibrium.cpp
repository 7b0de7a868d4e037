#include <doctest.h>

#include <cmath>

#include "mel/equilibrium.hpp"
#include "mel/household.hpp"
#include "mel/statics.hpp"
#include "support.hpp"

using namespace mel;

namespace {

Economy affine_economy(PayoffMatrix phi, double c, double lambda = 1.0, double r = 1.0) {
    Economy e;
    e.phi = phi;
    e.cost = CostFunction::affine(c);
    e.lambda = lambda;
    e.r = r;
    return e;
}

const Economy kEnv1 = affine_economy({7, 6, 3, 1}, 2.0);
const Economy kEnv2 = affine_economy({11, 10, 6, 1}, 2.0);
// admits a no-investment-from-one-side equilibrium next to the symmetric one
const Economy kNiosEcon = affine_economy({8.05, 8.0, 4.0, 1.9}, 2.5);

}  // namespace

TEST_CASE("symmetric solver on the two-environment example") {
    EquilibriumReport r1 = solve_symmetric_am(kEnv1);
    REQUIRE(r1.kind == EqKind::SymmetricAM);
    CHECK(r1.theta_m == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r1.theta_w == r1.theta_m);
    CHECK_FALSE(r1.knife_edge);

    EquilibriumReport r2 = solve_symmetric_am(kEnv2);
    CHECK(r2.kind == EqKind::None);
    CHECK(r2.none_reason.find("AM:L-L") != std::string::npos);

    Economy convex = kEnv1;
    convex.cost = CostFunction::convex([](double x) { return x * x + 2.0; },
                                       [](double x) { return 2.0 * x; });
    CHECK_THROWS_AS(solve_symmetric_am(convex), UnsupportedCostError);
}

TEST_CASE("symmetric solver on the derived household environments") {
    PihEnvironment env = baseline_environment();
    EquilibriumReport at3 = solve_symmetric_am(env.economy_at(3.0));
    REQUIRE(at3.kind == EqKind::SymmetricAM);
    CHECK(at3.theta_m == doctest::Approx(0.4157).epsilon(2e-3));
    // the low-side acceptance slack is r*phi_ll - lambda*theta*(phi_lh - phi_ll)
    for (const auto& ic : at3.ic)
        if (ic.name == "AM:L-L") CHECK(ic.slack == doctest::Approx(3.4085 - 0.5673).epsilon(1e-3));

    EquilibriumReport at65 = solve_symmetric_am(env.economy_at(6.5));
    CHECK(at65.kind == EqKind::None);
    CHECK(at65.none_reason.find("AM:L-L") != std::string::npos);
}

TEST_CASE("FIOS solver") {
    EquilibriumReport f2 = solve_fios(kEnv2);
    REQUIRE(f2.kind == EqKind::FIOS);
    CHECK(f2.theta_m == 1.0);
    CHECK(f2.theta_w == doctest::Approx(0.5).epsilon(1e-12));
    bool ll_off_path = false;
    for (const auto& ic : f2.ic)
        if (ic.name == "AM:L-L") ll_off_path = !ic.on_path;
    CHECK(ll_off_path);

    PihEnvironment env = baseline_environment();
    EquilibriumReport f65 = solve_fios(env.economy_at(6.5));
    REQUIRE(f65.kind == EqKind::FIOS);
    CHECK(f65.theta_w == doctest::Approx(0.0407).epsilon(2e-2));

    // boundary formula 0 and the full-investment IC fails: q*delta_h = 2.5 < 3
    EquilibriumReport f1 = solve_fios(kEnv1);
    CHECK(f1.kind == EqKind::None);
    CHECK(f1.none_reason.find("full-investment") != std::string::npos);
}

TEST_CASE("NIOS solver") {
    // (q*delta_h - c)(1 + q*delta) = 0.5 * 0.5 > 0
    CHECK(solve_nios(kEnv1).kind == EqKind::None);

    // supermodular boundary: delta = 0 with q*delta_h > c
    Economy flat = affine_economy({10, 9, 8, 7}, 0.2);
    CHECK(deltas(flat.phi).delta == 0.0);
    CHECK(solve_nios(flat).kind == EqKind::None);

    // formula 6.55 >= 1, boundary branch; L-L fails: 32 > 1
    Economy big = affine_economy({10, 9.5, 9, 1}, 0.25, 4.0, 1.0);
    EquilibriumReport rb = solve_nios(big);
    CHECK(rb.kind == EqKind::None);
    CHECK(rb.none_reason.find("L-L") != std::string::npos);

    // a genuine no-investment-from-one-side equilibrium
    EquilibriumReport rn = solve_nios(kNiosEcon);
    REQUIRE(rn.kind == EqKind::NIOS);
    CHECK(rn.theta_m == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(rn.theta_w == 0.0);
}

TEST_CASE("PAM solver") {
    // lambda (phi_hh - phi_hl) = 1 < 6 = r phi_hl
    EquilibriumReport p1 = solve_pam(kEnv1);
    CHECK(p1.kind == EqKind::None);
    CHECK(p1.none_reason.find("lambda") != std::string::npos);

    // the supermodular environment with c = 5: waiting can never beat phi_hl
    Economy foot = affine_economy({15, 8, 2, 1}, 5.0);
    CHECK(solve_pam(foot).kind == EqKind::None);

    // full-investment assortative equilibrium: everyone high, waiting justified
    Economy pam1 = affine_economy({10, 2, 1.5, 1}, 1.0);
    EquilibriumReport pp = solve_pam(pam1);
    REQUIRE(pp.kind == EqKind::PAM);
    CHECK(pp.theta_m == pp.theta_w);
    CHECK(pp.theta_m == doctest::Approx(1.0));
}

TEST_CASE("PAM symmetry and non-existence over random economies") {
    test::EconomyGen gen(43);
    int found = 0;
    for (int i = 0; i < 3000; ++i) {
        Economy e = gen.affine();
        EquilibriumReport p = solve_pam(e);
        if (e.lambda * (e.phi.hh - e.phi.hl) < e.r * e.phi.hl - 1e-9)
            CHECK(p.kind == EqKind::None);
        if (p.found()) {
            ++found;
            CHECK(p.theta_m == p.theta_w);
        }
    }
    CHECK(found > 0);
}

TEST_CASE("interior asymmetric: affine and supermodular cases are empty") {
    test::EconomyGen gen(47);
    for (int i = 0; i < 300; ++i) {
        CHECK(solve_interior_asymmetric(gen.affine()).empty());
    }
    Economy quad = affine_economy({9, 5, 3, 1}, 0.3);
    quad.cost = CostFunction::convex([](double x) { return x * x + 0.3; },
                                     [](double x) { return 2.0 * x; });
    quad.phi = {9, 8.5, 3, 2.8};  // supermodular: delta = 9 + 2.8 - 8.5 - 3 > 0
    CHECK(solve_interior_asymmetric(quad).empty());

    // a cost that is not strictly increasing cannot be inverted on its range
    Economy bad = affine_economy({9, 8, 7, 1}, 0.3);  // submodular so the scan is reached
    bad.cost = CostFunction::convex([](double) { return 0.5; }, [](double) { return 0.0; });
    CHECK_THROWS_AS(solve_interior_asymmetric(bad), UnsupportedCostError);
}

TEST_CASE("interior asymmetric root system under quadratic cost") {
    // constructed so the indifference pair (0.6, 0.2) solves the root system;
    // the payoff ranking necessarily fails (delta + delta_h < 0) and is flagged
    Economy e = affine_economy({2.3, 2.24, 2.66, 1.0}, 0.0);
    e.cost = CostFunction::convex([](double x) { return x * x + 0.1; },
                                  [](double x) { return 2.0 * x; });
    auto found = solve_interior_asymmetric(e);
    REQUIRE(found.size() == 1);
    CHECK(found[0].theta_m == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(found[0].theta_w == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(found[0].on_path_note.find("ranking") != std::string::npos);
    CHECK_FALSE(interior_asym_monotone_bound(e));
}

TEST_CASE("monotone bound rules out interior asymmetric pairs") {
    // quadratic cost with |delta| large enough that f is strictly increasing
    Economy e = affine_economy({9, 8.9, 6.6, 1.9}, 0.0);
    e.cost = CostFunction::convex([](double x) { return x * x + 0.05; },
                                  [](double x) { return 2.0 * x; });
    // a = q*delta = 0.5*(-4.6) = -2.3; a^2 = 5.29 > C'(1) C'(Cinv(b))
    REQUIRE(interior_asym_monotone_bound(e));
    CHECK(solve_interior_asymmetric(e).empty());

    // exhaustive scan agrees: at most one root of f below x*
    double q = discount_factor(e);
    DeltaPair d = deltas(e.phi);
    double a = q * d.delta, b = q * d.delta_h;
    double x_star = std::min(1.0, (e.cost(0.0) - b) / a);
    int sign_changes = 0;
    double prev = a * e.cost.inverse(b) + b - e.cost(0.0);
    for (int i = 1; i <= 20000; ++i) {
        double x = x_star * i / 20000.0;
        double y = a * x + b;
        double partner = y <= e.cost(0.0) ? 0.0 : std::min(1.0, e.cost.inverse(y));
        double fx = a * partner + b - e.cost(x);
        if (prev * fx < 0.0) ++sign_changes;
        prev = fx;
    }
    CHECK(sign_changes <= 1);
}

TEST_CASE("enumerate: the published environments") {
    EquilibriumSet s1 = enumerate_equilibria(kEnv1);
    REQUIRE(s1.equilibria.size() == 1);
    CHECK(s1.equilibria[0].kind == EqKind::SymmetricAM);

    EquilibriumSet s2 = enumerate_equilibria(kEnv2);
    REQUIRE(s2.equilibria.size() == 1);
    CHECK(s2.equilibria[0].kind == EqKind::FIOS);
}

TEST_CASE("enumerate: NIOS coexists with symmetric and is Pareto incomparable") {
    EquilibriumSet set = enumerate_equilibria(kNiosEcon);
    REQUIRE(set.equilibria.size() == 2);
    CHECK(set.contains(EqKind::SymmetricAM));
    CHECK(set.contains(EqKind::NIOS));
    REQUIRE(set.pareto.size() == 1);
    CHECK(set.pareto[0].relation == ParetoRelation::Incomparable);
}

TEST_CASE("enumerate under a general convex cost covers the root-system pairs") {
    Economy e = affine_economy({2.3, 2.24, 2.66, 1.0}, 0.0);
    e.cost = CostFunction::convex([](double x) { return x * x + 0.1; },
                                  [](double x) { return 2.0 * x; });
    EquilibriumSet set = enumerate_equilibria(e);
    REQUIRE(set.contains(EqKind::InteriorAsymmetricAM));
    const EquilibriumReport* r = set.find(EqKind::InteriorAsymmetricAM);
    CHECK(r->theta_m == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(r->theta_w == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("enumerate: strongly supermodular economies can hold several symmetric equilibria") {
    Economy e = affine_economy({15, 8, 2, 1}, 5.0);
    EquilibriumSet set = enumerate_equilibria(e);
    int n_sym = 0;
    for (const auto& r : set.equilibria) {
        CHECK((r.kind == EqKind::SymmetricAM || r.kind == EqKind::PAM));
        if (r.kind == EqKind::SymmetricAM) ++n_sym;
    }
    CHECK(n_sym == 3);  // cutoffs 0, interior, 1 all pass their ICs here
}

TEST_CASE("best responses") {
    // a solved symmetric profile maps to itself
    EquilibriumReport sym = solve_symmetric_am(kEnv1);
    BestResponse br = best_response_map(kEnv1, sym.profile);
    CHECK(br.cutoff_m == doctest::Approx(sym.theta_m).epsilon(1e-12));
    CHECK(br.cutoff_w == doctest::Approx(sym.theta_w).epsilon(1e-12));
    CHECK(accept_br_contains(br.accept_m_l, sym.profile.accept_m.l));

    // opposite side fully invested in the second environment
    StrategyProfile p;
    p.theta_m = 0.0;
    p.theta_w = 1.0;
    BestResponse br2 = best_response_map(kEnv2, p);
    CHECK(br2.cutoff_m == doctest::Approx(0.5).epsilon(1e-12));

    // a low-skill agent whose continuation value beats phi_ll rejects lows
    StrategyProfile rich;
    rich.theta_m = 0.9;
    rich.theta_w = 0.9;
    BestResponse br3 = best_response_map(kEnv2, rich);
    CHECK(br3.accept_m_l == AcceptBr::RejectLow);
}

TEST_CASE("oracle: published environments") {
    auto c1 = fixed_point_search(kEnv1, 2000);
    REQUIRE(c1.size() == 1);
    CHECK(cluster_distance_cells(c1[0], 1.0 / 3.0, 1.0 / 3.0, 2000) <= 1.0);
    CHECK_FALSE(c1[0].pam_pattern);

    auto c2 = fixed_point_search(kEnv2, 2000);
    REQUIRE(c2.size() == 2);  // the asymmetric equilibrium and its mirror
    CHECK(cluster_distance_cells(c2[0], 1.0, 0.5, 2000) <= 1.0);
    CHECK(cluster_distance_cells(c2[1], 1.0, 0.5, 2000) <= 1.0);
    CHECK(std::fabs(c2[0].theta_m - c2[1].theta_w) <= 2.0 / 1999.0);
}

TEST_CASE("oracle: supermodular environment keeps only symmetric clusters") {
    Economy e = affine_economy({15, 8, 2, 1}, 5.0);
    auto clusters = fixed_point_search(e, 2000);
    CHECK(!clusters.empty());
    for (const auto& c : clusters) {
        CHECK(std::fabs(c.theta_m - c.theta_w) <= 2.0 / 1999.0);
    }
}

TEST_CASE("profiles with mutual low rejection sit outside the solved taxonomy") {
    // In the second environment the strategy pair with cutoffs
    // ((sqrt(73)-7)/2, same) and both low classes rejecting low partners is
    // internally consistent under literal best responses, but its match
    // pattern is neither all-match nor assortative, so the market-level
    // restriction (everyone matched through an all-match or assortative
    // pattern) excludes it: the oracle must not report a cluster there.
    double t = (std::sqrt(73.0) - 7.0) / 2.0;
    StrategyProfile p;
    p.theta_m = p.theta_w = t;
    p.accept_m = {1.0, 0.0};
    p.accept_w = {1.0, 0.0};
    BestResponse br = best_response_map(kEnv2, p);
    CHECK(br.cutoff_m == doctest::Approx(t).epsilon(1e-9));  // literal fixed point
    CHECK(accept_br_contains(br.accept_m_l, 0.0));
    for (const auto& c : fixed_point_search(kEnv2, 600)) {
        CHECK(cluster_distance_cells(c, t, t, 600) > 1.0);
    }
}

TEST_CASE("cutoff ordering when all formulas are interior and payoffs submodular") {
    test::EconomyGen gen(53);
    int seen = 0;
    for (int i = 0; i < 5000 && seen < 400; ++i) {
        Economy e = gen.affine_submodular();
        double q = discount_factor(e);
        DeltaPair d = deltas(e.phi);
        double c = e.cost.intercept();
        double ub = q * d.delta_h - c;
        double lb = q * (d.delta + d.delta_h) - c;
        double sym = (q * d.delta_h - c) / (1.0 - q * d.delta);
        if (ub < 0.0 || ub > 1.0 || lb < 0.0 || lb > 1.0) continue;
        ++seen;
        CHECK(ub >= sym - 1e-12);
        CHECK(sym >= lb - 1e-12);
    }
    CHECK(seen >= 400);
}

TEST_CASE("structural exclusions over random submodular economies") {
    test::EconomyGen gen(59);
    for (int i = 0; i < 2000; ++i) {
        Economy e = gen.affine_submodular();
        EquilibriumSet set = enumerate_equilibria(e);  // throws on violation
        bool knife = false;
        for (const auto& r : set.equilibria) knife = knife || r.knife_edge;
        if (knife) continue;
        int n_sym = 0;
        for (const auto& r : set.equilibria)
            if (r.kind == EqKind::SymmetricAM) ++n_sym;
        CHECK(n_sym <= 1);
        bool both_boundary_kinds = set.contains(EqKind::FIOS) && set.contains(EqKind::NIOS);
        CHECK_FALSE(both_boundary_kinds);
        if (set.contains(EqKind::NIOS)) CHECK(n_sym == 1);
    }
}

TEST_CASE("existence under the sufficient conditions") {
    // lambda(phi_hh - phi_hl) <= r phi_hl and lambda(phi_lh - phi_ll) <= r phi_ll
    // with submodular payoffs guarantee a unique symmetric equilibrium
    test::EconomyGen gen(61);
    int seen = 0;
    for (int i = 0; i < 8000 && seen < 500; ++i) {
        Economy e = gen.affine_submodular();
        if (e.lambda * (e.phi.hh - e.phi.hl) > e.r * e.phi.hl - 1e-6) continue;
        if (e.lambda * (e.phi.lh - e.phi.ll) > e.r * e.phi.ll - 1e-6) continue;
        ++seen;
        EquilibriumReport sym = solve_symmetric_am(e);
        CHECK(sym.kind == EqKind::SymmetricAM);
    }
    CHECK(seen >= 500);
}
