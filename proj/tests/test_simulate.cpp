#include <doctest.h>

#include <cmath>

#include "mel/equilibrium.hpp"
#include "mel/simulate.hpp"
#include "mel/values.hpp"
#include "support.hpp"

using namespace mel;

namespace {

Economy env1() {
    Economy e;
    e.phi = {7, 6, 3, 1};
    e.cost = CostFunction::affine(2.0);
    e.lambda = 1.0;
    e.r = 1.0;
    return e;
}

SimConfig small_config(const Economy& e, const StrategyProfile& p, std::uint64_t seed = 99) {
    SimConfig cfg;
    cfg.economy = e;
    cfg.profile = p;
    cfg.n_agents = 2000;
    cfg.horizon = 20.0 / e.r;
    cfg.n_replications = 6;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    StrategyProfile p;
    p.theta_m = p.theta_w = 0.5;
    SimConfig cfg = small_config(env1(), p);
    cfg.n_agents = 50;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.n_agents = 200;
    cfg.horizon = 5.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("all-high pool reproduces the closed form") {
    StrategyProfile p;
    p.theta_m = p.theta_w = 1.0;
    SimConfig cfg = small_config(env1(), p);
    SimResult res = simulate_market(cfg);
    double expect = 0.5 * 7.0;  // lambda phi_hh / (r + lambda)
    CHECK(std::fabs(res.value[0][0].mean - expect) <= 3.0 * res.value[0][0].se + 1e-3);
    CHECK(res.pool_share_m == doctest::Approx(1.0));
}

TEST_CASE("symmetric equilibrium values match value_am within three standard errors") {
    Economy e = env1();
    StrategyProfile p;
    p.theta_m = p.theta_w = 1.0 / 3.0;
    SimConfig cfg = small_config(e, p, 7);
    SimResult res = simulate_market(cfg);
    double vh = value_am(e, Skill::H, 1.0 / 3.0);  // 19/6
    double vl = value_am(e, Skill::L, 1.0 / 3.0);
    for (int g = 0; g < 2; ++g) {
        CHECK(std::fabs(res.value[g][0].mean - vh) <= 3.0 * res.value[g][0].se + 1e-3);
        CHECK(std::fabs(res.value[g][1].mean - vl) <= 3.0 * res.value[g][1].se + 1e-3);
    }
    CHECK(res.pool_share_m == doctest::Approx(1.0 / 3.0).epsilon(2e-3));
}

TEST_CASE("assortative profile reproduces the waiting value") {
    Economy e = env1();
    StrategyProfile p;
    p.theta_m = p.theta_w = 0.5;
    p.accept_m = {0.0, 1.0};
    p.accept_w = {0.0, 1.0};
    SimConfig cfg = small_config(e, p, 21);
    SimResult res = simulate_market(cfg);
    double vh = value_pam(e, Skill::H, 0.5);  // lambda 0.5 phi_hh / (r + lambda 0.5)
    CHECK(std::fabs(res.value[0][0].mean - vh) <= 3.0 * res.value[0][0].se + 2e-3);
}

TEST_CASE("inter-meeting times look exponential at the 1% level") {
    StrategyProfile p;
    p.theta_m = p.theta_w = 0.5;
    SimConfig cfg = small_config(env1(), p, 33);
    SimResult res = simulate_market(cfg);
    REQUIRE(res.meeting_gaps.size() >= 5000);
    double d = ks_distance_exponential(res.meeting_gaps, cfg.economy.lambda);
    double critical = 1.628 / std::sqrt(static_cast<double>(res.meeting_gaps.size()));
    CHECK(d < critical);
}

TEST_CASE("estimator is unbiased: 99% intervals cover the closed form") {
    Economy e = env1();
    StrategyProfile p;
    p.theta_m = p.theta_w = 1.0;  // all high, closed form 3.5
    int covered = 0;
    for (int run = 0; run < 30; ++run) {
        SimConfig cfg;
        cfg.economy = e;
        cfg.profile = p;
        cfg.n_agents = 400;
        cfg.horizon = 20.0;
        cfg.n_replications = 6;
        cfg.seed = 1000 + run;
        SimResult res = simulate_market(cfg);
        const ClassStats& cs = res.value[0][0];
        if (std::fabs(cs.mean - 3.5) <= 2.576 * cs.se) ++covered;
    }
    CHECK(covered >= 27);
}

TEST_CASE("classes that can never match are reported censored") {
    Economy e = env1();
    StrategyProfile p;
    p.theta_m = p.theta_w = 0.5;
    p.accept_m = {0.0, 0.0};  // men reject every low woman
    SimConfig cfg = small_config(e, p, 55);
    SimResult res = simulate_market(cfg);
    CHECK(res.value[1][1].censored);       // low women never pass a meeting
    CHECK(res.value[1][1].mean == 0.0);
}

TEST_CASE("no profitable deviations at the symmetric equilibrium") {
    Economy e = env1();
    StrategyProfile p;
    p.theta_m = p.theta_w = 1.0 / 3.0;
    SimConfig cfg = small_config(e, p, 77);

    // type below the cutoff abandoning the investment loses about h(0.2)
    DeviationSpec drop;
    drop.gender = Gender::M;
    drop.type_tau = 0.2;
    drop.flip_invest = true;
    DeviationResult r1 = verify_best_response(cfg, drop);
    double gap = value_am(e, Skill::H, 1.0 / 3.0) - value_am(e, Skill::L, 1.0 / 3.0);
    double expected_loss = gap - e.cost(0.2);  // 0.1333...
    CHECK(r1.gain < 3.0 * r1.se);
    CHECK(std::fabs(r1.gain + expected_loss) <= 3.0 * r1.se + 5e-3);

    // type above the cutoff investing anyway loses h(0.9) < 0
    DeviationSpec add;
    add.gender = Gender::W;
    add.type_tau = 0.9;
    add.flip_invest = true;
    DeviationResult r2 = verify_best_response(cfg, add);
    CHECK(r2.gain < 3.0 * r2.se);
    CHECK(std::fabs(r2.gain - (gap - e.cost(0.9))) <= 3.0 * r2.se + 5e-3);
}

TEST_CASE("no profitable investment deviation at the asymmetric equilibrium") {
    Economy e = env1();
    e.phi = {11, 10, 6, 1};
    EquilibriumSet set = enumerate_equilibria(e);
    REQUIRE(set.equilibria.size() == 1);
    SimConfig cfg = small_config(e, set.equilibria[0].profile, 91);
    DeviationSpec dev;
    dev.gender = Gender::W;  // the partially investing side
    dev.type_tau = 0.8;      // above the 0.5 cutoff
    dev.flip_invest = true;
    DeviationResult r = verify_best_response(cfg, dev);
    CHECK(r.gain < 3.0 * r.se);
}

TEST_CASE("determinism: same seed, same result") {
    StrategyProfile p;
    p.theta_m = p.theta_w = 0.4;
    SimConfig cfg = small_config(env1(), p, 1234);
    cfg.n_agents = 500;
    cfg.n_replications = 3;
    SimResult a = simulate_market(cfg);
    SimResult b = simulate_market(cfg);
    for (int g = 0; g < 2; ++g)
        for (int s = 0; s < 2; ++s) {
            CHECK(a.value[g][s].mean == b.value[g][s].mean);
            CHECK(a.value[g][s].se == b.value[g][s].se);
        }
}
