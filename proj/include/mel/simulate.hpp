#pragma once

#include <cstdint>
#include <vector>

#include "mel/economy.hpp"

namespace mel {

// Discrete-event simulation of the steady-state market: meetings arrive as a
// Poisson process, partners are drawn uniformly from the opposite unmatched
// pool, matched pairs collect their payoff discounted to birth and are
// replaced by clones of the same type making the same investment, so the
// pool composition never drifts.
struct SimConfig {
    Economy economy;
    StrategyProfile profile;
    int n_agents = 10000;  // per side
    double horizon = 20.0;
    int n_replications = 8;
    std::uint64_t seed = 20240601;

    void validate() const;  // n_agents >= 100, horizon >= 10/r
};

struct ClassStats {
    double mean = 0.0;  // empirical discounted value from birth
    double se = 0.0;    // standard error across replications
    long generations = 0;
    bool censored = false;  // no generation of this class ever matched
};

struct SimResult {
    // indexed [gender][skill] with M=0, W=1 and H=0, L=1
    ClassStats value[2][2];
    double pool_share_m = 0.0;  // high-skill share of the male pool
    double pool_share_w = 0.0;
    double matches_per_unit_time = 0.0;
    double truncation_bound = 0.0;  // discounting mass beyond the horizon
    std::vector<double> meeting_gaps;  // pooled inter-meeting times, replication 0
};

SimResult simulate_market(const SimConfig& cfg);

// A measure-zero deviant injected into the simulated market: either flips the
// investment decision of type tau, or overrides the acceptance of low-skill
// partners. The deviant meets real pool members but never removes them.
struct DeviationSpec {
    Gender gender = Gender::M;
    double type_tau = 0.5;
    bool flip_invest = false;
    double accept_low_override = -1.0;  // in [0,1] to override; negative = keep
};

struct DeviationResult {
    double conformist_net = 0.0;  // empirical value net of investment cost
    double deviant_net = 0.0;
    double gain = 0.0;            // deviant_net - conformist_net
    double se = 0.0;              // of the gain, across replications
};

DeviationResult verify_best_response(const SimConfig& cfg, const DeviationSpec& dev);

// Kolmogorov-Smirnov distance of samples against Exponential(rate).
double ks_distance_exponential(std::vector<double> samples, double rate);

}  // namespace mel
