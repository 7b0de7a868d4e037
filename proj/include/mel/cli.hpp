#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mel/economy.hpp"
#include "mel/statics.hpp"

namespace mel {

// Flat key=value config (# comments) or JSON when the file ends in .json.
// Command-line flags override file values.
struct RunConfig {
    std::string command;

    // economy source: exactly one of explicit payoffs / household derivation
    bool has_payoffs = false;
    PayoffMatrix phi;
    bool has_household = false;
    double k = 8.0;
    double cd_share = 0.6;
    double t_l = 2.0;
    double t_h = 3.0;

    double c = 0.25;
    double lambda = 1.0;
    double r = 1.0;

    bool has_grid = false;
    double grid_lo = 0.0, grid_step = 0.0, grid_hi = 0.0;
    double ceiling = 0.0;  // 0: default 10 * t_l

    int n_agents = 10000;
    double horizon = 0.0;  // 0: default 20 / r
    int replications = 8;
    std::uint64_t seed = 20240601;
    bool has_profile = false;
    double theta_m = 0.0, theta_w = 0.0;
    double accept_mh = 1.0, accept_ml = 1.0, accept_wh = 1.0, accept_wl = 1.0;

    std::string format = "table";  // table | csv | json
    int precision = 4;
    std::string out_path;
};

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig load_config_file(const std::string& path);

Economy economy_from(const RunConfig& cfg);
PihEnvironment environment_from(const RunConfig& cfg);

// Exit codes: 0 success, 1 usage/config error, 2 solver failure,
// 3 verification mismatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mel
