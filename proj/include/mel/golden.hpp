#pragma once

#include <string>
#include <vector>

namespace mel {

// One reproduced value: a number the source environment pins down, the
// computed counterpart and the comparison tolerance.
struct GoldenCheck {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Reproduces every pinned reference value end to end (payoff derivation,
// equilibrium cutoffs, constraint margins, wage thresholds).
std::vector<GoldenCheck> golden_suite();

}  // namespace mel
