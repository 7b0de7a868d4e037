#pragma once

#include <algorithm>
#include <array>

#include "mel/economy.hpp"
#include "mel/rng.hpp"

namespace mel::test {

// Random ranked economies for property suites. Payoffs are four sorted
// uniforms, rates log-uniform, affine cost intercept uniform.
class EconomyGen {
  public:
    explicit EconomyGen(std::uint64_t seed, std::uint64_t stream = 7) : rng_(seed, stream) {}

    PayoffMatrix ranked_payoffs(double lo = 0.2, double hi = 10.0) {
        std::array<double, 4> v;
        for (auto& x : v) x = lo + (hi - lo) * rng_.next_double();
        std::sort(v.begin(), v.end(), std::greater<>());
        return {v[0], v[1], v[2], v[3]};
    }

    Economy affine(double c_max = 2.5) {
        Economy e;
        e.phi = ranked_payoffs();
        e.cost = CostFunction::affine(c_max * rng_.next_double());
        e.lambda = std::exp(std::log(0.3) + rng_.next_double() * std::log(10.0));
        e.r = std::exp(std::log(0.3) + rng_.next_double() * std::log(10.0));
        return e;
    }

    Economy affine_submodular(double c_max = 2.5) {
        for (;;) {
            Economy e = affine(c_max);
            DeltaPair d = deltas(e.phi);
            if (d.delta < -1e-6) return e;
        }
    }

    Economy affine_supermodular(double c_max = 2.5) {
        for (;;) {
            Economy e = affine(c_max);
            DeltaPair d = deltas(e.phi);
            if (d.delta > 1e-6) return e;
        }
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.next_double(); }

  private:
    CounterRng rng_;
};

}  // namespace mel::test
