#pragma once

#include <cstdint>
#include <cmath>

namespace mel {

// Counter-based generator: every draw is a hash of (seed, stream, counter),
// so replication streams are reproducible independently of thread scheduling.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

    // uniform on [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

    double next_exponential(double rate) {
        double u;
        do { u = next_double(); } while (u <= 0.0);
        return -std::log(u) / rate;
    }

    bool next_bernoulli(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return next_double() < p;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace mel
