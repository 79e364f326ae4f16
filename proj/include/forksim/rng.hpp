#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace forksim {

/// Distribution sampling is done by hand on top of the raw engine because
/// the std <random> distributions are not bit-identical across standard
/// library implementations, and replications must reproduce exactly from
/// (seed, replication index) alone.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  /// Box-Muller, both values used.
  double normal(double mean, double sd) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sd * spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return mean + sd * r * std::cos(th);
  }

  /// Rejection-sampled truncated normal on [lo, hi].
  double truncated_normal(double mean, double sd, double lo, double hi) {
    if (sd <= 0.0)
      return mean < lo ? lo : (mean > hi ? hi : mean);
    for (;;) {
      const double x = normal(mean, sd);
      if (x >= lo && x <= hi)
        return x;
    }
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer over (seed, stream): replications get decorrelated
/// engines without consuming draws from one another.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace forksim
