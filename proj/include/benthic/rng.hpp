#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace benthic {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG with portable draw routines. std::*_distribution is
// implementation-defined, so sampling is done by hand on top of mt19937_64.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  double gaussian(double mean, double stddev) {
    // Box-Muller, one value per call.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * mag * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Independent stream derived from the original seed and a stream id.
  Rng fork(uint64_t stream) const { return Rng(seed_ ^ splitmix64(stream + 0x51ed270b0a1ULL)); }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace benthic
