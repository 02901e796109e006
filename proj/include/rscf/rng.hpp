#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace rscf {

// splitmix64 finalizer; decorrelates nearby keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// All randomness in a run is addressed by (master seed, trial, purpose), so
// any draw can be reproduced in isolation and results do not depend on
// evaluation order or worker count.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t purpose) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (trial + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (purpose + 0xd1b54a32d192ed03ULL));
  return h;
}

// Substream purposes. Error matrices use kErrorBase + j.
enum StreamPurpose : std::uint64_t {
  kGeometry = 1,
  kShadowing = 2,
  kEstimate = 3,
  kRandomInit = 4,
  kErrorBase = 1000,
};

// Seeded generator with explicit uniform/normal sampling. The Gaussian path
// is a hand-rolled Box-Muller so draws depend only on the mt19937_64 bit
// stream, not on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // One Box-Muller pair; u1 is kept strictly positive for the log.
  void normal_pair(double& n0, double& n1) {
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    n0 = r * std::cos(a);
    n1 = r * std::sin(a);
  }

  double normal() {
    double a, b;
    normal_pair(a, b);
    return a;
  }

  // Circularly symmetric complex Gaussian with the given total variance.
  std::complex<double> cnormal(double variance) {
    double a, b;
    normal_pair(a, b);
    const double s = std::sqrt(0.5 * variance);
    return {s * a, s * b};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rscf
