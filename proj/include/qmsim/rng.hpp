#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace qmsim {

struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Seed of the independent stream `stream` derived from `master`.
/// Streams for different indices are decorrelated by a SplitMix64 finalizer.
RngSeed derive_seed(RngSeed master, std::uint64_t stream);

// Random source with a platform-independent output sequence.
//
// The standard distributions (uniform_real_distribution, poisson_distribution,
// ...) are implementation-defined, so only the raw mt19937_64 output is used
// and every variate is built on top of it here.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  /// Poisson variate by CDF inversion; intended for means below ~700.
  unsigned poisson(double mean);

  /// Number of successes in `trials` Bernoulli(p) draws.
  std::uint64_t binomial(std::uint64_t trials, double p);

  /// Point drawn uniformly (area measure) on the unit sphere.
  Eigen::Vector3d unit_vector();

 private:
  std::mt19937_64 engine_;
};

}  // namespace qmsim
