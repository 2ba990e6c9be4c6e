#include "qmsim/rng.hpp"

#include <cmath>
#include <numbers>

#include "qmsim/errors.hpp"

namespace qmsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngSeed derive_seed(RngSeed master, std::uint64_t stream) {
  return RngSeed{splitmix64(splitmix64(master.value) ^ splitmix64(~stream))};
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

unsigned Rng::poisson(double mean) {
  if (!(mean >= 0.0) || mean > 700.0) {
    throw DomainError("poisson mean must lie in [0, 700]");
  }
  const double u = uniform();
  double term = std::exp(-mean);
  double cdf = term;
  unsigned k = 0;
  // The tail beyond mean + 40 sqrt(mean) + 40 carries no double-precision mass.
  const double k_max = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u >= cdf && k < k_max) {
    ++k;
    term *= mean / k;
    cdf += term;
  }
  return k;
}

std::uint64_t Rng::binomial(std::uint64_t trials, double p) {
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (bernoulli(p)) ++hits;
  }
  return hits;
}

Eigen::Vector3d Rng::unit_vector() {
  const double z = 2.0 * uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace qmsim
