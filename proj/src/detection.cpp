#include "qmsim/detection.hpp"

#include <cmath>
#include <string>

#include "qmsim/errors.hpp"

namespace qmsim {

namespace {

void check_efficiency(double eta, const char* name) {
  if (!(eta >= 0.5 && eta <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [1/2, 1]");
  }
}

void check_counting(const PhotonCounting& c) {
  if (!(c.on_mean >= 0.0) || !(c.off_mean >= 0.0)) {
    throw DomainError("photon count means must be non-negative");
  }
}

}  // namespace

double poisson_cdf(unsigned k, double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson mean must be non-negative");
  double term = std::exp(-mean);
  double sum = term;
  for (unsigned i = 1; i <= k; ++i) {
    term *= mean / i;
    sum += term;
  }
  return std::min(sum, 1.0);
}

DetectionModel::DetectionModel(double eta0, double eta1, std::optional<PhotonCounting> counting)
    : eta0_(eta0), eta1_(eta1), counting_(std::move(counting)) {
  check_efficiency(eta0_, "eta0");
  check_efficiency(eta1_, "eta1");
}

DetectionModel::DetectionModel(double eta0, double eta1, const PhotonCounting& counting)
    : DetectionModel(eta0, eta1, std::optional<PhotonCounting>(counting)) {
  check_counting(counting);
  const double derived0 = poisson_cdf(counting.threshold, counting.off_mean);
  const double derived1 = 1.0 - poisson_cdf(counting.threshold, counting.on_mean);
  if (std::abs(derived0 - eta0) > 1e-9 || std::abs(derived1 - eta1) > 1e-9) {
    throw DomainError("detection efficiencies disagree with the photon-count model");
  }
}

DetectionModel DetectionModel::from_efficiencies(double eta0, double eta1) {
  return DetectionModel(eta0, eta1, std::nullopt);
}

DetectionModel DetectionModel::from_photon_counts(double on_mean, double off_mean,
                                                  unsigned threshold) {
  const PhotonCounting c{on_mean, off_mean, threshold};
  check_counting(c);
  const double eta0 = poisson_cdf(threshold, off_mean);
  const double eta1 = 1.0 - poisson_cdf(threshold, on_mean);
  return DetectionModel(eta0, eta1, c);
}

Detection detect(bool true_state_is_one, const DetectionModel& model, Rng& rng) {
  if (const auto& c = model.counting()) {
    const unsigned count = rng.poisson(true_state_is_one ? c->on_mean : c->off_mean);
    return {count > c->threshold ? Observation::on : Observation::off, count};
  }
  if (true_state_is_one) {
    return {rng.bernoulli(model.eta1()) ? Observation::on : Observation::off, std::nullopt};
  }
  return {rng.bernoulli(model.eta0()) ? Observation::off : Observation::on, std::nullopt};
}

}  // namespace qmsim
