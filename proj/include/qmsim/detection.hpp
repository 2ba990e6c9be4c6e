#pragma once

#include <optional>

#include "qmsim/rng.hpp"

namespace qmsim {

enum class Observation : unsigned char { off, on };

inline char to_char(Observation o) { return o == Observation::on ? '1' : '0'; }

/// Photon-counting read-out: Poisson counts with the given means, "on" iff
/// the count exceeds the threshold.
struct PhotonCounting {
  double on_mean = 0.0;
  double off_mean = 0.0;
  unsigned threshold = 0;
};

/// P(count <= k) for a Poisson distribution with the given mean.
double poisson_cdf(unsigned k, double mean);

// Imperfect state read-out.
//
// eta0 is the probability that |0> reads "off", eta1 that |1> reads "on".
// When a photon-counting mechanism is attached the efficiencies are its
// Poisson tail masses; detect() then samples actual counts.
class DetectionModel {
 public:
  /// Abstract read-out with 1/2 <= eta0, eta1 <= 1.
  static DetectionModel from_efficiencies(double eta0, double eta1);
  /// Derives eta0 = P(off count <= threshold), eta1 = P(on count > threshold).
  static DetectionModel from_photon_counts(double on_mean, double off_mean, unsigned threshold);
  /// Both descriptions at once; they must agree within 1e-9.
  DetectionModel(double eta0, double eta1, const PhotonCounting& counting);

  static DetectionModel ideal() { return from_efficiencies(1.0, 1.0); }

  /// Operating point of the hyperfine Zeno experiment: bright mean 5.5
  /// counts, background 0.2, "on" iff at least one count.
  static DetectionModel hyperfine_operating_point() { return from_photon_counts(5.5, 0.2, 0); }

  double eta0() const { return eta0_; }
  double eta1() const { return eta1_; }
  /// (eta1 - eta0) / 2
  double delta_eta() const { return 0.5 * (eta1_ - eta0_); }
  /// (eta1 + eta0) / 2
  double mean_eta() const { return 0.5 * (eta1_ + eta0_); }
  const std::optional<PhotonCounting>& counting() const { return counting_; }

 private:
  DetectionModel(double eta0, double eta1, std::optional<PhotonCounting> counting);

  double eta0_;
  double eta1_;
  std::optional<PhotonCounting> counting_;
};

struct Detection {
  Observation observed;
  std::optional<unsigned> photon_count;  // empty for abstract read-out
};

Detection detect(bool true_state_is_one, const DetectionModel& model, Rng& rng);

}  // namespace qmsim
