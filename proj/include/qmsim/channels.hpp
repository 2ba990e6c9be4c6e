#pragma once

// Affine qubit channels s' = M s + v on Bloch vectors and their
// reconstruction from measured probabilities.

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qmsim/bloch.hpp"
#include "qmsim/rng.hpp"

namespace qmsim::channels {

inline constexpr double kContainmentTolerance = 1e-9;

class AffineChannel {
 public:
  /// Identity channel.
  AffineChannel();
  /// Raw constructor. Throws InvariantViolation unless |M s + v| <= 1 + 1e-9
  /// for every sampled unit s (necessary condition for a valid channel).
  AffineChannel(const Eigen::Matrix3d& m, const Eigen::Vector3d& v, int samples = 1000);

  const Eigen::Matrix3d& m() const { return m_; }
  const Eigen::Vector3d& v() const { return v_; }

  bool is_unital(double tol = 1e-12) const { return v_.norm() <= tol; }

 private:
  Eigen::Matrix3d m_;
  Eigen::Vector3d v_;
};

/// Shrinks components normal to `axis` by 1 - 2 lambda.
AffineChannel phase_damping(double lambda, const Eigen::Vector3d& axis);
inline AffineChannel phase_damping(double lambda, const PureState& axis) {
  return phase_damping(lambda, axis.unit_vector());
}
/// s -> (1 - 2 lambda) s.
AffineChannel depolarizing(double lambda);
/// Right-handed rotation by `angle` about the unit `axis`.
AffineChannel rotation_channel(const Eigen::Vector3d& axis, double angle);

/// `first` applied first: M = M2 M1, v = M2 v1 + v2.
AffineChannel compose(const AffineChannel& first, const AffineChannel& second);

/// Throws InvariantViolation when the result leaves the ball.
BlochVector apply(const AffineChannel& channel, const BlochVector& s);

struct PhaseDampingSpec {
  double lambda = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};
struct DepolarizingSpec {
  double lambda = 0.0;
};
struct RotationSpec {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
};
struct AffineSpec {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};
struct CompositionSpec;

using ChannelSpec =
    std::variant<PhaseDampingSpec, DepolarizingSpec, RotationSpec, AffineSpec, CompositionSpec>;

struct CompositionSpec {
  std::vector<ChannelSpec> parts;  // applied in order
};

/// Validates parameters (lambda in [0, 1/2], unit axes) and builds the channel.
AffineChannel build(const ChannelSpec& spec);

using BlackBox = std::function<BlochVector(const BlochVector&)>;

/// Born probabilities P[i][j] of outcome +i (i = x, y, z) after sending
/// input j (j = +x, +y, +z, -z) through the box.
using ProbabilityTable = Eigen::Matrix<double, 3, 4>;

ProbabilityTable tomography_probabilities(const BlackBox& box);

/// Estimated (M, v) with per-entry standard errors. Not an AffineChannel:
/// sampled estimates may poke slightly outside the ball.
struct Reconstruction {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Matrix3d m_stderr = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v_stderr = Eigen::Vector3d::Zero();
};

/// M_ij = 2 P_ij - P_iz - P_i(-z),  v_i = P_iz + P_i(-z) - 1.
Reconstruction reconstruct(const ProbabilityTable& p);

/// Reconstruction from exact probabilities.
AffineChannel tomography_exact(const BlackBox& box);
AffineChannel tomography_exact(const AffineChannel& channel);

/// Each probability replaced by the frequency of `shots` simulated
/// single-shot measurements; standard errors propagated from the sampled
/// binomial variances.
Reconstruction tomography_sampled(const AffineChannel& channel, std::uint64_t shots, Rng& rng);

/// Standard errors of each entry given the true probabilities and shot count.
Reconstruction binomial_stderr(const ProbabilityTable& p, std::uint64_t shots);

}  // namespace qmsim::channels
