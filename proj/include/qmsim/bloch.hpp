#pragma once

// Two-level quantum mechanics on the Bloch ball.
//
// Conventions: |0> maps to +z, the pure state cos(theta/2)|0> +
// sin(theta/2) e^{i phi}|1> maps to (sin theta cos phi, sin theta sin phi,
// cos theta). Angles are radians, rates rad/s, times s.

#include <utility>

#include <Eigen/Dense>

#include "qmsim/rng.hpp"

namespace qmsim {

inline constexpr double kBallTolerance = 1e-12;

/// Point on the Bloch sphere given by colatitude and azimuth.
class PureState {
 public:
  /// Requires theta in [0, pi] and phi in [0, 2 pi); throws DomainError.
  PureState(double theta, double phi);

  /// Angles of a nonzero vector's direction, phi wrapped into [0, 2 pi).
  static PureState from_vector(const Eigen::Vector3d& v);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

  Eigen::Vector3d unit_vector() const;

  /// The orthogonal state |pi - theta, pi + phi>.
  PureState antipode() const;

 private:
  double theta_;
  double phi_;
};

/// Qubit state as a vector in the unit ball; rho = (I + s.sigma)/2.
class BlochVector {
 public:
  BlochVector() : s_(0.0, 0.0, 0.0) {}
  /// Throws InvariantViolation if |s| > 1 + kBallTolerance.
  explicit BlochVector(const Eigen::Vector3d& s);
  BlochVector(double x, double y, double z) : BlochVector(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& vec() const { return s_; }
  double x() const { return s_.x(); }
  double y() const { return s_.y(); }
  double z() const { return s_.z(); }
  double norm() const { return s_.norm(); }
  bool is_pure(double tol = kBallTolerance) const;

  BlochVector antipode() const { return BlochVector(-s_); }

 private:
  Eigen::Vector3d s_;
};

/// Drive field applied in the rotating frame: Rabi rate, detuning
/// delta = omega_0 - omega, duration and initial phase.
struct DrivePulse {
  double rabi = 0.0;
  double detuning = 0.0;
  double duration = 0.0;
  double phase = 0.0;

  /// Generalized Rabi frequency sqrt(rabi^2 + detuning^2).
  double generalized_rabi() const;
  /// Throws DomainError on negative rabi or duration.
  void validate() const;
};

/// Resonant pulse of the given area (rabi * duration) at Rabi rate `rabi`.
DrivePulse resonant_pulse(double area, double rabi, double phase = 0.0);

BlochVector state_from_angles(double theta, double phi);
inline BlochVector state_from_angles(const PureState& p) {
  return state_from_angles(p.theta(), p.phi());
}

/// Rotation of s by generalized_rabi * duration about
/// (rabi cos phase, rabi sin phase, detuning) / generalized_rabi.
/// A pulse with zero generalized Rabi frequency is the identity.
BlochVector evolve(const BlochVector& state, const DrivePulse& pulse);

/// (Omega/Omega_R)^2 sin^2(Omega_R t / 2); 0 when Omega = delta = 0.
double rabi_excitation_probability(double rabi, double detuning, double t);

/// P(|1>) after pulse, free precession for `precession_time` at the pulse's
/// detuning, and the same pulse again.
double ramsey_probability(const DrivePulse& pulse, double precession_time);

/// (1 + s.m)/2 for the unit vector m of `direction`.
double born_probability(const BlochVector& state, const PureState& direction);
double born_probability(const BlochVector& state, const Eigen::Vector3d& unit_direction);

struct MeasurementResult {
  int outcome;          // +1 along the direction, -1 opposite
  BlochVector collapsed;
};

/// Projective measurement along `direction`.
MeasurementResult measure(const BlochVector& state, const PureState& direction, Rng& rng);

}  // namespace qmsim
