#include "qmsim/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmsim/errors.hpp"

namespace qmsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

PureState::PureState(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("theta must lie in [0, pi]");
  }
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) {
    throw DomainError("phi must lie in [0, 2 pi)");
  }
}

PureState PureState::from_vector(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("direction vector must be nonzero and finite");
  }
  const double theta = std::acos(std::clamp(v.z() / n, -1.0, 1.0));
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return PureState(theta, phi);
}

Eigen::Vector3d PureState::unit_vector() const {
  const double st = std::sin(theta_);
  return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
}

PureState PureState::antipode() const {
  double phi = phi_ + kPi;
  if (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
  return PureState(kPi - theta_, phi);
}

BlochVector::BlochVector(const Eigen::Vector3d& s) : s_(s) {
  if (!s.allFinite() || s.norm() > 1.0 + kBallTolerance) {
    throw InvariantViolation("Bloch vector outside the unit ball");
  }
}

bool BlochVector::is_pure(double tol) const { return std::abs(s_.norm() - 1.0) <= tol; }

double DrivePulse::generalized_rabi() const { return std::hypot(rabi, detuning); }

void DrivePulse::validate() const {
  if (!(rabi >= 0.0)) throw DomainError("Rabi frequency must be non-negative");
  if (!(duration >= 0.0)) throw DomainError("pulse duration must be non-negative");
}

DrivePulse resonant_pulse(double area, double rabi, double phase) {
  if (!(rabi > 0.0)) throw DomainError("resonant pulse needs a positive Rabi frequency");
  if (!(area >= 0.0)) throw DomainError("pulse area must be non-negative");
  return DrivePulse{rabi, 0.0, area / rabi, phase};
}

BlochVector state_from_angles(double theta, double phi) {
  return BlochVector(PureState(theta, phi).unit_vector());
}

BlochVector evolve(const BlochVector& state, const DrivePulse& pulse) {
  pulse.validate();
  const double omega_r = pulse.generalized_rabi();
  if (omega_r == 0.0) return state;

  const Eigen::Vector3d k(pulse.rabi * std::cos(pulse.phase) / omega_r,
                          pulse.rabi * std::sin(pulse.phase) / omega_r,
                          pulse.detuning / omega_r);
  const double angle = omega_r * pulse.duration;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Eigen::Vector3d& v = state.vec();
  Eigen::Vector3d out = v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
  // Rounding may push a pure state a few ulps outside the ball.
  const double n = out.norm();
  if (n > 1.0) out /= n;
  return BlochVector(out);
}

double rabi_excitation_probability(double rabi, double detuning, double t) {
  if (!(rabi >= 0.0)) throw DomainError("Rabi frequency must be non-negative");
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
  const double omega_r = std::hypot(rabi, detuning);
  if (omega_r == 0.0) return 0.0;
  const double ratio = rabi / omega_r;
  const double s = std::sin(0.5 * omega_r * t);
  return ratio * ratio * s * s;
}

double ramsey_probability(const DrivePulse& pulse, double precession_time) {
  if (!(precession_time >= 0.0)) throw DomainError("precession time must be non-negative");
  const DrivePulse free{0.0, pulse.detuning, precession_time, 0.0};
  BlochVector s(0.0, 0.0, 1.0);
  s = evolve(s, pulse);
  s = evolve(s, free);
  s = evolve(s, pulse);
  return 0.5 * (1.0 - s.z());
}

double born_probability(const BlochVector& state, const Eigen::Vector3d& unit_direction) {
  const double p = 0.5 * (1.0 + state.vec().dot(unit_direction));
  return std::clamp(p, 0.0, 1.0);
}

double born_probability(const BlochVector& state, const PureState& direction) {
  return born_probability(state, direction.unit_vector());
}

MeasurementResult measure(const BlochVector& state, const PureState& direction, Rng& rng) {
  const Eigen::Vector3d m = direction.unit_vector();
  if (rng.bernoulli(born_probability(state, m))) {
    return {+1, BlochVector(m)};
  }
  return {-1, BlochVector(-m)};
}

}  // namespace qmsim
