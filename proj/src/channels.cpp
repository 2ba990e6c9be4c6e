#include "qmsim/channels.hpp"

#include <cmath>
#include <string>

#include "qmsim/errors.hpp"
#include "qmsim/sphere.hpp"

namespace qmsim::channels {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 0.5)) throw DomainError("lambda must lie in [0, 1/2]");
}

void check_axis(const Eigen::Vector3d& axis) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) {
    throw DomainError("channel axis must be a unit vector");
  }
}

const std::vector<Eigen::Vector3d>& containment_samples(int n) {
  static const std::vector<Eigen::Vector3d> standard = fibonacci_sphere(1000);
  if (n == 1000) return standard;
  thread_local std::vector<Eigen::Vector3d> custom;
  custom = fibonacci_sphere(n);
  return custom;
}

// Inputs +x, +y, +z, -z in column order.
const Eigen::Matrix<double, 3, 4>& tomography_inputs() {
  static const Eigen::Matrix<double, 3, 4> in = [] {
    Eigen::Matrix<double, 3, 4> a;
    a << 1, 0, 0, 0,
         0, 1, 0, 0,
         0, 0, 1, -1;
    return a;
  }();
  return in;
}

}  // namespace

AffineChannel::AffineChannel() : m_(Eigen::Matrix3d::Identity()), v_(Eigen::Vector3d::Zero()) {}

AffineChannel::AffineChannel(const Eigen::Matrix3d& m, const Eigen::Vector3d& v, int samples)
    : m_(m), v_(v) {
  if (!m.allFinite() || !v.allFinite()) throw InvariantViolation("channel entries must be finite");
  if (samples < 1) throw DomainError("need at least one containment sample");
  for (const auto& s : containment_samples(samples)) {
    const double n = (m * s + v).norm();
    if (n > 1.0 + kContainmentTolerance) {
      throw InvariantViolation("channel maps a pure state outside the Bloch ball (|s'| = " +
                               std::to_string(n) + ")");
    }
  }
}

AffineChannel phase_damping(double lambda, const Eigen::Vector3d& axis) {
  check_lambda(lambda);
  check_axis(axis);
  const Eigen::Matrix3d along = axis * axis.transpose();
  const Eigen::Matrix3d m = along + (1.0 - 2.0 * lambda) * (Eigen::Matrix3d::Identity() - along);
  return AffineChannel(m, Eigen::Vector3d::Zero());
}

AffineChannel depolarizing(double lambda) {
  check_lambda(lambda);
  return AffineChannel((1.0 - 2.0 * lambda) * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
}

AffineChannel rotation_channel(const Eigen::Vector3d& axis, double angle) {
  check_axis(axis);
  if (!std::isfinite(angle)) throw DomainError("rotation angle must be finite");
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return AffineChannel(r, Eigen::Vector3d::Zero());
}

AffineChannel compose(const AffineChannel& first, const AffineChannel& second) {
  return AffineChannel(second.m() * first.m(), second.m() * first.v() + second.v());
}

BlochVector apply(const AffineChannel& channel, const BlochVector& s) {
  Eigen::Vector3d out = channel.m() * s.vec() + channel.v();
  const double n = out.norm();
  if (n > 1.0 + kContainmentTolerance) {
    throw InvariantViolation("channel output outside the Bloch ball");
  }
  if (n > 1.0) out /= n;
  return BlochVector(out);
}

AffineChannel build(const ChannelSpec& spec) {
  struct Visitor {
    AffineChannel operator()(const PhaseDampingSpec& s) const {
      return phase_damping(s.lambda, s.axis);
    }
    AffineChannel operator()(const DepolarizingSpec& s) const { return depolarizing(s.lambda); }
    AffineChannel operator()(const RotationSpec& s) const {
      return rotation_channel(s.axis, s.angle);
    }
    AffineChannel operator()(const AffineSpec& s) const { return AffineChannel(s.m, s.v); }
    AffineChannel operator()(const CompositionSpec& s) const {
      AffineChannel out;
      for (const auto& part : s.parts) out = compose(out, build(part));
      return out;
    }
  };
  return std::visit(Visitor{}, spec);
}

ProbabilityTable tomography_probabilities(const BlackBox& box) {
  const auto& in = tomography_inputs();
  ProbabilityTable p;
  for (int j = 0; j < 4; ++j) {
    const BlochVector out = box(BlochVector(Eigen::Vector3d(in.col(j))));
    for (int i = 0; i < 3; ++i) {
      p(i, j) = born_probability(out, Eigen::Vector3d(Eigen::Vector3d::Unit(i)));
    }
  }
  return p;
}

Reconstruction reconstruct(const ProbabilityTable& p) {
  Reconstruction r;
  for (int i = 0; i < 3; ++i) {
    const double pz = p(i, 2);
    const double pmz = p(i, 3);
    r.v(i) = pz + pmz - 1.0;
    r.m(i, 0) = 2.0 * p(i, 0) - pz - pmz;
    r.m(i, 1) = 2.0 * p(i, 1) - pz - pmz;
    r.m(i, 2) = pz - pmz;
  }
  return r;
}

Reconstruction binomial_stderr(const ProbabilityTable& p, std::uint64_t shots) {
  if (shots < 1) throw DomainError("shots must be at least 1");
  const ProbabilityTable var = (p.array() * (1.0 - p.array())) / static_cast<double>(shots);
  Reconstruction r = reconstruct(p);
  for (int i = 0; i < 3; ++i) {
    const double zz = var(i, 2) + var(i, 3);
    r.v_stderr(i) = std::sqrt(zz);
    r.m_stderr(i, 0) = std::sqrt(4.0 * var(i, 0) + zz);
    r.m_stderr(i, 1) = std::sqrt(4.0 * var(i, 1) + zz);
    r.m_stderr(i, 2) = std::sqrt(zz);
  }
  return r;
}

AffineChannel tomography_exact(const BlackBox& box) {
  const Reconstruction r = reconstruct(tomography_probabilities(box));
  return AffineChannel(r.m, r.v);
}

AffineChannel tomography_exact(const AffineChannel& channel) {
  return tomography_exact([&channel](const BlochVector& s) { return apply(channel, s); });
}

Reconstruction tomography_sampled(const AffineChannel& channel, std::uint64_t shots, Rng& rng) {
  if (shots < 1) throw DomainError("shots must be at least 1");
  const ProbabilityTable exact =
      tomography_probabilities([&channel](const BlochVector& s) { return apply(channel, s); });
  ProbabilityTable freq;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 3; ++i) {
      freq(i, j) = static_cast<double>(rng.binomial(shots, exact(i, j))) / shots;
    }
  }
  return binomial_stderr(freq, shots);
}

}  // namespace qmsim::channels
