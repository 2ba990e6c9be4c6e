#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmsim/channels.hpp"
#include "qmsim/errors.hpp"
#include "qmsim/sphere.hpp"

namespace {

using namespace qmsim;
using namespace qmsim::channels;
using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
constexpr double kPi = std::numbers::pi;

// Density-matrix versions of the channels, used to produce the twelve
// tomography probabilities without going through (M, v).
struct Sigma {
  Mat2 x, y, z;
  Sigma() {
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
  }
  Mat2 dot(const Eigen::Vector3d& n) const { return n.x() * x + n.y() * y + n.z() * z; }
};
const Sigma kSigma;

using DensityMap = std::function<Mat2(const Mat2&)>;

DensityMap dm_phase_damping(double lambda, const Eigen::Vector3d& n) {
  const Mat2 p = kSigma.dot(n);
  return [=](const Mat2& r) -> Mat2 { return (1 - lambda) * r + lambda * p * r * p; };
}

DensityMap dm_depolarizing(double lambda) {
  return [=](const Mat2& r) -> Mat2 {
    return (1 - 2 * lambda) * r + lambda * r.trace() * Mat2::Identity();
  };
}

DensityMap dm_rotation(const Eigen::Vector3d& n, double angle) {
  const Mat2 u = (cplx(0, -angle / 2) * kSigma.dot(n)).exp();
  return [=](const Mat2& r) -> Mat2 { return u * r * u.adjoint(); };
}

Mat2 rho_of(const Eigen::Vector3d& s) {
  return 0.5 * (Mat2::Identity() + kSigma.dot(s));
}

ProbabilityTable dm_probabilities(const DensityMap& map) {
  const Eigen::Vector3d inputs[4] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, -1}};
  const Eigen::Vector3d axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  ProbabilityTable p;
  for (int j = 0; j < 4; ++j) {
    const Mat2 out = map(rho_of(inputs[j]));
    for (int i = 0; i < 3; ++i) p(i, j) = (out * rho_of(axes[i])).trace().real();
  }
  return p;
}

Eigen::Vector3d random_axis(Rng& rng) { return rng.unit_vector(); }

ChannelSpec random_spec(Rng& rng, int depth = 0) {
  const int pick = static_cast<int>(rng.uniform() * (depth < 2 ? 5 : 4));
  switch (pick) {
    case 0:
      return PhaseDampingSpec{0.5 * rng.uniform(), random_axis(rng)};
    case 1:
      return DepolarizingSpec{0.5 * rng.uniform()};
    case 2:
      return RotationSpec{random_axis(rng), 2 * kPi * rng.uniform()};
    case 3: {
      // Contraction with shift: |M s + v| <= a + b <= 1.
      const double a = 0.7 * rng.uniform(), b = 0.3 * rng.uniform();
      const Eigen::Matrix3d q =
          Eigen::AngleAxisd(2 * kPi * rng.uniform(), random_axis(rng)).toRotationMatrix();
      const Eigen::Vector3d d(rng.uniform(), rng.uniform(), rng.uniform());
      return AffineSpec{a * q * d.asDiagonal(), b * random_axis(rng)};
    }
    default: {
      CompositionSpec c;
      const int n = 2 + static_cast<int>(rng.uniform() * 2);
      for (int i = 0; i < n; ++i) c.parts.push_back(random_spec(rng, depth + 1));
      return c;
    }
  }
}

TEST(PhaseDamping, Examples) {
  EXPECT_TRUE(phase_damping(0.0, Eigen::Vector3d(0.6, 0, 0.8)).m().isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  const auto full = apply(phase_damping(0.5, Eigen::Vector3d::UnitZ()), BlochVector(1, 0, 0));
  EXPECT_NEAR(full.norm(), 0, 1e-15);
  for (double lambda : {0.1, 0.3}) {
    const auto c = phase_damping(lambda, Eigen::Vector3d::UnitZ());
    Eigen::Matrix3d expect = Eigen::Vector3d(1 - 2 * lambda, 1 - 2 * lambda, 1).asDiagonal();
    EXPECT_EQ(c.m(), expect);
    EXPECT_TRUE(c.is_unital());
  }
  EXPECT_THROW(phase_damping(0.6, Eigen::Vector3d::UnitZ()), DomainError);
  EXPECT_THROW(phase_damping(0.1, Eigen::Vector3d(0, 0, 2)), DomainError);
}

TEST(Depolarizing, Examples) {
  EXPECT_EQ(depolarizing(0.5).m(), Eigen::Matrix3d::Zero());
  EXPECT_EQ(depolarizing(0.0).m(), Eigen::Matrix3d::Identity());
  EXPECT_NEAR(apply(depolarizing(0.25), BlochVector(0, 0, 1)).z(), 0.5, 1e-15);
}

TEST(Rotation, Examples) {
  EXPECT_TRUE(rotation_channel(Eigen::Vector3d::UnitY(), 0).m().isApprox(Eigen::Matrix3d::Identity()));
  const auto flipped = apply(rotation_channel(Eigen::Vector3d::UnitX(), kPi), BlochVector(0, 0, 1));
  EXPECT_NEAR((flipped.vec() - Eigen::Vector3d(0, 0, -1)).norm(), 0, 1e-15);
  Rng rng(RngSeed{1});
  for (int i = 0; i < 50; ++i) {
    const auto n = random_axis(rng);
    const double a = 3 * rng.uniform(), b = 3 * rng.uniform();
    const auto two = compose(rotation_channel(n, a), rotation_channel(n, b));
    EXPECT_NEAR((two.m() - rotation_channel(n, a + b).m()).norm(), 0, 1e-12);
    EXPECT_NEAR(std::abs(rotation_channel(n, a).m().determinant()), 1.0, 1e-12);
  }
}

TEST(Compose, Examples) {
  Rng rng(RngSeed{2});
  const auto c = build(random_spec(rng));
  const auto same = compose(AffineChannel(), c);
  EXPECT_NEAR((same.m() - c.m()).norm() + (same.v() - c.v()).norm(), 0, 1e-15);
  const auto dd = compose(depolarizing(0.1), depolarizing(0.3));
  EXPECT_TRUE(dd.m().isApprox(0.8 * 0.4 * Eigen::Matrix3d::Identity(), 1e-15));
}

TEST(ComposeProperty, AssociativeAndConsistentWithApply) {
  Rng rng(RngSeed{3});
  for (int i = 0; i < 100; ++i) {
    const auto a = build(random_spec(rng)), b = build(random_spec(rng)), c = build(random_spec(rng));
    const auto l = compose(compose(a, b), c), r = compose(a, compose(b, c));
    EXPECT_NEAR((l.m() - r.m()).norm() + (l.v() - r.v()).norm(), 0, 1e-12);
    const BlochVector s(rng.unit_vector() * rng.uniform());
    EXPECT_NEAR((apply(compose(a, b), s).vec() - apply(b, apply(a, s)).vec()).norm(), 0, 1e-12);
  }
}

TEST(ChannelProperty, BallPreservedAndSingularValues) {
  Rng rng(RngSeed{4});
  const auto samples = fibonacci_sphere(1000);
  for (int i = 0; i < 30; ++i) {
    const double lambda = 0.5 * rng.uniform();
    for (const auto& c : {phase_damping(lambda, random_axis(rng)), depolarizing(lambda)}) {
      const Eigen::Vector3d sv = c.m().jacobiSvd().singularValues();
      EXPECT_LE(sv.maxCoeff(), 1 + 1e-12);
      EXPECT_GE(sv.minCoeff(), -1e-12);
      for (const auto& s : samples) EXPECT_LE(apply(c, BlochVector(s)).norm(), 1 + 1e-12);
    }
  }
}

TEST(AffineChannel, RawConstructorChecksBall) {
  EXPECT_THROW(AffineChannel(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0, 0, 0.1)),
               InvariantViolation);
  EXPECT_NO_THROW(AffineChannel(0.5 * Eigen::Matrix3d::Identity(), Eigen::Vector3d(0, 0, 0.5)));
}

TEST(Tomography, IdentityHandEvaluation) {
  const auto p = tomography_probabilities([](const BlochVector& s) { return s; });
  EXPECT_DOUBLE_EQ(p(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(p(2, 3), 0.0);
  const auto c = tomography_exact([](const BlochVector& s) { return s; });
  EXPECT_TRUE(c.m().isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  EXPECT_LT(c.v().norm(), 1e-15);
}

TEST(Tomography, DensityMatrixProbabilities) {
  const Eigen::Vector3d n = Eigen::Vector3d(0.3, -0.5, 0.8).normalized();
  struct Case {
    AffineChannel channel;
    DensityMap map;
  };
  const Case cases[] = {{depolarizing(0.2), dm_depolarizing(0.2)},
                        {phase_damping(0.3, Eigen::Vector3d::UnitZ()),
                         dm_phase_damping(0.3, Eigen::Vector3d::UnitZ())},
                        {phase_damping(0.15, n), dm_phase_damping(0.15, n)},
                        {rotation_channel(n, 1.1), dm_rotation(n, 1.1)}};
  for (const auto& c : cases) {
    const ProbabilityTable ref = dm_probabilities(c.map);
    const ProbabilityTable got =
        tomography_probabilities([&](const BlochVector& s) { return apply(c.channel, s); });
    EXPECT_NEAR((ref - got).norm(), 0, 1e-14);
    const auto rec = reconstruct(ref);
    EXPECT_NEAR((rec.m - c.channel.m()).norm(), 0, 1e-14);
    EXPECT_NEAR(rec.v.norm(), 0, 1e-14);
  }
  const auto dep = reconstruct(dm_probabilities(dm_depolarizing(0.2)));
  EXPECT_TRUE(dep.m.isApprox(0.6 * Eigen::Matrix3d::Identity(), 1e-14));
}

TEST(TomographyProperty, ExactRoundTripOnRandomSpecs) {
  Rng rng(RngSeed{5});
  for (int i = 0; i < 100; ++i) {
    const auto c = build(random_spec(rng));
    const auto rec = tomography_exact(c);
    EXPECT_NEAR((rec.m() - c.m()).cwiseAbs().maxCoeff(), 0, 1e-10);
    EXPECT_NEAR((rec.v() - c.v()).cwiseAbs().maxCoeff(), 0, 1e-10);
    if (c.is_unital()) EXPECT_LT(rec.v().norm(), 1e-10);
  }
}

TEST(TomographySampled, IdentityWithinBinomialError) {
  Rng rng(RngSeed{6});
  const auto rec = tomography_sampled(AffineChannel(), 10000, rng);
  EXPECT_LT((rec.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 5 * 0.015);
}

TEST(TomographySampled, EntriesWithin5SigmaOfPropagation) {
  Rng rng(RngSeed{7});
  for (int i = 0; i < 20; ++i) {
    const auto c = build(random_spec(rng));
    const std::uint64_t shots = 10000;
    const auto rec = tomography_sampled(c, shots, rng);
    const auto sigma = binomial_stderr(
        tomography_probabilities([&](const BlochVector& s) { return apply(c, s); }), shots);
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_LE(std::abs(rec.m(r, k) - c.m()(r, k)), 5 * sigma.m_stderr(r, k) + 1e-12);
      }
      EXPECT_LE(std::abs(rec.v(r) - c.v()(r)), 5 * sigma.v_stderr(r) + 1e-12);
    }
  }
}

TEST(TomographySampled, ErrorShrinksWithShots) {
  const ProbabilityTable p = tomography_probabilities(
      [](const BlochVector& s) { return apply(depolarizing(0.2), s); });
  const auto a = binomial_stderr(p, 100), b = binomial_stderr(p, 10000);
  EXPECT_NEAR(a.m_stderr(0, 0) / b.m_stderr(0, 0), 10.0, 1e-12);
}

TEST(TomographySampled, Deterministic) {
  Rng a(RngSeed{8}), b(RngSeed{8});
  const auto c = phase_damping(0.2, Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(tomography_sampled(c, 500, a).m, tomography_sampled(c, 500, b).m);
}

TEST(PhaseDamping, TiltedAxisStructure) {
  const Eigen::Vector3d n = PureState(kPi / 6, 0).unit_vector();
  for (double lambda = 0.05; lambda < 0.46; lambda += 0.05) {
    const auto m = tomography_exact(phase_damping(lambda, n)).m();
    EXPECT_NEAR((m * n - n).norm(), 0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    EXPECT_NEAR(es.eigenvalues()(0), 1 - 2 * lambda, 1e-12);
    EXPECT_NEAR(es.eigenvalues()(1), 1 - 2 * lambda, 1e-12);
    EXPECT_NEAR(es.eigenvalues()(2), 1.0, 1e-12);
  }
}

}  // namespace
