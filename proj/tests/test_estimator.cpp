#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>
#include <Eigen/Geometry>

#include "qmsim/errors.hpp"
#include "qmsim/estimator.hpp"

namespace {

using namespace qmsim;
using namespace qmsim::estimation;
constexpr double kPi = std::numbers::pi;

// Reference posterior: midpoint rule in (theta, phi) over the explicit
// product of Born likelihoods, with a brute-force argmax of the fidelity.
struct Measurement {
  Eigen::Vector3d m;
  int outcome;
};

class Oracle {
 public:
  Oracle(int n_theta = 150, int n_phi = 300) {
    const double dt = kPi / n_theta, dp = 2 * kPi / n_phi;
    for (int i = 0; i < n_theta; ++i) {
      const double t = (i + 0.5) * dt;
      for (int j = 0; j < n_phi; ++j) {
        const double p = (j + 0.5) * dp;
        nodes_.emplace_back(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
        weights_.push_back(std::sin(t) * dt * dp);
      }
    }
    candidates_ = fibonacci_sphere(3000);
  }

  std::vector<double> posterior(const std::vector<Measurement>& ms) const {
    std::vector<double> w(nodes_.size(), 1.0);
    double norm = 0;
    for (size_t k = 0; k < nodes_.size(); ++k) {
      for (const auto& x : ms) w[k] *= 0.5 * (1 + x.outcome * x.m.dot(nodes_[k]));
      norm += w[k] * weights_[k];
    }
    for (double& v : w) v /= norm;
    return w;
  }

  double fidelity(const std::vector<double>& w, const Eigen::Vector3d& n) const {
    double f = 0;
    for (size_t k = 0; k < nodes_.size(); ++k) {
      f += w[k] * weights_[k] * 0.5 * (1 + n.dot(nodes_[k]));
    }
    return f;
  }

  double best_fidelity(const std::vector<double>& w) const {
    double best = 0;
    for (const auto& c : candidates_) best = std::max(best, fidelity(w, c));
    return best;
  }

  double probability(const std::vector<Measurement>& ms, const Eigen::Vector3d& m) const {
    return fidelity(posterior(ms), m);
  }

  double expected_mean_fidelity(std::vector<Measurement> ms, const Eigen::Vector3d& m) const {
    const double p = probability(ms, m);
    ms.push_back({m, +1});
    const double f_plus = best_fidelity(posterior(ms));
    ms.back().outcome = -1;
    const double f_minus = best_fidelity(posterior(ms));
    return p * f_plus + (1 - p) * f_minus;
  }

 private:
  std::vector<Eigen::Vector3d> nodes_;
  std::vector<double> weights_;
  std::vector<Eigen::Vector3d> candidates_;
};

const Oracle& oracle() {
  static const Oracle o;
  return o;
}

std::shared_ptr<const SphereGrid> default_grid() {
  static const auto g = std::make_shared<const SphereGrid>();
  return g;
}

SphereDistribution posterior(const std::vector<Measurement>& ms,
                             std::shared_ptr<const SphereGrid> grid = default_grid()) {
  SphereDistribution d = uniform_prior(std::move(grid));
  for (const auto& x : ms) d = bayes_update(d, x.m, x.outcome);
  return d;
}

std::vector<Measurement> random_record(Rng& rng, int n) {
  std::vector<Measurement> ms;
  for (int i = 0; i < n; ++i) ms.push_back({rng.unit_vector(), rng.bernoulli(0.5) ? 1 : -1});
  return ms;
}

const Eigen::Vector3d kX = Eigen::Vector3d::UnitX();
const Eigen::Vector3d kY = Eigen::Vector3d::UnitY();
const Eigen::Vector3d kZ = Eigen::Vector3d::UnitZ();

TEST(SphereGrid, QuadratureIntegratesPolynomials) {
  const SphereGrid g(16, 32);
  double area = 0, z4 = 0, x2y2 = 0, x = 0;
  for (size_t k = 0; k < g.size(); ++k) {
    const auto& s = g.node(k);
    area += g.weight(k);
    z4 += g.weight(k) * std::pow(s.z(), 4);
    x2y2 += g.weight(k) * s.x() * s.x() * s.y() * s.y();
    x += g.weight(k) * s.x();
  }
  EXPECT_NEAR(area, 4 * kPi, 1e-12);
  EXPECT_NEAR(z4, 4 * kPi / 5, 1e-12);
  EXPECT_NEAR(x2y2, 4 * kPi / 15, 1e-12);
  EXPECT_NEAR(x, 0, 1e-12);
}

TEST(SphereGrid, DegenerateGridRejected) {
  EXPECT_THROW(SphereGrid(2, 2), DomainError);
  EXPECT_THROW(uniform_prior(std::make_shared<const SphereGrid>(1, 4)), DomainError);
}

TEST(GaussLegendre, FivePointRule) {
  const auto gl = gauss_legendre(5);
  ASSERT_EQ(gl.nodes.size(), 5u);
  EXPECT_NEAR(gl.nodes[4], 0.9061798459386640, 1e-14);
  EXPECT_NEAR(gl.weights[4], 0.2369268850561891, 1e-14);
  EXPECT_NEAR(gl.nodes[2], 0.0, 1e-15);
  EXPECT_NEAR(gl.weights[2], 128.0 / 225.0, 1e-14);
}

TEST(UniformPrior, FlatEverything) {
  const auto d = uniform_prior(default_grid());
  EXPECT_NEAR(d.integral(), 1.0, 1e-12);
  Rng rng(RngSeed{1});
  const FidelityMap f(d);
  for (int i = 0; i < 20; ++i) {
    const auto m = rng.unit_vector();
    EXPECT_NEAR(outcome_probability(d, m), 0.5, 1e-12);
    EXPECT_NEAR(f(m), 0.5, 1e-12);
    EXPECT_NEAR(expected_mean_fidelity(d, m), 2.0 / 3.0, 2e-3);
  }
  const auto est = estimate_state(d);
  EXPECT_TRUE(est.flat);
  EXPECT_EQ(est.direction.theta(), 0.0);
  EXPECT_NEAR(est.fidelity, 0.5, 1e-12);
}

TEST(BayesUpdate, OneResultGivesCosSquaredDensity) {
  const auto d = posterior({{kZ, +1}});
  const auto& g = d.grid();
  for (size_t k = 0; k < g.size(); k += 97) {
    const double c = std::cos(g.theta(k) / 2);
    EXPECT_NEAR(d.value(k), c * c / (2 * kPi), 1e-12);
  }
  EXPECT_NEAR(outcome_probability(d, kZ), 2.0 / 3.0, 1e-12);
}

TEST(BayesUpdate, TwoResultsGiveFourthPower) {
  const auto d = posterior({{kZ, +1}, {kZ, +1}});
  const auto& g = d.grid();
  // integral of cos^4(theta/2) over the sphere is 4 pi / 3
  for (size_t k = 0; k < g.size(); k += 89) {
    const double c = std::cos(g.theta(k) / 2);
    EXPECT_NEAR(d.value(k), std::pow(c, 4) * 3 / (4 * kPi), 1e-12);
  }
}

TEST(BayesUpdate, OppositeResultsAreSymmetric) {
  const auto d = posterior({{kZ, +1}, {kZ, -1}});
  const auto& g = d.grid();
  const int np = g.n_phi(), nt = g.n_theta();
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      EXPECT_NEAR(d.value(i * np + j), d.value((nt - 1 - i) * np + j), 1e-12);
    }
  }
}

TEST(BayesUpdate, ZeroProbabilityOutcomeThrows) {
  auto d = uniform_prior(std::make_shared<const SphereGrid>(8, 8));
  std::vector<double> spike(d.grid().size(), 0.0);
  spike[0] = 1.0;
  auto peaked = SphereDistribution::from_unnormalized(d.grid_ptr(), spike);
  EXPECT_THROW(bayes_update(peaked, d.grid().node(0), -1), NumericalError);
}

TEST(BayesProperty, NormalizationAndAntipodes) {
  Rng rng(RngSeed{2});
  for (int trial = 0; trial < 10; ++trial) {
    SphereDistribution d = uniform_prior(default_grid());
    for (int n = 0; n < 12; ++n) {
      const auto m = rng.unit_vector();
      const int o = rng.bernoulli(outcome_probability(d, m)) ? 1 : -1;
      EXPECT_NEAR(outcome_probability(d, m) + outcome_probability(d, Eigen::Vector3d(-m)), 1.0,
                  1e-10);
      const auto a = bayes_update(d, m, o);
      const auto b = bayes_update(d, Eigen::Vector3d(-m), -o);
      for (size_t k = 0; k < a.values().size(); ++k) EXPECT_NEAR(a.value(k), b.value(k), 1e-12);
      d = a;
      EXPECT_NEAR(d.integral(), 1.0, 1e-9);
    }
  }
}

TEST(EstimateState, AfterOnePlusZ) {
  const auto est = estimate_state(posterior({{kZ, +1}}));
  EXPECT_NEAR(est.direction.theta(), 0.0, 1e-9);
  EXPECT_NEAR(est.fidelity, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(oracle().best_fidelity(oracle().posterior({{kZ, +1}})), 2.0 / 3.0, 1e-3);
}

TEST(EstimateState, SpikeIsRecovered) {
  auto grid = default_grid();
  std::vector<double> spike(grid->size(), 0.0);
  const size_t k = 2345;
  spike[k] = 1.0;
  const auto est = estimate_state(SphereDistribution::from_unnormalized(grid, spike));
  EXPECT_NEAR((est.direction.unit_vector() - grid->node(k)).norm(), 0, 1e-9);
  EXPECT_NEAR(est.fidelity, 1.0, 1e-12);
}

TEST(EstimateState, MatchesBruteForceArgmax) {
  Rng rng(RngSeed{3});
  for (int trial = 0; trial < 5; ++trial) {
    const auto ms = random_record(rng, 6);
    const auto d = posterior(ms);
    const auto est = estimate_state(d);
    const FidelityMap f(d);
    Eigen::Vector3d best = kZ;
    for (const auto& c : fibonacci_sphere(4000)) {
      if (f(c) > f(best)) best = c;
    }
    EXPECT_LT(std::acos(std::min(1.0, best.dot(est.direction.unit_vector()))), 0.05);
    EXPECT_NEAR(f(est.direction), est.fidelity, 1e-12);
    EXPECT_GE(est.fidelity + 1e-12, f(best));
    EXPECT_NEAR(est.fidelity, oracle().best_fidelity(oracle().posterior(ms)), 1e-3);
  }
}

TEST(EstimateStateProperty, ArgmaxInvariantUnderScaling) {
  Rng rng(RngSeed{4});
  const auto d = posterior(random_record(rng, 5));
  for (double c : {1e-6, 3.0, 1e8}) {
    std::vector<double> scaled = d.values();
    for (double& v : scaled) v *= c;
    const auto e = estimate_state(SphereDistribution::from_unnormalized(d.grid_ptr(), scaled));
    EXPECT_NEAR((e.direction.unit_vector() - estimate_state(d).direction.unit_vector()).norm(), 0,
                1e-12);
  }
}

TEST(ExpectedMeanFidelity, MatchesOracle) {
  Rng rng(RngSeed{5});
  for (int trial = 0; trial < 4; ++trial) {
    const auto ms = random_record(rng, trial + 1);
    const auto d = posterior(ms);
    for (int j = 0; j < 3; ++j) {
      const auto m = rng.unit_vector();
      const double value = expected_mean_fidelity(d, m);
      EXPECT_NEAR(value, oracle().expected_mean_fidelity(ms, m), 1.5e-3);
      EXPECT_NEAR(value, expected_mean_fidelity(d, Eigen::Vector3d(-m)), 1e-14);
    }
  }
}

TEST(ExpectedMeanFidelity, SecondDirectionClosedForm) {
  const auto d = posterior({{kZ, +1}});
  for (int i = 0; i < 10; ++i) {
    const double alpha = kPi * i / 9;
    const Eigen::Vector3d m(std::sin(alpha), 0, std::cos(alpha));
    const double expect = 0.5 + std::cos(alpha / 2 - kPi / 4) / std::sqrt(18.0);
    EXPECT_NEAR(expected_mean_fidelity(d, m), expect, 5e-3) << alpha;
  }
  EXPECT_NEAR(expected_mean_fidelity(d, kX), 0.7357, 1e-4);
  EXPECT_NEAR(expected_mean_fidelity(d, kZ), 2.0 / 3.0, 1e-12);
}

TEST(OptimalDirection, UniformPriorIsFlat) {
  const auto c = optimal_next_direction(uniform_prior(default_grid()));
  EXPECT_TRUE(c.flat);
  EXPECT_LT(c.coarse_spread, 1e-6);
  EXPECT_EQ(c.direction.theta(), 0.0);
  EXPECT_NEAR(c.objective, 2.0 / 3.0, 2e-3);
}

TEST(OptimalDirection, SecondIsOrthogonal) {
  for (int o : {+1, -1}) {
    const auto c = optimal_next_direction(posterior({{kZ, o}}));
    EXPECT_FALSE(c.flat);
    EXPECT_LT(std::abs(c.direction.unit_vector().dot(kZ)), 0.05);
    EXPECT_LE(c.direction.theta(), kPi / 2);
    EXPECT_NEAR(c.objective, 0.5 + 1 / std::sqrt(18.0), 5e-3);
  }
}

TEST(OptimalDirection, ThirdIsOrthogonalToBoth) {
  const auto c = optimal_next_direction(posterior({{kZ, +1}, {kX, +1}}));
  EXPECT_GT(std::abs(c.direction.unit_vector().dot(kY)), std::cos(0.05));
  EXPECT_NEAR(c.objective, 0.5 + 1 / std::sqrt(12.0), 5e-3);
}

TEST(EstimatorProperty, RotationalCovariance) {
  Rng rng(RngSeed{6});
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d r =
        Eigen::AngleAxisd(2 * kPi * rng.uniform(), rng.unit_vector()).toRotationMatrix();
    auto ms = random_record(rng, 4);
    auto rotated = ms;
    for (auto& x : rotated) x.m = r * x.m;
    const auto e = estimate_state(posterior(ms)).direction.unit_vector();
    const auto er = estimate_state(posterior(rotated)).direction.unit_vector();
    EXPECT_LT((er - r * e).norm(), 0.02);
    const auto c = optimal_next_direction(posterior(ms)).direction.unit_vector();
    const auto cr = optimal_next_direction(posterior(rotated)).direction.unit_vector();
    EXPECT_GT(std::abs(cr.dot(r * c)), std::cos(0.05));
  }
}

TEST(Imperfections, BlochForm) {
  const BlochVector s(0.3, -0.2, 0.6);
  EXPECT_EQ(apply_imperfections(s, {0, 0}).vec(), s.vec());
  EXPECT_NEAR(apply_imperfections(BlochVector(0, 0, 1), {0.1, 0}).z(), 0.8, 1e-15);
  EXPECT_NEAR(apply_imperfections(BlochVector(0, 0, 0), {0, 0.05}).z(), 0.1, 1e-15);
  EXPECT_THROW(apply_imperfections(BlochVector(0, 0, 1), {0, 0.05}), InvariantViolation);
}

TEST(Imperfections, DensityMatrixReference) {
  using Mat2 = Eigen::Matrix2cd;
  using cplx = std::complex<double>;
  Mat2 sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  Rng rng(RngSeed{7});
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d s = rng.unit_vector();
    const double lambda = 0.1 + 0.3 * rng.uniform();
    const double deta = (rng.uniform() - 0.5) * 0.2;
    const Mat2 rho = 0.5 * (Mat2::Identity() + s.x() * sx + s.y() * sy + s.z() * sz);
    const Mat2 out = (1 - 2 * lambda) * rho + lambda * Mat2::Identity() + deta * sz;
    const Eigen::Vector3d ref((out * sx).trace().real(), (out * sy).trace().real(),
                              (out * sz).trace().real());
    EXPECT_NEAR((apply_imperfections(BlochVector(s), {lambda, deta}).vec() - ref).norm(), 0,
                1e-14);
  }
}

TEST(Imperfections, Validation) {
  EXPECT_THROW(ImperfectionParams({0.6, 0}).validate(), DomainError);
  EXPECT_THROW(ImperfectionParams({0.0, 0.3}).validate(), DomainError);
  EXPECT_THROW(ImperfectionParams({0.0, 0.1}).validate(), DomainError);
  EXPECT_NO_THROW(ImperfectionParams({0.1, 0.1}).validate());
  const auto p = ImperfectionParams::from_detection(0.05, DetectionModel::from_efficiencies(0.9, 0.95));
  EXPECT_NEAR(p.delta_eta, 0.025, 1e-15);
}

TEST(RunEstimation, FixedAxesCycle) {
  StrategyConfig cfg;
  cfg.kind = Strategy::fixed_axes;
  cfg.n_measurements = 7;
  cfg.grid_theta = 16;
  cfg.grid_phi = 32;
  Rng rng(RngSeed{8});
  const auto r = run_estimation(PureState(1.0, 1.0), cfg, {}, rng);
  const Eigen::Vector3d axes[3] = {kX, kY, kZ};
  ASSERT_EQ(r.trajectory.steps.size(), 7u);
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR((r.trajectory.steps[i].direction.unit_vector() - axes[i % 3]).norm(), 0, 1e-12);
  }
}

TEST(RunEstimation, SingleMeasurementMeanIsTwoThirds) {
  for (auto kind : {Strategy::self_learning, Strategy::random, Strategy::fixed_axes}) {
    StrategyConfig cfg;
    cfg.kind = kind;
    cfg.n_measurements = 1;
    cfg.grid_theta = 16;
    cfg.grid_phi = 32;
    const auto s = mean_fidelity_experiment(4000, cfg, {}, RngSeed{9});
    EXPECT_NEAR(s.mean, 2.0 / 3.0, 4 * s.stderr_mean);
  }
}

TEST(RunEstimation, ExperimentIsDeterministic) {
  StrategyConfig cfg;
  cfg.n_measurements = 4;
  cfg.grid_theta = 16;
  cfg.grid_phi = 32;
  const auto a = mean_fidelity_experiment(20, cfg, {}, RngSeed{10});
  const auto b = mean_fidelity_experiment(20, cfg, {}, RngSeed{10});
  EXPECT_EQ(a.mean, b.mean);
  for (size_t i = 0; i < a.per_state.size(); ++i) {
    EXPECT_EQ(a.per_state[i].fidelity, b.per_state[i].fidelity);
  }
}

TEST(RunEstimation, PoleIsRecoveredFromFixedAxes) {
  StrategyConfig cfg;
  cfg.kind = Strategy::fixed_axes;
  cfg.n_measurements = 30;
  Rng rng(RngSeed{11});
  const auto r = run_estimation(PureState(0, 0), cfg, {}, rng);
  EXPECT_GT(r.fidelity, 0.8);
}

}  // namespace
