#include "qmsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmsim/errors.hpp"

namespace qmsim::estimation {

namespace {

constexpr double kFlatTolerance = 1e-12;
constexpr double kDegenerateProbability = 1e-14;

const Eigen::Vector3d kPlusZ(0.0, 0.0, 1.0);

// Orthonormal pair spanning the tangent plane at unit vector m.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const Eigen::Vector3d& m) {
  const Eigen::Vector3d helper =
      std::abs(m.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = m.cross(helper).normalized();
  Eigen::Vector3d e2 = m.cross(e1);
  return {e1, e2};
}

Eigen::Vector3d upper_hemisphere(const Eigen::Vector3d& m) {
  if (m.z() < 0.0) return -m;
  return m;
}

}  // namespace

Moments moments(const SphereDistribution& dist) {
  const SphereGrid& g = dist.grid();
  Moments out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.weight(k) * dist.value(k);
    const Eigen::Vector3d& s = g.node(k);
    out.mean += w * s;
    out.second.noalias() += w * (s * s.transpose());
  }
  return out;
}

SphereDistribution uniform_prior(std::shared_ptr<const SphereGrid> grid) {
  if (!grid) throw DomainError("null sphere grid");
  std::vector<double> values(grid->size(), 1.0 / (4.0 * std::numbers::pi));
  return SphereDistribution::from_unnormalized(std::move(grid), std::move(values));
}

double outcome_probability(const SphereDistribution& dist, const Eigen::Vector3d& direction) {
  const SphereGrid& g = dist.grid();
  double p = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    p += g.weight(k) * dist.value(k) * 0.5 * (1.0 + direction.dot(g.node(k)));
  }
  return std::clamp(p, 0.0, 1.0);
}

double outcome_probability(const SphereDistribution& dist, const PureState& direction) {
  return outcome_probability(dist, direction.unit_vector());
}

SphereDistribution bayes_update(const SphereDistribution& dist, const Eigen::Vector3d& direction,
                                int outcome) {
  if (outcome != 1 && outcome != -1) throw DomainError("outcome must be +1 or -1");
  const Eigen::Vector3d m = outcome > 0 ? direction : Eigen::Vector3d(-direction);
  const SphereGrid& g = dist.grid();
  std::vector<double> values(g.size());
  double p = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    values[k] = dist.value(k) * 0.5 * (1.0 + m.dot(g.node(k)));
    if (values[k] < 0.0) values[k] = 0.0;
    p += g.weight(k) * values[k];
  }
  if (!(p > kDegenerateProbability)) {
    throw NumericalError("measurement outcome has zero probability under the prior", p);
  }
  for (double& v : values) v /= p;
  return SphereDistribution::from_unnormalized(dist.grid_ptr(), std::move(values));
}

SphereDistribution bayes_update(const SphereDistribution& dist, const PureState& direction,
                                int outcome) {
  return bayes_update(dist, direction.unit_vector(), outcome);
}

FidelityMap::FidelityMap(const SphereDistribution& dist)
    : grid_(dist.grid_ptr()), values_(dist.values()) {}

double FidelityMap::operator()(const Eigen::Vector3d& unit) const {
  double f = 0.0;
  for (std::size_t k = 0; k < grid_->size(); ++k) {
    f += grid_->weight(k) * values_[k] * 0.5 * (1.0 + unit.dot(grid_->node(k)));
  }
  return f;
}

StateEstimate estimate_state(const SphereDistribution& dist) {
  const Eigen::Vector3d mu = moments(dist).mean;
  const double len = mu.norm();
  StateEstimate est;
  if (len < kFlatTolerance) {
    est.direction = PureState(0.0, 0.0);
    est.fidelity = 0.5;
    est.flat = true;
    return est;
  }
  est.direction = PureState::from_vector(mu);
  est.fidelity = 0.5 * (1.0 + len);
  return est;
}

double expected_mean_fidelity(const Moments& m, const Eigen::Vector3d& direction) {
  const Eigen::Vector3d sm = m.second * direction;
  return 0.5 + 0.25 * ((m.mean + sm).norm() + (m.mean - sm).norm());
}

double expected_mean_fidelity(const SphereDistribution& dist, const Eigen::Vector3d& direction) {
  return expected_mean_fidelity(moments(dist), direction);
}

double expected_mean_fidelity(const SphereDistribution& dist, const PureState& direction) {
  return expected_mean_fidelity(dist, direction.unit_vector());
}

void OptimizerSettings::validate() const {
  if (coarse_points < 1) throw DomainError("coarse_points must be positive");
  if (refinement_rounds < 0) throw DomainError("refinement_rounds must be non-negative");
  if (local_grid < 3) throw DomainError("local_grid must be at least 3");
}

DirectionChoice optimal_next_direction(const SphereDistribution& dist,
                                       const OptimizerSettings& settings) {
  settings.validate();
  const Moments mom = moments(dist);
  const auto coarse = fibonacci_sphere(settings.coarse_points);

  double best_value = -1.0;
  double worst_value = 2.0;
  Eigen::Vector3d best = coarse.front();
  for (const auto& c : coarse) {
    const double f = expected_mean_fidelity(mom, c);
    if (f > best_value) {
      best_value = f;
      best = c;
    }
    worst_value = std::min(worst_value, f);
  }

  DirectionChoice choice;
  choice.coarse_spread = best_value - worst_value;
  if (choice.coarse_spread < kFlatTolerance) {
    choice.direction = PureState(0.0, 0.0);
    choice.objective = expected_mean_fidelity(mom, kPlusZ);
    choice.flat = true;
    return choice;
  }

  double h = std::sqrt(4.0 * std::numbers::pi / settings.coarse_points);
  const int k = settings.local_grid;
  for (int round = 0; round < settings.refinement_rounds; ++round) {
    const auto [e1, e2] = tangent_basis(best);
    const Eigen::Vector3d center = best;
    for (int i = 0; i < k; ++i) {
      const double a = -h + 2.0 * h * i / (k - 1);
      for (int j = 0; j < k; ++j) {
        const double b = -h + 2.0 * h * j / (k - 1);
        const Eigen::Vector3d c = (center + a * e1 + b * e2).normalized();
        const double f = expected_mean_fidelity(mom, c);
        if (f > best_value) {
          best_value = f;
          best = c;
        }
      }
    }
    h = 2.0 * h / (k - 1);
  }

  choice.direction = PureState::from_vector(upper_hemisphere(best));
  choice.objective = best_value;
  return choice;
}

namespace {

void validate_ranges(const ImperfectionParams& p) {
  if (!(p.lambda >= 0.0 && p.lambda <= 0.5)) throw DomainError("lambda must lie in [0, 1/2]");
  if (!(p.delta_eta >= -0.25 && p.delta_eta <= 0.25)) {
    throw DomainError("delta_eta must lie in [-1/4, 1/4]");
  }
}

}  // namespace

void ImperfectionParams::validate() const {
  validate_ranges(*this);
  if (std::abs(1.0 - 2.0 * lambda) + 2.0 * std::abs(delta_eta) > 1.0 + 1e-12) {
    throw DomainError("imperfection parameters map states outside the Bloch ball");
  }
}

ImperfectionParams ImperfectionParams::from_detection(double lambda,
                                                      const DetectionModel& detection) {
  ImperfectionParams p{lambda, detection.delta_eta()};
  p.validate();
  return p;
}

BlochVector apply_imperfections(const BlochVector& s, const ImperfectionParams& params) {
  validate_ranges(params);
  const double shrink = 1.0 - 2.0 * params.lambda;
  const Eigen::Vector3d out(shrink * s.x(), shrink * s.y(),
                            shrink * s.z() + 2.0 * params.delta_eta);
  if (out.norm() > 1.0 + kBallTolerance) {
    throw InvariantViolation("imperfection channel left the Bloch ball");
  }
  return BlochVector(out);
}

void StrategyConfig::validate() const {
  if (n_measurements < 1) throw DomainError("n_measurements must be at least 1");
  optimizer.validate();
  if (grid_theta < 1 || grid_phi < 1) throw DomainError("grid sizes must be positive");
}

EstimationResult run_estimation(const PureState& true_state, const StrategyConfig& config,
                                const ImperfectionParams& imperfections, Rng& rng,
                                std::shared_ptr<const SphereGrid> grid) {
  config.validate();
  imperfections.validate();
  if (!grid) grid = std::make_shared<const SphereGrid>(config.grid_theta, config.grid_phi);

  const BlochVector prepared =
      apply_imperfections(BlochVector(true_state.unit_vector()), imperfections);
  static const Eigen::Vector3d kAxes[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                           Eigen::Vector3d::UnitZ()};

  EstimationResult result;
  result.trajectory.config = {{"theta", true_state.theta()},
                              {"phi", true_state.phi()},
                              {"n", static_cast<double>(config.n_measurements)},
                              {"strategy", static_cast<double>(config.kind)},
                              {"lambda", imperfections.lambda},
                              {"delta_eta", imperfections.delta_eta}};
  result.trajectory.steps.reserve(static_cast<std::size_t>(config.n_measurements));

  SphereDistribution dist = uniform_prior(grid);
  for (int n = 0; n < config.n_measurements; ++n) {
    Eigen::Vector3d m;
    switch (config.kind) {
      case Strategy::self_learning:
        m = optimal_next_direction(dist, config.optimizer).direction.unit_vector();
        break;
      case Strategy::random:
        m = rng.unit_vector();
        break;
      case Strategy::fixed_axes:
        m = kAxes[n % 3];
        break;
    }
    const int outcome = rng.bernoulli(born_probability(prepared, m)) ? +1 : -1;
    dist = bayes_update(dist, m, outcome);
    result.trajectory.steps.push_back(
        {std::nullopt, PureState::from_vector(m), outcome,
         outcome > 0 ? Observation::off : Observation::on, std::nullopt});
  }

  const StateEstimate est = estimate_state(dist);
  result.estimate = est.direction;
  result.fidelity = 0.5 * (1.0 + est.direction.unit_vector().dot(true_state.unit_vector()));
  return result;
}

ExperimentSummary mean_fidelity_experiment(int num_states, const StrategyConfig& config,
                                           const ImperfectionParams& imperfections,
                                           RngSeed seed) {
  if (num_states < 1) throw DomainError("num_states must be at least 1");
  config.validate();
  imperfections.validate();
  const auto grid = std::make_shared<const SphereGrid>(config.grid_theta, config.grid_phi);

  ExperimentSummary summary;
  summary.per_state.reserve(static_cast<std::size_t>(num_states));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < num_states; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const PureState truth = PureState::from_vector(rng.unit_vector());
    EstimationResult r = run_estimation(truth, config, imperfections, rng, grid);
    r.trajectory.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    sum += r.fidelity;
    sum_sq += r.fidelity * r.fidelity;
    summary.per_state.push_back({truth, r.estimate, r.fidelity});
  }
  const double n = num_states;
  summary.mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * summary.mean * summary.mean) / (n - 1)) : 0.0;
  summary.stderr_mean = std::sqrt(var / n);
  return summary;
}

}  // namespace qmsim::estimation
