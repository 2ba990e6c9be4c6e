#pragma once

// Bayesian estimation of an unknown pure qubit state from single-copy
// projective measurements, with adaptive ("self-learning"), random and
// fixed-axis choices of measurement direction.
//
// The knowledge about the state is a density w on the Bloch sphere. For
// any w the fidelity of a candidate |n> is (1 + n.mu)/2 with mu the mean
// of w, so the best estimate is mu/|mu|. The expected mean fidelity after
// measuring along m depends on w only through mu and the second moment
// matrix Sigma = E[s s^T]:  1/2 + (|mu + Sigma m| + |mu - Sigma m|)/4.

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qmsim/bloch.hpp"
#include "qmsim/detection.hpp"
#include "qmsim/rng.hpp"
#include "qmsim/sphere.hpp"
#include "qmsim/trajectory.hpp"

namespace qmsim::estimation {

struct Moments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
};

Moments moments(const SphereDistribution& dist);

/// Constant density 1/(4 pi).
SphereDistribution uniform_prior(std::shared_ptr<const SphereGrid> grid);

/// Probability that a measurement along `direction` yields +1.
double outcome_probability(const SphereDistribution& dist, const Eigen::Vector3d& direction);
double outcome_probability(const SphereDistribution& dist, const PureState& direction);

/// Posterior after observing `outcome` (+1 or -1) along `direction`.
/// Throws NumericalError if the observed outcome had (numerically) zero probability.
SphereDistribution bayes_update(const SphereDistribution& dist, const Eigen::Vector3d& direction,
                                int outcome);
SphereDistribution bayes_update(const SphereDistribution& dist, const PureState& direction,
                                int outcome);

/// F(n) = integral of w(s') |<n|s'>|^2, evaluated by quadrature over the grid.
class FidelityMap {
 public:
  explicit FidelityMap(const SphereDistribution& dist);

  double operator()(const Eigen::Vector3d& unit) const;
  double operator()(const PureState& p) const { return (*this)(p.unit_vector()); }

 private:
  std::shared_ptr<const SphereGrid> grid_;
  std::vector<double> values_;
};

inline FidelityMap fidelity_map(const SphereDistribution& dist) { return FidelityMap(dist); }

struct StateEstimate {
  PureState direction{0.0, 0.0};
  double fidelity = 0.5;  // F at the estimate
  bool flat = false;      // fidelity map constant; +z returned
};

/// Maximizer of the fidelity map, mu/|mu|. A constant map yields +z.
StateEstimate estimate_state(const SphereDistribution& dist);

double expected_mean_fidelity(const Moments& m, const Eigen::Vector3d& direction);
double expected_mean_fidelity(const SphereDistribution& dist, const Eigen::Vector3d& direction);
double expected_mean_fidelity(const SphereDistribution& dist, const PureState& direction);

struct OptimizerSettings {
  int coarse_points = 400;    // Fibonacci candidates
  int refinement_rounds = 2;  // local grid shrinking rounds
  int local_grid = 9;         // candidates per tangent axis and round

  void validate() const;
};

struct DirectionChoice {
  PureState direction{0.0, 0.0};
  double objective = 0.0;       // expected mean fidelity achieved
  double coarse_spread = 0.0;   // max - min of the objective over the coarse set
  bool flat = false;            // objective constant; +z returned
};

/// Measurement axis maximizing the expected mean fidelity. The objective
/// is even in the direction; the representative with theta <= pi/2 is returned.
DirectionChoice optimal_next_direction(const SphereDistribution& dist,
                                       const OptimizerSettings& settings = {});

/// Depolarization plus read-out bias: rho -> (1 - 2 lambda) rho + lambda I + delta_eta sigma_z.
struct ImperfectionParams {
  double lambda = 0.0;
  double delta_eta = 0.0;

  /// Requires lambda in [0, 1/2], delta_eta in [-1/4, 1/4], |1 - 2 lambda| + 2|delta_eta| <= 1.
  void validate() const;
  /// delta_eta taken from the read-out efficiencies.
  static ImperfectionParams from_detection(double lambda, const DetectionModel& detection);
};

/// Only the parameter ranges are checked here; a result outside the ball
/// throws InvariantViolation.
BlochVector apply_imperfections(const BlochVector& s, const ImperfectionParams& params);

enum class Strategy { self_learning, random, fixed_axes };

struct StrategyConfig {
  Strategy kind = Strategy::self_learning;
  int n_measurements = 1;
  OptimizerSettings optimizer{};
  int grid_theta = 64;
  int grid_phi = 128;

  void validate() const;
};

struct EstimationResult {
  PureState estimate{0.0, 0.0};
  double fidelity = 0.0;  // overlap with the intended pure state
  Trajectory trajectory;
};

/// Measures `n_measurements` fresh copies of `true_state`, each passed
/// through the imperfection channel. The estimator is not told the
/// imperfections. `grid` may be shared between runs; if null one is built.
EstimationResult run_estimation(const PureState& true_state, const StrategyConfig& config,
                                const ImperfectionParams& imperfections, Rng& rng,
                                std::shared_ptr<const SphereGrid> grid = nullptr);

struct StateOutcome {
  PureState true_state{0.0, 0.0};
  PureState estimate{0.0, 0.0};
  double fidelity = 0.0;
};

struct ExperimentSummary {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<StateOutcome> per_state;
};

/// Mean fidelity over `num_states` states drawn uniformly on the sphere.
/// State i uses the stream derive_seed(seed, i) for its draw and its measurements.
ExperimentSummary mean_fidelity_experiment(int num_states, const StrategyConfig& config,
                                           const ImperfectionParams& imperfections,
                                           RngSeed seed);

}  // namespace qmsim::estimation
