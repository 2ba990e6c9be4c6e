#pragma once

// Quantum Zeno experiments on a resonantly driven qubit: fractionated
// pi-pulses interleaved with probes, and long alternating drive/probe
// trajectories analysed through their run-length statistics.

#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "qmsim/detection.hpp"
#include "qmsim/rng.hpp"
#include "qmsim/trajectory.hpp"

namespace qmsim::zeno {

/// cos^{2q}(theta/2): probability of q consecutive "stay" results when each
/// step rotates by theta and is followed by a projective probe.
double survival_probability(double theta_per_step, int q);

/// (1 - cos^n(theta/n))/2: population transferred after n pulses of area
/// theta/n each followed by a probe, irrespective of intermediate results.
double net_transition_probability(double theta_total, int n);

/// 1 - net_transition_probability.
inline double net_survival_probability(double theta_total, int n) {
  return 1.0 - net_transition_probability(theta_total, n);
}

struct ZenoConfig {
  int n_fractions = 1;
  double total_area = std::numbers::pi;
  int sequences = 1;
  double probe_gap = 3e-3;        // s, recorded only
  DetectionModel detection = DetectionModel::ideal();
  double prep_efficiency = 1.0;   // probability the ion starts in |0>
  double rabi = std::numbers::pi / 2.9e-3;  // rad/s; a full pi-pulse lasts 2.9 ms

  void validate() const;
  double area_per_pulse() const { return total_area / n_fractions; }
};

struct SequenceRecord {
  bool prepared = true;  // false: preparation failed, ion left in an undriven bright level
  std::vector<Observation> observations;

  bool all_off() const;
};

struct FractionatedResult {
  std::size_t all_off_count = 0;
  double survival_frequency = 0.0;  // all_off_count / sequences
  double stderr_frequency = 0.0;    // binomial standard error of the frequency
  double corrected_survival = 0.0;  // see correct_survival()
  std::vector<SequenceRecord> records;
};

/// Runs `config.sequences` independent sequences. Sequence i draws from
/// the stream derive_seed(seed, i), so results do not depend on order.
FractionatedResult simulate_fractionated_pi(const ZenoConfig& config, RngSeed seed);

/// Exact all-"off" frequency of the simulated protocol, including failed
/// preparation and read-out errors in both directions.
double expected_all_off_frequency(const ZenoConfig& config);

/// Undo imperfect preparation and read-out: subtract the contribution of
/// failed preparations, divide by prep_efficiency * eta0^N. Misreads of a
/// driven ion's "on" results are neglected (second order in 1 - eta1).
double correct_survival(double all_off_frequency, const ZenoConfig& config);

/// Alternating drive (resonant pulse of area theta) and +z probe, starting
/// from |0>; the probe result is read through `detection`.
Trajectory simulate_alternating(double theta_per_step, std::size_t n_pairs, RngSeed seed,
                                const DetectionModel& detection = DetectionModel::ideal());

// Statistics of maximal runs of equal observations. The trailing run is
// truncated by the end of the record and is not counted.
struct RunLengthStats {
  std::map<std::size_t, std::size_t> counts;  // run length -> number of runs
  std::size_t total_runs = 0;

  std::size_t count(std::size_t q) const;
  /// Normalized U(q) = count(q) / total_runs.
  double u(std::size_t q) const;
  /// U(q)/U(1), the estimator of cos^{2(q-1)}(theta/2).
  double ratio(std::size_t q) const;
  /// Delta-method standard error of ratio(q) for multinomial counts.
  double ratio_stderr(std::size_t q) const;
};

RunLengthStats run_length_distribution(std::span<const Observation> observations);
RunLengthStats run_length_distribution(const Trajectory& trajectory);

}  // namespace qmsim::zeno
