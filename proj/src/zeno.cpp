#include "qmsim/zeno.hpp"

#include <algorithm>
#include <cmath>

#include "qmsim/bloch.hpp"
#include "qmsim/errors.hpp"

namespace qmsim::zeno {

double survival_probability(double theta_per_step, int q) {
  if (q < 0) throw DomainError("run length must be non-negative");
  const double c = std::cos(0.5 * theta_per_step);
  return std::pow(c * c, q);
}

double net_transition_probability(double theta_total, int n) {
  if (n < 1) throw DomainError("number of pulses must be at least 1");
  return 0.5 * (1.0 - std::pow(std::cos(theta_total / n), n));
}

void ZenoConfig::validate() const {
  if (n_fractions < 1) throw DomainError("n_fractions must be at least 1");
  if (sequences < 1) throw DomainError("sequences must be at least 1");
  if (!(prep_efficiency > 0.0 && prep_efficiency <= 1.0)) {
    throw DomainError("prep_efficiency must lie in (0, 1]");
  }
  if (!(rabi > 0.0)) throw DomainError("rabi must be positive");
  if (!(total_area >= 0.0)) throw DomainError("total_area must be non-negative");
}

bool SequenceRecord::all_off() const {
  return std::all_of(observations.begin(), observations.end(),
                     [](Observation o) { return o == Observation::off; });
}

FractionatedResult simulate_fractionated_pi(const ZenoConfig& config, RngSeed seed) {
  config.validate();
  const DrivePulse pulse = resonant_pulse(config.area_per_pulse(), config.rabi);
  const PureState probe_axis(0.0, 0.0);

  FractionatedResult result;
  result.records.reserve(static_cast<std::size_t>(config.sequences));
  for (int i = 0; i < config.sequences; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    SequenceRecord record;
    record.prepared = rng.bernoulli(config.prep_efficiency);
    record.observations.reserve(static_cast<std::size_t>(config.n_fractions));

    BlochVector state(0.0, 0.0, 1.0);
    for (int k = 0; k < config.n_fractions; ++k) {
      bool is_one = true;
      if (record.prepared) {
        state = evolve(state, pulse);
        const MeasurementResult m = measure(state, probe_axis, rng);
        state = m.collapsed;
        is_one = m.outcome < 0;
      }
      record.observations.push_back(detect(is_one, config.detection, rng).observed);
    }
    if (record.all_off()) ++result.all_off_count;
    result.records.push_back(std::move(record));
  }

  const double n = config.sequences;
  result.survival_frequency = result.all_off_count / n;
  result.stderr_frequency =
      std::sqrt(result.survival_frequency * (1.0 - result.survival_frequency) / n);
  result.corrected_survival = correct_survival(result.survival_frequency, config);
  return result;
}

double expected_all_off_frequency(const ZenoConfig& config) {
  config.validate();
  const double c = std::cos(0.5 * config.area_per_pulse());
  const double stay = c * c;
  const double flip = 1.0 - stay;
  const double read_off0 = config.detection.eta0();
  const double read_off1 = 1.0 - config.detection.eta1();

  // Weights of the true state after each probe, restricted to all-"off" records.
  double w0 = 1.0;
  double w1 = 0.0;
  for (int k = 0; k < config.n_fractions; ++k) {
    const double n0 = (w0 * stay + w1 * flip) * read_off0;
    const double n1 = (w0 * flip + w1 * stay) * read_off1;
    w0 = n0;
    w1 = n1;
  }
  const double failed = std::pow(read_off1, config.n_fractions);
  return config.prep_efficiency * (w0 + w1) + (1.0 - config.prep_efficiency) * failed;
}

double correct_survival(double all_off_frequency, const ZenoConfig& config) {
  config.validate();
  const double failed =
      (1.0 - config.prep_efficiency) * std::pow(1.0 - config.detection.eta1(), config.n_fractions);
  const double scale =
      config.prep_efficiency * std::pow(config.detection.eta0(), config.n_fractions);
  return (all_off_frequency - failed) / scale;
}

Trajectory simulate_alternating(double theta_per_step, std::size_t n_pairs, RngSeed seed,
                                const DetectionModel& detection) {
  if (n_pairs < 1) throw DomainError("n_pairs must be at least 1");
  if (!(theta_per_step >= 0.0)) throw DomainError("pulse area must be non-negative");
  const DrivePulse pulse = resonant_pulse(theta_per_step, 1.0);
  const PureState probe_axis(0.0, 0.0);

  Trajectory traj;
  traj.seed = seed;
  traj.config = {{"theta", theta_per_step},
                 {"n_pairs", static_cast<double>(n_pairs)},
                 {"eta0", detection.eta0()},
                 {"eta1", detection.eta1()}};
  traj.steps.reserve(n_pairs);

  Rng rng(seed);
  BlochVector state(0.0, 0.0, 1.0);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    state = evolve(state, pulse);
    const MeasurementResult m = measure(state, probe_axis, rng);
    state = m.collapsed;
    const Detection d = detect(m.outcome < 0, detection, rng);
    traj.steps.push_back({pulse, probe_axis, m.outcome, d.observed, d.photon_count});
  }
  return traj;
}

std::size_t RunLengthStats::count(std::size_t q) const {
  const auto it = counts.find(q);
  return it == counts.end() ? 0 : it->second;
}

double RunLengthStats::u(std::size_t q) const {
  return total_runs == 0 ? 0.0 : static_cast<double>(count(q)) / total_runs;
}

double RunLengthStats::ratio(std::size_t q) const {
  const std::size_t c1 = count(1);
  if (c1 == 0) throw DomainError("no runs of length 1 recorded");
  return static_cast<double>(count(q)) / c1;
}

double RunLengthStats::ratio_stderr(std::size_t q) const {
  const double r = ratio(q);
  const double cq = static_cast<double>(count(q));
  if (cq == 0.0) return 0.0;
  return r * std::sqrt(1.0 / cq + 1.0 / count(1));
}

RunLengthStats run_length_distribution(std::span<const Observation> observations) {
  if (observations.empty()) throw DomainError("empty trajectory");
  RunLengthStats stats;
  std::size_t run = 1;
  for (std::size_t i = 1; i < observations.size(); ++i) {
    if (observations[i] == observations[i - 1]) {
      ++run;
    } else {
      ++stats.counts[run];
      ++stats.total_runs;
      run = 1;
    }
  }
  return stats;
}

RunLengthStats run_length_distribution(const Trajectory& trajectory) {
  const auto obs = trajectory.observations();
  return run_length_distribution(std::span<const Observation>(obs));
}

}  // namespace qmsim::zeno
