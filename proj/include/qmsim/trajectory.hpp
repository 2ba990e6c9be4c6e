#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmsim/bloch.hpp"
#include "qmsim/detection.hpp"
#include "qmsim/rng.hpp"

namespace qmsim {

/// One drive-then-probe step of an experiment.
struct TrajectoryStep {
  std::optional<DrivePulse> pulse;   // drive applied before the probe, if any
  PureState direction{0.0, 0.0};     // measurement axis
  int raw_outcome = +1;              // +1 along the axis, -1 opposite
  Observation observed = Observation::off;
  std::optional<unsigned> photon_count;
};

/// Ordered record of an experiment together with what is needed to replay it.
struct Trajectory {
  RngSeed seed;
  std::vector<std::pair<std::string, double>> config;  // parameter snapshot
  std::vector<TrajectoryStep> steps;

  std::vector<Observation> observations() const {
    std::vector<Observation> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.observed);
    return out;
  }
};

}  // namespace qmsim
