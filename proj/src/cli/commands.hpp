#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "options.hpp"
#include "qmsim/constants.hpp"

namespace qmsim::cli {

// Settings common to every subcommand.
struct CommonSettings {
  std::uint64_t seed = 0;
  std::string output = "-";
  std::string format;  // subcommand-specific default when empty
  std::string config;  // path of the JSON config file, not part of the snapshot
};

struct ZenoSettings {
  std::string mode = "survival";  // survival | runs
  std::vector<int> fractions{1, 2, 3, 4, 10};
  int sequences = 200;
  double prep = 1.0;
  std::string detection = "ideal";  // ideal | eta | counts
  double eta0 = 1.0;
  double eta1 = 1.0;
  double on_mean = 5.5;
  double off_mean = 0.2;
  unsigned threshold = 0;
  double theta_over_pi = 0.2;
  std::uint64_t pairs = 10000;
  int max_q = 10;
};

struct EstimateSettings {
  std::string strategy = "self";  // self | random | fixed
  int n = 12;
  int states = 1000;
  double lambda = 0.0;
  double delta_eta = 0.0;
  int grid_theta = 64;
  int grid_phi = 128;
  int coarse = 400;
  int rounds = 2;
  std::string per_state;  // optional CSV path for per-state fidelities
};

struct ChannelSettings {
  std::string spec;  // path of the channel spec JSON
  std::uint64_t shots = 0;  // 0: exact tomography
};

struct ChainSettings {
  std::string species = "yb171";
  double nu1_khz = 100.0;
  int n = 10;
  double gradient = 25.0;
  double b0 = 0.0;
  bool strong_field = false;  // evaluate chi at |b0 + b z_j| instead of chi = 0
  double wavelength_nm = 369.0;
  bool table = false;
};

struct RabiSettings {
  std::string mode = "rabi";  // rabi | ramsey
  double rabi_khz = 1.0;      // Omega / 2 pi
  double detuning_khz = 0.0;  // delta / 2 pi
  double t_max_us = 1000.0;   // rabi: drive time; ramsey: precession time
  int steps = 101;
};

struct Provenance {
  std::uint64_t seed;
  std::string config_hash;
  std::string version;
};

std::string run_zeno(const ZenoSettings& s, const CommonSettings& common, const Provenance& p);
std::string run_estimate(const EstimateSettings& s, const CommonSettings& common,
                         const Provenance& p, std::ostream& out);
std::string run_channel(const ChannelSettings& s, const CommonSettings& common,
                        const Provenance& p);
std::string run_chain(const ChainSettings& s, const CommonSettings& common, const Provenance& p,
                      const PhysicalConstants& constants);
std::string run_rabi(const RabiSettings& s, const CommonSettings& common, const Provenance& p);

}  // namespace qmsim::cli
