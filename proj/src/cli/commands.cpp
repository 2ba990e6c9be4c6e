#include "commands.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "qmsim/bloch.hpp"
#include "qmsim/channels.hpp"
#include "qmsim/detection.hpp"
#include "qmsim/errors.hpp"
#include "qmsim/estimator.hpp"
#include "qmsim/ionchain.hpp"
#include "qmsim/zeno.hpp"

namespace qmsim::cli {

namespace {

constexpr double kPi = std::numbers::pi;

json meta(const Provenance& p) {
  return json{{"seed", p.seed}, {"config_hash", p.config_hash}, {"version", p.version}};
}

std::string csv_header(const Provenance& p) {
  std::ostringstream os;
  os << "# qmsim version=" << p.version << " seed=" << p.seed
     << " config_hash=" << p.config_hash << "\n";
  return os.str();
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
}

struct Row {
  double key;
  double theory;
  double simulated;
  double stderr_value;
};

std::string emit_rows(const std::vector<Row>& rows, const std::string& format,
                      const Provenance& p, json extra) {
  if (format == "json") {
    json j = std::move(extra);
    j["meta"] = meta(p);
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"N_or_q", r.key},
                           {"theory", r.theory},
                           {"simulated", r.simulated},
                           {"stderr", r.stderr_value}});
    }
    return j.dump(2) + "\n";
  }
  std::string text = csv_header(p) + "N_or_q,theory,simulated,stderr\n";
  for (const auto& r : rows) {
    text += format_double(r.key) + "," + format_double(r.theory) + "," +
            format_double(r.simulated) + "," + format_double(r.stderr_value) + "\n";
  }
  return text;
}

DetectionModel make_detection(const ZenoSettings& s) {
  if (s.detection == "ideal") return DetectionModel::ideal();
  if (s.detection == "eta") return DetectionModel::from_efficiencies(s.eta0, s.eta1);
  if (s.detection == "counts") {
    return DetectionModel::from_photon_counts(s.on_mean, s.off_mean, s.threshold);
  }
  throw ConfigError("detection must be ideal, eta or counts");
}

Eigen::Vector3d axis_from_angles(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("axis must be [theta, phi]");
  }
  const double theta = j[0].get<double>();
  const double phi = j[1].get<double>();
  if (!(theta >= 0.0 && theta <= kPi)) throw ConfigError("axis theta must lie in [0, pi]");
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("channel spec needs '") + key + "'");
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

void allow_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw ConfigError("unknown channel spec key '" + k + "'");
  }
}

channels::ChannelSpec parse_channel_spec(const json& j) {
  if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string()) {
    throw ConfigError("channel spec must be an object with a string 'variant'");
  }
  const std::string variant = j["variant"].get<std::string>();
  if (variant == "phase_damping") {
    allow_keys(j, {"variant", "lambda", "axis"});
    channels::PhaseDampingSpec s;
    s.lambda = number_field(j, "lambda");
    if (j.contains("axis")) s.axis = axis_from_angles(j["axis"]);
    return s;
  }
  if (variant == "depolarizing") {
    allow_keys(j, {"variant", "lambda"});
    return channels::DepolarizingSpec{number_field(j, "lambda")};
  }
  if (variant == "rotation") {
    allow_keys(j, {"variant", "axis", "angle"});
    if (!j.contains("axis")) throw ConfigError("rotation spec needs 'axis'");
    return channels::RotationSpec{axis_from_angles(j["axis"]), number_field(j, "angle")};
  }
  if (variant == "affine") {
    allow_keys(j, {"variant", "m", "v"});
    channels::AffineSpec s;
    try {
      const auto m = j.at("m").get<std::vector<std::vector<double>>>();
      const auto v = j.at("v").get<std::vector<double>>();
      if (m.size() != 3 || v.size() != 3) throw ConfigError("affine spec needs 3x3 m and 3-vector v");
      for (int r = 0; r < 3; ++r) {
        if (m[r].size() != 3) throw ConfigError("affine spec needs 3x3 m");
        for (int c = 0; c < 3; ++c) s.m(r, c) = m[r][c];
        s.v(r) = v[r];
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("affine spec: ") + e.what());
    }
    return s;
  }
  if (variant == "composition") {
    allow_keys(j, {"variant", "parts"});
    if (!j.contains("parts") || !j["parts"].is_array()) {
      throw ConfigError("composition spec needs a 'parts' array");
    }
    channels::CompositionSpec s;
    for (const auto& part : j["parts"]) s.parts.push_back(parse_channel_spec(part));
    return s;
  }
  throw ConfigError("unknown channel variant '" + variant + "'");
}

json matrix_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string coupling_table(const Eigen::MatrixXd& j_hz, const ChainSettings& s) {
  const Eigen::Index n = j_hz.rows();
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::setw(3) << "i";
  for (Eigen::Index c = 0; c + 1 < n; ++c) {
    os << " | " << std::setw(6) << ("J_i" + std::to_string(c + 1));
  }
  os << "\n";
  for (Eigen::Index r = 0; r < n; ++r) {
    os << std::setw(3) << r + 1;
    for (Eigen::Index c = 0; c + 1 < n; ++c) {
      os << " | ";
      if (c < r) {
        os << std::setw(6) << j_hz(r, c);
      } else {
        os << std::setw(6) << "";
      }
    }
    os << "\n";
  }
  os << "Spin-spin coupling constants J_ij/2pi in Hz for " << n << " " << s.species
     << " ions, nu1 = 2pi x " << format_double(s.nu1_khz) << " kHz, gradient "
     << format_double(s.gradient) << " T/m"
     << (s.strong_field ? "" : " (weak-field limit)") << "\n";
  return os.str();
}

}  // namespace

std::string run_zeno(const ZenoSettings& s, const CommonSettings& common, const Provenance& p) {
  const std::string format = common.format.empty() ? "csv" : common.format;
  check_format(format);
  const DetectionModel detection = make_detection(s);
  std::vector<Row> rows;

  if (s.mode == "survival") {
    if (s.fractions.empty()) throw ConfigError("fractions must not be empty");
    for (int n : s.fractions) {
      zeno::ZenoConfig cfg;
      cfg.n_fractions = n;
      cfg.sequences = s.sequences;
      cfg.detection = detection;
      cfg.prep_efficiency = s.prep;
      cfg.validate();
      // Each N gets its own stream so adding or removing N leaves the others unchanged.
      const auto res = zeno::simulate_fractionated_pi(
          cfg, derive_seed(RngSeed{common.seed}, static_cast<std::uint64_t>(n)));
      const double scale = s.prep * std::pow(detection.eta0(), n);
      rows.push_back({static_cast<double>(n), zeno::survival_probability(kPi / n, n),
                      res.corrected_survival, res.stderr_frequency / scale});
    }
    return emit_rows(rows, format, p, json{{"mode", "survival"}});
  }
  if (s.mode == "runs") {
    if (s.max_q < 1) throw ConfigError("max-q must be at least 1");
    const double theta = s.theta_over_pi * kPi;
    const Trajectory traj = zeno::simulate_alternating(theta, s.pairs, RngSeed{common.seed}, detection);
    const auto stats = zeno::run_length_distribution(traj);
    if (stats.count(1) == 0) throw NumericalError("trajectory has no completed runs of length 1");
    for (int q = 1; q <= s.max_q; ++q) {
      rows.push_back({static_cast<double>(q), zeno::survival_probability(theta, q - 1),
                      stats.ratio(q), stats.ratio_stderr(q)});
    }
    return emit_rows(rows, format, p,
                     json{{"mode", "runs"}, {"theta", theta}, {"total_runs", stats.total_runs}});
  }
  throw ConfigError("zeno mode must be survival or runs");
}

std::string run_estimate(const EstimateSettings& s, const CommonSettings& common,
                         const Provenance& p, std::ostream& out) {
  const std::string format = common.format.empty() ? "json" : common.format;
  check_format(format);
  estimation::StrategyConfig cfg;
  if (s.strategy == "self") {
    cfg.kind = estimation::Strategy::self_learning;
  } else if (s.strategy == "random") {
    cfg.kind = estimation::Strategy::random;
  } else if (s.strategy == "fixed") {
    cfg.kind = estimation::Strategy::fixed_axes;
  } else {
    throw ConfigError("strategy must be self, random or fixed");
  }
  cfg.n_measurements = s.n;
  cfg.grid_theta = s.grid_theta;
  cfg.grid_phi = s.grid_phi;
  cfg.optimizer.coarse_points = s.coarse;
  cfg.optimizer.refinement_rounds = s.rounds;
  cfg.validate();
  const estimation::ImperfectionParams imp{s.lambda, s.delta_eta};
  imp.validate();
  if (s.states < 1) throw ConfigError("states must be at least 1");

  const auto summary = estimation::mean_fidelity_experiment(s.states, cfg, imp, RngSeed{common.seed});

  std::string csv = csv_header(p) + "index,true_theta,true_phi,est_theta,est_phi,fidelity\n";
  for (std::size_t i = 0; i < summary.per_state.size(); ++i) {
    const auto& st = summary.per_state[i];
    csv += std::to_string(i) + "," + format_double(st.true_state.theta()) + "," +
           format_double(st.true_state.phi()) + "," + format_double(st.estimate.theta()) + "," +
           format_double(st.estimate.phi()) + "," + format_double(st.fidelity) + "\n";
  }
  if (!s.per_state.empty()) write_artifact(s.per_state, csv, out);
  if (format == "csv") return csv;

  json j{{"meta", meta(p)},
         {"mean", summary.mean},
         {"stderr", summary.stderr_mean},
         {"strategy", s.strategy},
         {"N", s.n},
         {"states", s.states},
         {"lambda", s.lambda},
         {"delta_eta", s.delta_eta},
         {"optimal_bound", (s.n + 1.0) / (s.n + 2.0)}};
  return j.dump(2) + "\n";
}

std::string run_channel(const ChannelSettings& s, const CommonSettings& common,
                        const Provenance& p) {
  const std::string format = common.format.empty() ? "json" : common.format;
  if (format != "json") throw ConfigError("channel output is JSON only");
  if (s.spec.empty()) throw ConfigError("channel needs --spec");
  const channels::AffineChannel truth = channels::build(parse_channel_spec(load_json_file(s.spec)));

  json j{{"meta", meta(p)}, {"shots", s.shots}};
  if (s.shots == 0) {
    const channels::AffineChannel rec = channels::tomography_exact(truth);
    j["M"] = matrix_json(rec.m());
    j["v"] = vector_json(rec.v());
    j["stderr"] = {{"M", matrix_json(Eigen::Matrix3d::Zero())},
                   {"v", vector_json(Eigen::Vector3d::Zero())}};
  } else {
    Rng rng(RngSeed{common.seed});
    const channels::Reconstruction rec = channels::tomography_sampled(truth, s.shots, rng);
    j["M"] = matrix_json(rec.m);
    j["v"] = vector_json(rec.v);
    j["stderr"] = {{"M", matrix_json(rec.m_stderr)}, {"v", vector_json(rec.v_stderr)}};
  }
  return j.dump(2) + "\n";
}

std::string run_chain(const ChainSettings& s, const CommonSettings& common, const Provenance& p,
                      const PhysicalConstants& constants) {
  using namespace ionchain;
  if (s.species != "yb171") throw ConfigError("unsupported species '" + s.species + "'");
  const std::string format = common.format.empty() ? "json" : common.format;
  if (format != "json") throw ConfigError("chain output is JSON (or --table text)");

  const Species species = Species::yb171(constants);
  const TrapConfig trap{2.0 * kPi * s.nu1_khz * 1e3, s.n, s.gradient, s.b0};
  trap.validate();
  const ChainModes modes = solve_chain(species, trap, constants);
  const Eigen::VectorXd grads = ion_gradients(species, trap, modes, !s.strong_field, constants);
  const EpsilonMatrix eps = epsilon_matrix(modes, grads, species, constants);
  const Eigen::MatrixXd j_hz = coupling_matrix(modes, eps.epsilon) / (2.0 * kPi);

  if (s.table) return coupling_table(j_hz, s);

  json j{{"meta", meta(p)}};
  j["zeta"] = modes.zeta;
  j["positions_um"] = vector_json(modes.z0 * 1e6);
  j["mode_freqs_khz"] = vector_json(modes.nu / (2.0 * kPi * 1e3));
  j["required_gradient"] = s.n >= 2 ? json(required_gradient(species, trap.nu1, s.n, constants))
                                    : json(nullptr);
  j["spacing_estimate_um"] =
      s.n >= 2 ? json(spacing_estimate(s.n, modes.zeta) * 1e6) : json(nullptr);
  j["delta_z_nm"] = vector_json(
      modes.nu.unaryExpr([&](double nu) { return lamb_dicke(1.0, species, nu, constants).delta_z * 1e9; }));
  j["epsilon"] = json::array();
  j["J_hz"] = json::array();
  for (Eigen::Index r = 0; r < j_hz.rows(); ++r) {
    j["J_hz"].push_back(vector_json(j_hz.row(r).transpose()));
    j["epsilon"].push_back(vector_json(eps.epsilon.row(r).transpose()));
  }
  const Eigen::MatrixXd eta_eff =
      effective_lamb_dicke(modes, eps.epsilon, s.wavelength_nm * 1e-9, species, constants);
  j["effective_lamb_dicke"] = json::array();
  for (Eigen::Index r = 0; r < eta_eff.rows(); ++r) {
    j["effective_lamb_dicke"].push_back(vector_json(eta_eff.row(r).transpose()));
  }
  j["assumptions"] = {{"weak_field", !s.strong_field},
                      {"b0_tesla", s.b0},
                      {"g_J", species.g_j},
                      {"nuclear_term_neglected", true},
                      {"uniform_gradient", true},
                      {"constants", constants.provenance}};
  return j.dump(2) + "\n";
}

std::string run_rabi(const RabiSettings& s, const CommonSettings& common, const Provenance& p) {
  const std::string format = common.format.empty() ? "csv" : common.format;
  if (format != "csv") throw ConfigError("rabi output is CSV only");
  if (s.steps < 2) throw ConfigError("steps must be at least 2");
  if (!(s.t_max_us >= 0.0)) throw ConfigError("t-max-us must be non-negative");
  const double rabi = 2.0 * kPi * s.rabi_khz * 1e3;
  const double detuning = 2.0 * kPi * s.detuning_khz * 1e3;
  const double t_max = s.t_max_us * 1e-6;

  std::string text = csv_header(p);
  if (s.mode == "rabi") {
    text += "t_s,p1_formula,p1_evolved\n";
    for (int i = 0; i < s.steps; ++i) {
      const double t = t_max * i / (s.steps - 1);
      const BlochVector out = evolve(BlochVector(0.0, 0.0, 1.0), DrivePulse{rabi, detuning, t, 0.0});
      text += format_double(t) + "," + format_double(rabi_excitation_probability(rabi, detuning, t)) +
              "," + format_double(born_probability(out, PureState(kPi, 0.0))) + "\n";
    }
    return text;
  }
  if (s.mode == "ramsey") {
    if (!(rabi > 0.0)) throw ConfigError("ramsey needs a positive Rabi frequency");
    const DrivePulse half_pi{rabi, detuning, kPi / (2.0 * rabi), 0.0};
    text += "t_precession_s,p1_ramsey,p1_ideal\n";
    for (int i = 0; i < s.steps; ++i) {
      const double t = t_max * i / (s.steps - 1);
      const double c = std::cos(0.5 * detuning * t);
      text += format_double(t) + "," + format_double(ramsey_probability(half_pi, t)) + "," +
              format_double(c * c) + "\n";
    }
    return text;
  }
  throw ConfigError("rabi mode must be rabi or ramsey");
}

}  // namespace qmsim::cli
