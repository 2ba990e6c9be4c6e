#include "qmsim/cli.hpp"

#include <iostream>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "options.hpp"
#include "qmsim/errors.hpp"

namespace qmsim::cli {

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::unique_ptr<OptionTable> table;
  CommonSettings common;
};

Subcommand& add_subcommand(CLI::App& root, std::vector<std::unique_ptr<Subcommand>>& subs,
                           const std::string& name, const std::string& help) {
  auto sub = std::make_unique<Subcommand>();
  sub->app = root.add_subcommand(name, help);
  sub->table = std::make_unique<OptionTable>(sub->app);
  sub->table->add("seed", sub->common.seed, "Master seed");
  sub->table->add("format", sub->common.format, "Output format: csv | json");
  sub->app->add_option("--output,-o", sub->common.output, "Output path, '-' for stdout")
      ->capture_default_str();
  sub->app->add_option("--config", sub->common.config,
                       "JSON config whose keys are flag names; flags win");
  subs.push_back(std::move(sub));
  return *subs.back();
}

std::string version_text(const PhysicalConstants& c) {
  return std::string("qmsim ") + kVersion + "\nconstants: " + c.provenance + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App root{"Qubit measurement and trapped-ion simulator", "qmsim"};
  root.require_subcommand(0, 1);
  bool show_version = false;
  root.add_flag("--version", show_version, "Print version and constants provenance");

  std::vector<std::unique_ptr<Subcommand>> subs;

  ZenoSettings zeno;
  auto& zs = add_subcommand(root, subs, "zeno", "Zeno survival and run-length statistics");
  zs.table->add("mode", zeno.mode, "survival | runs");
  zs.table->add("fractions", zeno.fractions, "Numbers of pi-pulse fractions N");
  zs.table->add("sequences", zeno.sequences, "Sequences per N");
  zs.table->add("prep", zeno.prep, "Preparation efficiency");
  zs.table->add("detection", zeno.detection, "ideal | eta | counts");
  zs.table->add("eta0", zeno.eta0, "P(|0> reads off)");
  zs.table->add("eta1", zeno.eta1, "P(|1> reads on)");
  zs.table->add("on-mean", zeno.on_mean, "Mean bright counts");
  zs.table->add("off-mean", zeno.off_mean, "Mean background counts");
  zs.table->add("threshold", zeno.threshold, "On iff count > threshold");
  zs.table->add("theta-over-pi", zeno.theta_over_pi, "Pulse area per step / pi (runs mode)");
  zs.table->add("pairs", zeno.pairs, "Drive/probe pairs (runs mode)");
  zs.table->add("max-q", zeno.max_q, "Largest run length reported");

  EstimateSettings est;
  auto& es = add_subcommand(root, subs, "estimate", "Adaptive Bayesian state estimation");
  es.table->add("strategy", est.strategy, "self | random | fixed");
  es.table->add("n", est.n, "Measurements per state");
  es.table->add("states", est.states, "Random states");
  es.table->add("lambda", est.lambda, "Depolarization parameter");
  es.table->add("delta-eta", est.delta_eta, "Read-out bias (eta1 - eta0)/2");
  es.table->add("grid-theta", est.grid_theta, "Gauss-Legendre nodes in cos theta");
  es.table->add("grid-phi", est.grid_phi, "Uniform nodes in phi");
  es.table->add("coarse", est.coarse, "Coarse Fibonacci directions");
  es.table->add("rounds", est.rounds, "Local refinement rounds");
  es.table->add("per-state", est.per_state, "Optional per-state CSV path");

  ChannelSettings chan;
  auto& cs = add_subcommand(root, subs, "channel", "Affine channel tomography");
  cs.table->add("spec", chan.spec, "Channel spec JSON");
  cs.table->add("shots", chan.shots, "Shots per setting, 0 for exact");

  ChainSettings chain;
  auto& ch = add_subcommand(root, subs, "chain", "Ion chain modes and spin-spin couplings");
  ch.table->add("species", chain.species, "Ion species (yb171)");
  ch.table->add("nu1-khz", chain.nu1_khz, "COM frequency / 2 pi in kHz");
  ch.table->add("n", chain.n, "Number of ions");
  ch.table->add("gradient", chain.gradient, "Axial field gradient in T/m");
  ch.table->add("b0", chain.b0, "Offset field in T");
  ch.table->add_flag("strong-field", chain.strong_field, "Evaluate chi at the local field");
  ch.table->add("wavelength-nm", chain.wavelength_nm, "Wavelength for Lamb-Dicke parameters");
  ch.table->add_flag("table", chain.table, "Print the coupling table as text");

  RabiSettings rabi;
  auto& rs = add_subcommand(root, subs, "rabi", "Rabi oscillation and Ramsey fringes");
  rs.table->add("mode", rabi.mode, "rabi | ramsey");
  rs.table->add("rabi-khz", rabi.rabi_khz, "Rabi frequency / 2 pi in kHz");
  rs.table->add("detuning-khz", rabi.detuning_khz, "Detuning / 2 pi in kHz");
  rs.table->add("t-max-us", rabi.t_max_us, "Largest drive or precession time in us");
  rs.table->add("steps", rabi.steps, "Time samples");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    root.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      for (const auto& s : subs) {
        if (s->app->parsed()) {
          out << s->app->help();
          return kSuccess;
        }
      }
      out << root.help();
      return kSuccess;
    }
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const PhysicalConstants constants = load_constants();
    if (show_version) {
      out << version_text(constants);
      return kSuccess;
    }
    Subcommand* active = nullptr;
    for (const auto& s : subs) {
      if (s->app->parsed()) active = s.get();
    }
    if (active == nullptr) {
      err << root.help();
      return kConfigError;
    }
    if (!active->common.config.empty()) {
      active->table->apply_config(load_json_file(active->common.config));
    }
    const json snapshot = active->table->snapshot();
    const Provenance prov{active->common.seed, config_hash(snapshot), kVersion};
    const std::string& name = active->app->get_name();

    std::string text;
    if (name == "zeno") {
      text = run_zeno(zeno, active->common, prov);
    } else if (name == "estimate") {
      text = run_estimate(est, active->common, prov, out);
    } else if (name == "channel") {
      text = run_channel(chan, active->common, prov);
    } else if (name == "chain") {
      text = run_chain(chain, active->common, prov, constants);
    } else {
      text = run_rabi(rabi, active->common, prov);
    }
    write_artifact(active->common.output, text, out);
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InvariantViolation& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace qmsim::cli
