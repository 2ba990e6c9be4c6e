#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmsim/constants.hpp"

namespace qmsim::cli {

using nlohmann::json;

/// Invalid configuration: unknown key, wrong type, bad value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options of one subcommand, settable from flags or from a JSON config file
// whose keys are the long flag names. Flags win over the file.
class OptionTable {
 public:
  explicit OptionTable(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& field, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + name, field, help)->capture_default_str();
    register_field(name, opt, field);
    return opt;
  }

  CLI::Option* add_flag(const std::string& name, bool& field, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + name, field, help);
    register_field(name, opt, field);
    return opt;
  }

  /// Assigns every key of `config` whose flag was not given on the command line.
  void apply_config(const json& config);

  /// Fully resolved settings (used for hashing and provenance headers).
  json snapshot() const;

 private:
  template <class T>
  void register_field(const std::string& name, CLI::Option* opt, T& field) {
    entries_.push_back(Entry{
        name, opt,
        [&field, name](const json& j) {
          try {
            field = j.get<T>();
          } catch (const json::exception& e) {
            throw ConfigError("config key '" + name + "': " + e.what());
          }
        },
        [&field] { return json(field); }});
  }

  struct Entry {
    std::string name;
    CLI::Option* option;
    std::function<void(const json&)> assign;
    std::function<json()> read;
  };

  CLI::App* app_;
  std::vector<Entry> entries_;
};

/// Parses a JSON file; ConfigError on I/O or syntax problems.
json load_json_file(const std::string& path);

/// 64-bit FNV-1a of the compact dump of `j`, as 16 hex digits.
std::string config_hash(const json& j);

/// Constants table: built-in CODATA 2018 values, overridden key by key from
/// the file named by QMSIM_CONSTANTS when set.
PhysicalConstants load_constants();

/// Writes `text` to `path`, or to `out` when path is "-" or empty.
void write_artifact(const std::string& path, const std::string& text, std::ostream& out);

/// Shortest round-trip representation (up to 17 significant digits).
std::string format_double(double x);

}  // namespace qmsim::cli
