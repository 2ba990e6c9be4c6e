#include "options.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace qmsim::cli {

void OptionTable::apply_config(const json& config) {
  if (!config.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&key](const Entry& e) { return e.name == key; });
    if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
    if (it->option->count() == 0) it->assign(value);
  }
}

json OptionTable::snapshot() const {
  json j = json::object();
  for (const auto& e : entries_) j[e.name] = e.read();
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

PhysicalConstants load_constants() {
  PhysicalConstants c = codata2018();
  const char* path = std::getenv("QMSIM_CONSTANTS");
  if (path == nullptr || *path == '\0') return c;

  const json j = load_json_file(path);
  if (!j.is_object()) throw ConfigError("constants table must be a JSON object");
  const std::map<std::string, double*> fields{
      {"hbar", &c.hbar},
      {"elementary_charge", &c.elementary_charge},
      {"epsilon0", &c.epsilon0},
      {"bohr_magneton", &c.bohr_magneton},
      {"nuclear_magneton", &c.nuclear_magneton},
      {"electron_mass", &c.electron_mass},
      {"proton_mass", &c.proton_mass},
      {"atomic_mass_unit", &c.atomic_mass_unit},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown constant '" + key + "'");
    if (!value.is_number() || !(value.get<double>() > 0.0)) {
      throw ConfigError("constant '" + key + "' must be a positive number");
    }
    *it->second = value.get<double>();
  }
  c.provenance = "CODATA 2018 with overrides from " + std::string(path);
  return c;
}

void write_artifact(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace qmsim::cli
