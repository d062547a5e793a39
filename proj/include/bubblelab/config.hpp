#pragma once
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bubblelab/experiments.hpp"

namespace bl {

// Value of the TOML subset used by experiment manifests: strings, numbers,
// booleans and flat arrays of those.
struct ConfigValue {
  enum class Type { String, Number, Bool, Array };
  Type type = Type::Number;
  std::string str;
  double num = 0;
  bool boolean = false;
  std::vector<ConfigValue> items;
  int line = 0;
};

class ConfigTable {
 public:
  static ConfigTable parse(const std::string& text);
  static ConfigTable load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> string(const std::string& section, const std::string& key) const;
  std::optional<double> number(const std::string& section, const std::string& key) const;
  std::optional<int> integer(const std::string& section, const std::string& key) const;
  std::optional<bool> boolean(const std::string& section, const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const;
  // Throws ConfigError naming the first key outside `allowed` ("section.key").
  void check_keys(const std::set<std::string>& allowed) const;
  const std::map<std::string, ConfigValue>& entries() const { return entries_; }

 private:
  const ConfigValue* find(const std::string& section, const std::string& key) const;
  std::map<std::string, ConfigValue> entries_;  // "section.key"
};

struct ExperimentConfig {
  RegimeInputs regime;
  double lambda_fraction = 0.5;
  std::string domain = "unit_ball";
  std::string grid = "radial";
  std::vector<double> deltas;  // empty: construction default
  std::vector<double> distances{0.2, 0.1, 0.05, 0.025};
  double delta_power = 2;
  double eps_scale = 1;
  int tensor_points = 48;
  unsigned long seed = 1;
  std::string output_dir = ".";
  std::string prefix = "sweep";

  // Regime must map to a stability row and the shift must lie strictly below lambda_1.
  void validate() const;
  SweepConfig sweep_config() const;
};

ExperimentConfig experiment_config_from(const ConfigTable& t);

}  // namespace bl
