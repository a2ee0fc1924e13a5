#pragma once

#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "kpplab/kpplab.hpp"

namespace kpplab::app {

/// Configuration rejected before any computation; `key` is the dotted path of the culprit.
class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct AnalysisConfig {
  std::vector<double> eps_list{0.1};
  std::vector<double> levels{0.5};
  std::optional<double> speed_begin;  // default: t_final / 2
  std::optional<double> speed_end;    // default: t_final
  double tau_floor = 1.0;
};

struct TumorConfig {
  TreatmentSchedule schedule;
  double comb = 0.1;
  double grazing_slope = 1e-3;
};

struct RunConfig {
  Problem problem;
  SolverConfig solver;
  AnalysisConfig analysis;
  std::optional<TumorConfig> tumor;
  std::optional<std::string> output;
};

/// Parses an already loaded document. Throws SchemaError on unknown keys, wrong types or
/// out-of-range values.
RunConfig parse_config(const YAML::Node& root);

/// Loads and parses a file. Throws SchemaError when the file cannot be read or parsed.
YAML::Node load_config_file(const std::string& path);
RunConfig load_config(const std::string& path);

/// Sets the scalar at a dotted path (numeric segments index sequences). Throws SchemaError
/// when the path crosses a non-map node or the current value is not numeric.
void set_numeric(YAML::Node& root, const std::string& dotted, double value);

}  // namespace kpplab::app
