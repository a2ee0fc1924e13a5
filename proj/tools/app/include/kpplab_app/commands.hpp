#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kpplab_app/config.hpp"

namespace kpplab::app {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailed = 1,        // a verification criterion failed or an analysis error occurred
  kSchema = 2,        // configuration or usage error
  kNumericalAbort = 3,
};

/// Headline numbers of one run.
struct RunSummary {
  double speed = 0.0;       // NaN when no fit was possible
  double T_eps = 0.0;       // first eps of the analysis block
  double tail_inf_rhs = 0.0;
  std::optional<TumorSweepRow> tumor;  // first event of the tumor block
};

/// Solves, analyses and writes trajectory.csv, certificate.txt, inf_rhs.csv, t_eps.csv,
/// level.csv (when the speed fit succeeds) and protocol.csv (with a tumor block) into `out`.
RunSummary execute_run(const RunConfig& cfg, const std::filesystem::path& out);

/// Parsed `key=v1,v2,...`. Throws SchemaError on malformed or non-numeric values.
struct SweepAxis {
  std::string key;
  std::vector<double> values;
};
SweepAxis parse_axis(const std::string& spec);

int cmd_run(const std::string& config_path, const std::optional<std::string>& out, std::ostream& log,
            std::ostream& err);
int cmd_verify(const std::string& suite, const std::optional<std::string>& out, std::ostream& log, std::ostream& err);
int cmd_sweep(const std::string& config_path, const std::vector<std::string>& axes, const std::optional<std::string>& out,
              unsigned workers, std::ostream& log, std::ostream& err);

}  // namespace kpplab::app
