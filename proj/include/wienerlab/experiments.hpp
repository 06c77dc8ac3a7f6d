#pragma once

// Config-driven experiments: YAML in, a CSV table and a JSON summary out.
// The schema is documented in docs/config.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wienerlab/besov.hpp"
#include "wienerlab/estimators.hpp"
#include "wienerlab/functionals.hpp"

namespace wlab {

inline constexpr int kCsvSchemaVersion = 1;

struct NamedEstimate {
  std::string name;
  Estimate estimate;  // exact quantities carry std_error 0 and n 0
};

struct ContractCheck {
  std::string record;  // names the row or quantity the contract is about
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::string name;     // output file stem
  std::string out_dir;  // output.dir from the config
  std::uint64_t seed = 0;
  std::string inputs_json;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<NamedEstimate> estimates;
  std::vector<ContractCheck> checks;
  double wall_seconds = 0.0;

  bool passed() const;
  const ContractCheck* first_failure() const;
  std::string csv() const;
  std::string json() const;
};

struct RunOptions {
  unsigned threads = 0;                // 0: use the config value (default 1)
  std::optional<std::string> out_dir;  // overrides the config and environment
};

// Parses and runs one experiment. Unknown keys raise ErrorCode::config with
// every offending key listed.
ExperimentReport run_experiment(const std::string& config_text, const RunOptions& opts = {});

// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutDirEnv = "WIENERLAB_OUT";

struct RunOutcome {
  int exit_code = 0;  // 0 all contracts pass, 2 a contract failed
  std::string csv_path;
  std::string json_path;
  std::string failing_record;
  ExperimentReport report;
};

RunOutcome run_config_file(const std::string& path, const RunOptions& opts = {});

std::vector<std::string> experiment_kinds();
// Sorted listing of experiments, functionals, Phi variants and BSDE presets
// with their parameters.
std::string catalog_text();

// Catalog factories; params is a YAML mapping (may be empty).
FunctionalPtr make_functional(GridPtr grid, const std::string& name, const std::string& params_yaml);
PhiPtr make_phi(GridPtr grid, const std::string& name, const std::string& params_yaml);

}  // namespace wlab
