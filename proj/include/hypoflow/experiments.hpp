#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypoflow/config.hpp"
#include "hypoflow/output.hpp"

namespace hypoflow {

inline constexpr const char* kVersion = "0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< how value is compared with threshold, e.g. "<=", ">", "within"
  std::string detail;
};

enum class RunStatus { Pass, Fail, ConfigError, NumericError };

std::string status_name(RunStatus s);
/// 0 pass, 1 verdict fail, 2 config error, 3 numeric error.
int exit_code(RunStatus s);

struct RunManifest {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;  ///< resolved parameters
  std::string config_text;        ///< the configuration as given (canonical form)
  double wall_seconds = 0.0;
  std::vector<CheckResult> checks;
  std::vector<OutputFile> files;
  RunStatus status = RunStatus::Pass;
  std::string error;
  bool partial = false;
  std::filesystem::path dir;

  bool pass() const { return status == RunStatus::Pass; }
  nlohmann::ordered_json to_json() const;
};

struct ExperimentInfo {
  std::string id;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& id);

/// Validates the configuration (ConfigError before any computation), runs the experiment and
/// writes its artifacts plus manifest.json into out_dir. Module errors after validation are
/// recorded in the manifest status rather than thrown.
RunManifest run_experiment(const std::string& id, const Config& cfg, const std::filesystem::path& out_dir,
                           std::optional<std::uint64_t> seed = std::nullopt);

struct SuiteMember {
  std::string label;
  std::string experiment;
  std::string config_text;
};

/// Members of the smoke, acceptance or extended profile; ConfigError for any other name.
std::vector<SuiteMember> suite_members(const std::string& profile);

struct SuiteReport {
  std::string profile;
  std::vector<std::pair<std::string, RunManifest>> runs;
  double wall_seconds = 0.0;
  bool pass() const;
  RunStatus status() const;
};

/// Runs every member into out_dir/<label> and writes out_dir/suite.json.
SuiteReport run_suite(const std::string& profile, const std::filesystem::path& out_dir,
                      std::optional<std::uint64_t> seed = std::nullopt, bool verbose = false);

}  // namespace hypoflow
