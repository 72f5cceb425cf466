#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "batopt/horizon.hpp"
#include "batopt/validation.hpp"

namespace batopt {

struct Scenario {
  std::string name = "scenario";
  ModelKind model = ModelKind::bucket;
  Objective objective = Objective::profit;
  PlaybackMode playback = PlaybackMode::rescale;
  int n_days = 7;
  double window_days = 2.0;
  double commit_days = 1.0;
  double initial_soc = 0.5;
  std::filesystem::path prices;
  std::filesystem::path bucket_params;  // empty: shipped defaults
  std::filesystem::path ecm_params;
  std::filesystem::path spm_params;
  std::filesystem::path output_dir = "out";
  // Recorded in the run log; the solver itself is deterministic.
  unsigned seed = 1;
  SolverOptions solver;

  // Throws ConfigError for n_days < 1 and SchemaError naming missing files.
  void validate() const;
};

// JSON document with the fields above; relative paths resolve against the file.
Scenario load_scenario(const std::filesystem::path& path);

ModelSetup build_model(const Scenario& s);

struct ScenarioResult {
  YearRun run;
  LedgerReport ledger;
  std::vector<std::filesystem::path> artifacts;
  int exit_code = 0;  // 0 ok, 1 rest days were substituted
};

std::string ledger_header();
std::string ledger_row(const Scenario& s, const ScenarioResult& r);

// Writes trajectory.csv, cumulative.csv, ledger.csv, profile.csv,
// boundary_states.csv and run_log.jsonl into the output directory. On error
// the files written so far get a .partial suffix and the error is rethrown.
ScenarioResult run_scenario(const Scenario& s);

struct MatrixRow {
  Scenario scenario;
  bool ok = false;
  std::string error;
  ScenarioResult result;
};

// Runs every scenario; failures are reported per row. Throws ConfigError for an empty list.
std::vector<MatrixRow> run_matrix(const std::vector<Scenario>& scenarios);
std::string matrix_csv(const std::vector<MatrixRow>& rows);

std::string profile_csv(const ControlProfile& p);
void write_profile(const ControlProfile& p, const std::filesystem::path& csv);
ControlProfile load_profile(const std::filesystem::path& csv);

}  // namespace batopt
