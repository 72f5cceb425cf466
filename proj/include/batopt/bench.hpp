#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "batopt/shooting_models.hpp"

namespace batopt {

struct AgingProtocol {
  enum class Kind { calendar, cycle };
  Kind kind = Kind::calendar;
  double temperature_k = 318.15;
  // calendar
  double soc = 0.5;
  double duration_days = 0.0;
  double checkup_days = 30.0;
  // cycle, discharge always at 1C
  double soc_lo = 0.0;
  double soc_hi = 1.0;
  double charge_rate_c = 1.0;
  int n_cycles = 0;
  int checkup_cycles = 50;

  void validate() const;
};

enum class AgingAxis { days, full_cycles };

struct AgingPoint {
  double axis = 0.0;
  double relative_capacity = 1.0;
};

struct MeasuredSeries {
  AgingAxis axis = AgingAxis::days;
  std::vector<AgingPoint> points;

  void validate() const;
};

std::string to_string(AgingAxis a);

// Simulated capacity at every checkup, starting with (0, 1). Each model uses
// its own capacity notion; the ECM runs its aging law with divisor 1.
// Throws ProtocolError when the SoC window cannot be reached within the
// voltage limits.
MeasuredSeries run_protocol(const AgingProtocol& protocol, const ModelSetup& model);

// Root mean square difference at the measured points, in percent of initial
// capacity. The simulation is interpolated linearly between checkups.
double rmse(const MeasuredSeries& sim, const MeasuredSeries& meas);

MeasuredSeries load_measured(const std::filesystem::path& csv);
void write_measured(const MeasuredSeries& s, const std::filesystem::path& csv);
// Sidecar JSON next to a measured series.
AgingProtocol load_protocol(const std::filesystem::path& json);
void write_protocol(const AgingProtocol& p, const std::filesystem::path& json);

struct BenchDataset {
  std::string name;
  AgingProtocol protocol;
  std::optional<MeasuredSeries> measured;
};

// Reads every <name>.csv with a <name>.json sidecar in `dir`, sorted by name.
std::vector<BenchDataset> load_datasets(const std::filesystem::path& dir);

struct BenchModel {
  std::string name;
  ModelSetup setup;
};

struct BenchTable {
  std::vector<std::string> datasets;
  std::vector<std::string> models;
  std::vector<std::vector<std::optional<double>>> rmse;  // [model][dataset]
  std::vector<std::optional<double>> average;            // over available cells

  std::string to_csv() const;
};

// Cells without measured data or whose protocol fails are n/a.
BenchTable benchmark_table(const std::vector<BenchDataset>& datasets, const std::vector<BenchModel>& models);

}  // namespace batopt
