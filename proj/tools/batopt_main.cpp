#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "batopt/bench.hpp"
#include "batopt/csv.hpp"
#include "batopt/errors.hpp"
#include "batopt/params_io.hpp"
#include "batopt/scenario.hpp"

namespace fs = std::filesystem;
using namespace batopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 1;
constexpr int kExitConfig = 2;

struct RunFlags {
  std::string scenario, model, objective, playback, prices, out, bucket, ecm, spm;
  int days = 0;
  int max_iter = 0;
  double soc = -1.0;
  long long seed = -1;
  bool verbose = false;
};

Scenario scenario_from(const RunFlags& f) {
  Scenario s;
  if (!f.scenario.empty()) s = load_scenario(f.scenario);
  if (!f.model.empty()) s.model = parse_model_kind(f.model);
  if (!f.objective.empty()) s.objective = parse_objective(f.objective);
  if (!f.playback.empty()) s.playback = parse_playback_mode(f.playback);
  if (f.scenario.empty()) {
    s.name = to_string(s.model) + "_" + to_string(s.objective);
    s.output_dir = fs::path("out") / s.name;
  }
  if (!f.prices.empty()) s.prices = f.prices;
  if (!f.out.empty()) s.output_dir = f.out;
  if (!f.bucket.empty()) s.bucket_params = f.bucket;
  if (!f.ecm.empty()) s.ecm_params = f.ecm;
  if (!f.spm.empty()) s.spm_params = f.spm;
  if (f.days != 0) s.n_days = f.days;
  if (f.max_iter > 0) s.solver.max_iter = f.max_iter;
  if (f.soc >= 0.0) s.initial_soc = f.soc;
  if (f.seed >= 0) s.seed = static_cast<unsigned>(f.seed);
  s.solver.verbose = f.verbose;
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

std::vector<AgingProtocol> fixture_protocols(std::vector<std::string>& names) {
  std::vector<AgingProtocol> v;
  AgingProtocol c;
  c.kind = AgingProtocol::Kind::calendar;
  c.duration_days = 240;
  c.checkup_days = 30;
  c.soc = 0.5;
  c.temperature_k = 298.15;
  names.push_back("calendar_soc50_t298");
  v.push_back(c);
  c.soc = 0.9;
  c.temperature_k = 318.15;
  names.push_back("calendar_soc90_t318");
  v.push_back(c);
  AgingProtocol y;
  y.kind = AgingProtocol::Kind::cycle;
  y.temperature_k = 318.15;
  y.soc_lo = 0.2;
  y.soc_hi = 0.8;
  y.charge_rate_c = 1.0;
  y.n_cycles = 500;
  y.checkup_cycles = 100;
  names.push_back("cycle_20_80_1c_t318");
  v.push_back(y);
  y.soc_lo = 0.1;
  y.soc_hi = 0.7;
  y.charge_rate_c = 0.5;
  names.push_back("cycle_10_70_05c_t318");
  v.push_back(y);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery arbitrage optimisation and degradation validation"};
  app.require_subcommand(1);

  RunFlags rf;
  auto add_run_flags = [&](CLI::App* c) {
    c->add_option("--scenario", rf.scenario, "Scenario JSON file");
    c->add_option("--model", rf.model, "bucket | ecm | spm");
    c->add_option("--objective", rf.objective, "revenue | profit");
    c->add_option("--playback", rf.playback, "rescale | voltage_hold");
    c->add_option("--days", rf.days, "Number of committed days");
    c->add_option("--prices", rf.prices, "Price CSV (timestamp,price_eur_mwh)");
    c->add_option("--out", rf.out, "Output directory");
    c->add_option("--bucket-params", rf.bucket, "Bucket parameter JSON");
    c->add_option("--ecm-params", rf.ecm, "ECM parameter JSON");
    c->add_option("--spm-params", rf.spm, "SPM parameter JSON");
    c->add_option("--soc", rf.soc, "Initial state of charge");
    c->add_option("--seed", rf.seed, "Seed recorded in the run log");
    c->add_option("--max-iter", rf.max_iter, "Solver iteration cap per window");
    c->add_flag("--verbose", rf.verbose, "Print solver iterations to stderr");
  };
  CLI::App* run = app.add_subcommand("run", "Sliding-window optimisation of one scenario plus validation");
  add_run_flags(run);

  CLI::App* matrix = app.add_subcommand("matrix", "Run several scenarios and emit one ledger row each");
  std::vector<std::string> matrix_files;
  std::string matrix_out = "out/matrix.csv";
  matrix->add_option("scenarios", matrix_files, "Scenario JSON files");
  matrix->add_option("--out", matrix_out, "Combined CSV");

  CLI::App* bench = app.add_subcommand("bench", "Score aging predictions against measured capacity series");
  std::string bench_data = (data_dir() / "bench").string();
  std::string bench_out = "out/bench.csv";
  std::string fixtures_dir;
  bench->add_option("--data", bench_data, "Directory of <name>.csv + <name>.json datasets");
  bench->add_option("--out", bench_out, "Table CSV");
  bench->add_option("--generate-fixtures", fixtures_dir, "Write SPM-generated synthetic datasets to this directory and exit");

  CLI::App* validate = app.add_subcommand("validate", "Replay an existing profile through the SPM");
  std::string v_profile, v_prices, v_mode = "rescale", v_out = "out/validate.csv", v_spm, v_bucket;
  double v_offset_h = 0.0, v_soc = 0.5;
  validate->add_option("--profile", v_profile, "Profile CSV (start_s,power_w|current_a)")->required();
  validate->add_option("--prices", v_prices, "Price CSV")->required();
  validate->add_option("--mode", v_mode, "rescale | voltage_hold");
  validate->add_option("--offset-hours", v_offset_h, "Profile start within the price file");
  validate->add_option("--soc", v_soc, "Initial state of charge");
  validate->add_option("--spm-params", v_spm, "SPM parameter JSON");
  validate->add_option("--bucket-params", v_bucket, "Bucket parameter JSON (nominal voltage for power profiles)");
  validate->add_option("--out", v_out, "Ledger CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      Scenario s = scenario_from(rf);
      ScenarioResult r = run_scenario(s);
      std::cout << ledger_header() << "\n" << ledger_row(s, r) << "\n";
      if (r.exit_code != 0) std::cerr << r.run.rest_days() << " rest day(s) substituted after solver failures\n";
      return r.exit_code == 0 ? kExitOk : kExitDegraded;
    }
    if (*matrix) {
      std::vector<Scenario> list;
      for (const auto& f : matrix_files) list.push_back(load_scenario(f));
      auto rows = run_matrix(list);
      std::string csv = matrix_csv(rows);
      write_text(matrix_out, csv);
      std::cout << csv;
      int code = kExitOk;
      for (const auto& r : rows) {
        if (!r.ok) code = kExitConfig;
        else if (r.result.exit_code != 0 && code == kExitOk) code = kExitDegraded;
      }
      return code;
    }
    if (*bench) {
      if (!fixtures_dir.empty()) {
        fs::create_directories(fixtures_dir);
        std::vector<std::string> names;
        auto protocols = fixture_protocols(names);
        ModelSetup spm = ModelSetup::spm(default_spm_params());
        for (std::size_t i = 0; i < protocols.size(); ++i) {
          write_protocol(protocols[i], fs::path(fixtures_dir) / (names[i] + ".json"));
          write_measured(run_protocol(protocols[i], spm), fs::path(fixtures_dir) / (names[i] + ".csv"));
          std::cout << "wrote " << names[i] << "\n";
        }
        return kExitOk;
      }
      auto datasets = load_datasets(bench_data);
      if (datasets.empty()) throw ConfigError("no datasets in " + bench_data);
      std::vector<BenchModel> models{{"bucket", ModelSetup::bucket(default_bucket_params())},
                                     {"ecm", ModelSetup::ecm(default_ecm_params())},
                                     {"spm", ModelSetup::spm(default_spm_params())}};
      std::string csv = benchmark_table(datasets, models).to_csv();
      write_text(bench_out, csv);
      std::cout << csv;
      return kExitOk;
    }
    if (*validate) {
      PriceSeries prices = load_prices(v_prices);
      ControlProfile profile = load_profile(v_profile);
      SpmModel oracle(v_spm.empty() ? default_spm_params() : load_spm_params(v_spm));
      double nominal = (v_bucket.empty() ? default_bucket_params() : load_bucket_params(v_bucket)).nominal_voltage;
      LedgerReport rep = validate_profile(profile, parse_playback_mode(v_mode), prices, v_offset_h * 3600.0, oracle,
                                          oracle.state_at_soc(v_soc), nominal);
      std::string csv =
          "playback,revenue_eur,degradation_cost_eur,profit_eur,lost_capacity_pct,lost_lithium_ah,scale_factor\n" +
          join({to_string(rep.mode), format_double(rep.revenue, 12), format_double(rep.degradation_cost, 12),
                format_double(rep.profit, 12), format_double(rep.lost_capacity_pct, 12),
                format_double(rep.lost_lithium_ah, 12), format_double(rep.scale_factor, 12)},
               ",") +
          "\n";
      write_text(v_out, csv);
      std::cout << csv;
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
