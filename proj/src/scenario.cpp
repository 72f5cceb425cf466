#include "batopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"
#include "batopt/params_io.hpp"

namespace batopt {

namespace fs = std::filesystem;

namespace {

using json = nlohmann::ordered_json;

void require_file(const fs::path& p, const std::string& what) {
  if (!p.empty() && !fs::exists(p)) throw SchemaError(what + " not found: " + p.string());
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

// Collects written files so they can be marked partial on failure.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << content;
    if (!f) throw ConfigError("write failed: " + p.string());
    written_.push_back(p);
  }

  void mark_partial() {
    for (auto& p : written_) {
      fs::path q = p;
      q += ".partial";
      std::error_code ec;
      fs::rename(p, q, ec);
      p = q;
    }
  }

  const std::vector<fs::path>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::string lines(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& l : v) s += l + "\n";
  return s;
}

std::string num(double v) { return format_double(v, 12); }

}  // namespace

void Scenario::validate() const {
  if (n_days < 1) throw ConfigError("n_days must be >= 1");
  if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) throw ConfigError("initial SoC outside [0, 1]");
  if (prices.empty()) throw ConfigError("scenario needs a price file");
  require_file(prices, "price file");
  require_file(bucket_params, "bucket parameter file");
  require_file(ecm_params, "ECM parameter file");
  require_file(spm_params, "SPM parameter file");
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("scenario file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": expected an object");
  const fs::path base = path.parent_path();
  Scenario s;
  s.name = path.stem().string();
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "name") s.name = v.get<std::string>();
      else if (k == "model") s.model = parse_model_kind(v.get<std::string>());
      else if (k == "objective") s.objective = parse_objective(v.get<std::string>());
      else if (k == "playback") s.playback = parse_playback_mode(v.get<std::string>());
      else if (k == "n_days") s.n_days = v.get<int>();
      else if (k == "window_days") s.window_days = v.get<double>();
      else if (k == "commit_days") s.commit_days = v.get<double>();
      else if (k == "initial_soc") s.initial_soc = v.get<double>();
      else if (k == "prices") s.prices = resolve(base, v.get<std::string>());
      else if (k == "bucket_params") s.bucket_params = resolve(base, v.get<std::string>());
      else if (k == "ecm_params") s.ecm_params = resolve(base, v.get<std::string>());
      else if (k == "spm_params") s.spm_params = resolve(base, v.get<std::string>());
      else if (k == "output_dir") s.output_dir = resolve(base, v.get<std::string>());
      else if (k == "seed") s.seed = v.get<unsigned>();
      else if (k == "solver") {
        for (auto jt = v.begin(); jt != v.end(); ++jt) {
          if (jt.key() == "max_iter") s.solver.max_iter = jt.value().get<int>();
          else if (jt.key() == "kkt_tol") s.solver.kkt_tol = jt.value().get<double>();
          else if (jt.key() == "feas_tol") s.solver.feas_tol = jt.value().get<double>();
          else throw ConfigError(path.string() + ": unknown solver key '" + jt.key() + "'");
        }
      } else {
        throw ConfigError(path.string() + ": unknown key '" + k + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return s;
}

ModelSetup build_model(const Scenario& s) {
  switch (s.model) {
    case ModelKind::bucket:
      return ModelSetup::bucket(s.bucket_params.empty() ? default_bucket_params() : load_bucket_params(s.bucket_params));
    case ModelKind::ecm:
      return ModelSetup::ecm(s.ecm_params.empty() ? default_ecm_params() : load_ecm_params(s.ecm_params));
    case ModelKind::spm:
      return ModelSetup::spm(s.spm_params.empty() ? default_spm_params() : load_spm_params(s.spm_params));
  }
  throw ConfigError("unknown model");
}

std::string ledger_header() {
  return "scenario,model,objective,playback,revenue_eur,degradation_cost_eur,profit_eur,lost_capacity_pct,"
         "lost_lithium_ah,scale_factor,model_revenue_eur,model_cost_eur,rest_days";
}

std::string ledger_row(const Scenario& s, const ScenarioResult& r) {
  const LedgerReport& l = r.ledger;
  return join({s.name, to_string(s.model), to_string(s.objective), to_string(s.playback), num(l.revenue),
               num(l.degradation_cost), num(l.profit), num(l.lost_capacity_pct), num(l.lost_lithium_ah),
               num(l.scale_factor), num(r.run.revenue()), num(r.run.cost()), std::to_string(r.run.rest_days())},
              ",");
}

ScenarioResult run_scenario(const Scenario& s) {
  s.validate();
  fs::create_directories(s.output_dir);
  ArtifactWriter out(s.output_dir);
  std::vector<std::string> log;
  try {
    PriceSeries prices = load_prices(s.prices);
    ModelSetup model = build_model(s);
    SpmModel oracle(s.spm_params.empty() ? default_spm_params() : load_spm_params(s.spm_params));
    const double nominal_v = (s.bucket_params.empty() ? default_bucket_params() : load_bucket_params(s.bucket_params)).nominal_voltage;

    WindowPlan plan;
    plan.n_days = s.n_days;
    plan.window_s = s.window_days * kDaySeconds;
    plan.commit_s = s.commit_days * kDaySeconds;
    plan.objective = s.objective;
    plan.solver = s.solver;
    const std::vector<double> x0 = model.shooting()->initial_state(s.initial_soc);

    ScenarioResult res;
    try {
      res.run = run_sliding(plan, model, prices, x0, &log);
    } catch (...) {
      if (!log.empty()) out.write("run_log.jsonl", lines(log));
      throw;
    }
    const YearRun& run = res.run;

    out.write("profile.csv", profile_csv(run.committed));
    {
      std::string b = "day";
      for (std::size_t i = 0; i < run.boundary_states.front().size(); ++i) b += ",x" + std::to_string(i);
      b += "\n";
      for (std::size_t d = 0; d < run.boundary_states.size(); ++d) {
        b += std::to_string(d);
        for (double v : run.boundary_states[d]) b += "," + format_double(v);
        b += "\n";
      }
      out.write("boundary_states.csv", b);
    }

    res.ledger = validate_profile(run.committed, s.playback, prices, 0.0, oracle, oracle.state_at_soc(s.initial_soc), nominal_v);
    const LedgerReport& led = res.ledger;
    out.write("ledger.csv", ledger_header() + "\n" + ledger_row(s, res) + "\n");

    // Stitched rollout of the committed profile under the optimisation model.
    OcpSpec full = window_spec(plan, model, prices, 0.0, run.committed.duration_s(), x0, plan.start_context);
    NlpInstance nlp(full);
    std::vector<double> w = nlp.rollout(run.committed.values);
    NlpEvaluation ev = nlp.evaluate(w, false);
    const int per_hour = static_cast<int>(std::lround(3600.0 / plan.interval_s));
    const int hours = s.n_days * static_cast<int>(std::lround(plan.commit_s / 3600.0));
    const bool power = run.committed.kind == ControlKind::power_w;
    std::string traj = std::string("hour,timestamp,price_eur_mwh,") + (power ? "control_w" : "control_a") +
                       ",soc_model,soc_validated\n";
    std::string cum = "hour,validated_revenue_eur,model_revenue_eur,model_cost_eur,model_profit_eur\n";
    const int nx = nlp.state_dim();
    const double cells = model.cells();
    double model_rev = 0.0, model_cost = 0.0;
    const int hours_per_day = static_cast<int>(std::lround(plan.commit_s / 3600.0));
    for (int h = 0; h < hours; ++h) {
      double u = 0.0;
      for (int k = h * per_hour; k < (h + 1) * per_hour; ++k) {
        u += run.committed.values[static_cast<std::size_t>(k)];
        model_rev -= cells * nlp.interval_prices()[static_cast<std::size_t>(k)] *
                     ev.results[static_cast<std::size_t>(k)].quad[0];
      }
      u /= per_hour;
      std::span<const double> xh(w.data() + nlp.x_index(h * per_hour, 0), static_cast<std::size_t>(nx));
      traj += std::to_string(h) + "," + format_timestamp(prices.start_time() + std::chrono::hours(h)) + "," +
              format_double(prices.eur_per_mwh()[static_cast<std::size_t>(h)]) + "," + num(u) + "," +
              num(model.shooting()->soc(xh)) + "," + num(led.hourly_soc[static_cast<std::size_t>(h)]) + "\n";
      if ((h + 1) % hours_per_day == 0) model_cost += run.days[static_cast<std::size_t>(h / hours_per_day)].cost;
      cum += std::to_string(h) + "," + num(led.hourly_revenue[static_cast<std::size_t>(h)]) + "," + num(model_rev) + "," +
             num(model_cost) + "," + num(model_rev - model_cost) + "\n";
    }
    out.write("trajectory.csv", traj);
    out.write("cumulative.csv", cum);

    json summary;
    summary["summary"] = s.name;
    summary["model"] = to_string(s.model);
    summary["objective"] = to_string(s.objective);
    summary["playback"] = to_string(s.playback);
    summary["seed"] = s.seed;
    summary["rest_days"] = run.rest_days();
    summary["revenue"] = led.revenue;
    summary["degradation_cost"] = led.degradation_cost;
    summary["profit"] = led.profit;
    summary["lost_capacity_pct"] = led.lost_capacity_pct;
    summary["scale_factor"] = led.scale_factor;
    summary["validation_notes"] = led.violations;
    log.push_back(summary.dump());
    out.write("run_log.jsonl", lines(log));

    res.artifacts = out.written();
    res.exit_code = run.rest_days() > 0 ? 1 : 0;
    return res;
  } catch (...) {
    out.mark_partial();
    throw;
  }
}

std::vector<MatrixRow> run_matrix(const std::vector<Scenario>& scenarios) {
  if (scenarios.empty()) throw ConfigError("matrix needs at least one scenario");
  std::vector<MatrixRow> rows;
  for (const auto& s : scenarios) {
    MatrixRow r;
    r.scenario = s;
    try {
      r.result = run_scenario(s);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string matrix_csv(const std::vector<MatrixRow>& rows) {
  std::string out = ledger_header() + ",status\n";
  for (const auto& r : rows) {
    if (r.ok) {
      out += ledger_row(r.scenario, r.result) + ",ok\n";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out += join({r.scenario.name, to_string(r.scenario.model), to_string(r.scenario.objective),
                   to_string(r.scenario.playback), "", "", "", "", "", "", "", "", ""},
                  ",") +
             ",error: " + msg + "\n";
    }
  }
  return out;
}

std::string profile_csv(const ControlProfile& p) {
  std::string s = std::string("start_s,") + (p.kind == ControlKind::power_w ? "power_w" : "current_a") + "\n";
  for (std::size_t k = 0; k < p.size(); ++k)
    s += format_double(p.interval_s * static_cast<double>(k)) + "," + format_double(p.values[k]) + "\n";
  return s;
}

void write_profile(const ControlProfile& p, const fs::path& csv) {
  std::ofstream f(csv, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + csv.string());
  f << profile_csv(p);
}

ControlProfile load_profile(const fs::path& csv) {
  if (!fs::exists(csv)) throw SchemaError("profile file not found: " + csv.string());
  CsvDocument doc = read_csv(csv);
  ControlProfile p;
  if (doc.header.size() != 2 || doc.header[0] != "start_s") throw SchemaError(csv.string() + ": header must be start_s,<power_w|current_a>");
  if (doc.header[1] == "power_w") p.kind = ControlKind::power_w;
  else if (doc.header[1] == "current_a") p.kind = ControlKind::current_a;
  else throw SchemaError(csv.string() + ": unknown control column '" + doc.header[1] + "'");
  if (doc.rows.size() < 2) throw SchemaError(csv.string() + ": need at least two rows");
  std::vector<double> t;
  for (const auto& r : doc.rows) {
    if (r.fields.size() != 2) throw ParseError("expected 2 fields", r.line);
    t.push_back(parse_double(r.fields[0], r.line));
    p.values.push_back(parse_double(r.fields[1], r.line));
  }
  p.interval_s = t[1] - t[0];
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - p.interval_s * static_cast<double>(k)) > 1e-6)
      throw SchemaError(csv.string() + ": rows are not on a uniform grid starting at 0");
  return p;
}

}  // namespace batopt
