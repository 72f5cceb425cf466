#include "batopt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"

namespace batopt {

namespace {

constexpr double kStep = 5.0;

using json = nlohmann::ordered_json;

// Rest or constant-current SPM integration with a shortened last step.
SpmState spm_advance(const SpmModel& m, SpmState s, double current, double seconds) {
  const bool sr = m.params().side_reaction;
  while (seconds > 1e-9) {
    double h = std::min(kStep, seconds);
    s = m.step(s, current, h, sr).state;
    seconds -= h;
  }
  return s;
}

std::vector<double> checkup_times_days(const AgingProtocol& p) {
  std::vector<double> t{0.0};
  if (p.duration_days <= 0.0) return t;
  for (int k = 1;; ++k) {
    double v = k * p.checkup_days;
    if (v >= p.duration_days - 1e-12) break;
    t.push_back(v);
  }
  t.push_back(p.duration_days);
  return t;
}

bool checkup_due(const AgingProtocol& p, int cycle) {
  return cycle % p.checkup_cycles == 0 || cycle == p.n_cycles;
}

MeasuredSeries spm_protocol(const AgingProtocol& pr, const SpmModel& base) {
  SpmParams prm = base.params();
  prm.thermal.t_env = pr.temperature_k;
  SpmModel m(prm);
  MeasuredSeries out;
  const double ti = pr.temperature_k;
  auto capacity = [&](SpmState s) {
    s.temperature = ti;
    return m.measure_capacity(s);
  };
  if (pr.kind == AgingProtocol::Kind::calendar) {
    out.axis = AgingAxis::days;
    SpmState s = m.state_at_soc(pr.soc);
    s.temperature = ti;
    const double c0 = capacity(s);
    double t_prev = 0.0;
    for (double t : checkup_times_days(pr)) {
      s = spm_advance(m, s, 0.0, (t - t_prev) * 86400.0);
      t_prev = t;
      out.points.push_back({t, t == 0.0 ? 1.0 : capacity(s) / c0});
    }
    return out;
  }
  out.axis = AgingAxis::full_cycles;
  const double cap = prm.nominal_capacity_ah;
  // Charge moving the SoC from 0 to 1.
  const double span_ah = (m.pos_stoich_empty() - m.pos_stoich_full()) * prm.pos.capacity_ah(prm.faraday);
  SpmState s = m.state_at_soc(pr.soc_lo);
  s.temperature = ti;
  const double c0 = capacity(s);
  out.points.push_back({0.0, 1.0});
  double throughput = 0.0;
  const int max_steps = static_cast<int>(4.0 * 3600.0 / kStep / std::min(1.0, pr.charge_rate_c)) + 10;
  auto half = [&](double current, double target) {
    for (int n = 0;; ++n) {
      double left = std::abs(target - m.soc(s)) * span_ah * 3600.0 / std::abs(current);
      if (left <= 1e-9) break;
      if (n > max_steps) throw ProtocolError("SoC target not reached within the step budget");
      double h = std::min(kStep, left);
      SpmOperatingPoint op;
      SpmStepResult r = m.step(s, current, h, prm.side_reaction, &op);
      if (op.voltage > prm.v_max || op.voltage < prm.v_min)
        throw ProtocolError("SoC window [" + format_double(pr.soc_lo, 4) + ", " + format_double(pr.soc_hi, 4) +
                            "] unreachable: " + format_double(op.voltage, 6) + " V at SoC " + format_double(m.soc(s), 6));
      s = r.state;
      throughput += std::abs(current) * h / 3600.0;
      if (h < kStep) break;
    }
  };
  for (int c = 1; c <= pr.n_cycles; ++c) {
    try {
      half(pr.charge_rate_c * cap, pr.soc_hi);
      half(-cap, pr.soc_lo);
    } catch (const DomainError& e) {
      throw ProtocolError(std::string("SoC window unreachable: ") + e.what());
    }
    if (checkup_due(pr, c)) out.points.push_back({throughput / (2.0 * span_ah), capacity(s) / c0});
  }
  return out;
}

// Time-weighted left-point statistics for a sampled trajectory with variable steps.
ProfileStats weighted_stats(const std::vector<double>& z, const std::vector<double>& v,
                            const std::vector<double>& i, const std::vector<double>& dt, double temperature_k) {
  double t = 0.0, sv = 0.0, sv2 = 0.0, sz = 0.0, q = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    t += dt[k];
    sv += v[k] * dt[k];
    sv2 += v[k] * v[k] * dt[k];
    sz += z[k] * dt[k];
    q += std::abs(i[k]) * dt[k];
  }
  ProfileStats s;
  s.v_mean = sv / t;
  s.v_rms = std::sqrt(sv2 / t);
  const double z_mean = sz / t;
  double dev = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) dev += std::abs(z_mean - z[k]) * dt[k];
  s.soc_dev = 2.0 * dev / t;
  s.temperature_k = temperature_k;
  s.duration_s = t;
  s.throughput_ah = q / 3600.0;
  return s;
}

MeasuredSeries ecm_protocol(const AgingProtocol& pr, EcmConfig cfg) {
  cfg.schmalstieg.scale_divisor = 1.0;
  EcmParams& p = cfg.ecm;
  p.temperature_k = pr.temperature_k;
  MeasuredSeries out;
  auto relative = [&](const ProfileStats& st) {
    return 1.0 - schmalstieg_lost_capacity(st, p, cfg.schmalstieg) / p.capacity_ah;
  };
  if (pr.kind == AgingProtocol::Kind::calendar) {
    out.axis = AgingAxis::days;
    const double v = ecm_voltage(EcmState{pr.soc, 0.0}, 0.0, p);
    for (double t : checkup_times_days(pr)) {
      if (t == 0.0) {
        out.points.push_back({0.0, 1.0});
        continue;
      }
      double z = pr.soc, i = 0.0;
      ProfileStats st = profile_stats({&z, 1}, {&v, 1}, {&i, 1}, pr.temperature_k, t * 86400.0);
      out.points.push_back({t, relative(st)});
    }
    return out;
  }
  out.axis = AgingAxis::full_cycles;
  out.points.push_back({0.0, 1.0});
  std::vector<double> zs, vs, is, dts;
  EcmState s{pr.soc_lo, 0.0};
  double throughput = 0.0;
  const int max_steps = static_cast<int>(4.0 * 3600.0 / kStep / std::min(1.0, pr.charge_rate_c)) + 10;
  auto half = [&](double current, double target) {
    for (int n = 0;; ++n) {
      double left = std::abs(target - s.soc) * p.capacity_ah * 3600.0 / std::abs(current);
      if (left <= 1e-9) break;
      if (n > max_steps) throw ProtocolError("SoC target not reached within the step budget");
      double h = std::min(kStep, left);
      double v = ecm_voltage(s, current, p);
      if (v > p.v_max || v < p.v_min)
        throw ProtocolError("SoC window [" + format_double(pr.soc_lo, 4) + ", " + format_double(pr.soc_hi, 4) +
                            "] unreachable: " + format_double(v, 6) + " V at SoC " + format_double(s.soc, 6));
      zs.push_back(s.soc);
      vs.push_back(v);
      is.push_back(current);
      dts.push_back(h);
      s = ecm_step(s, current, h, p).state;
      throughput += std::abs(current) * h / 3600.0;
      if (h < kStep) break;
    }
  };
  for (int c = 1; c <= pr.n_cycles; ++c) {
    half(pr.charge_rate_c * p.capacity_ah, pr.soc_hi);
    half(-p.capacity_ah, pr.soc_lo);
    if (checkup_due(pr, c)) {
      ProfileStats st = weighted_stats(zs, vs, is, dts, pr.temperature_k);
      out.points.push_back({throughput / (2.0 * p.capacity_ah), relative(st)});
    }
  }
  return out;
}

// Temperature is ignored; only throughput and peak power age the bucket.
MeasuredSeries bucket_protocol(const AgingProtocol& pr, const BucketParams& p) {
  MeasuredSeries out;
  if (pr.kind == AgingProtocol::Kind::calendar) {
    out.axis = AgingAxis::days;
    for (double t : checkup_times_days(pr)) out.points.push_back({t, 1.0});
    return out;
  }
  out.axis = AgingAxis::full_cycles;
  out.points.push_back({0.0, 1.0});
  const double e = p.energy_wh;
  const double peak = std::max(pr.charge_rate_c, 1.0) * e;
  double throughput_wh = 0.0;
  for (int c = 1; c <= pr.n_cycles; ++c) {
    throughput_wh += 2.0 * (pr.soc_hi - pr.soc_lo) * e;
    if (checkup_due(pr, c)) {
      double lost = p.k_power * peak + p.k_throughput * throughput_wh;
      out.points.push_back({throughput_wh / (2.0 * e), 1.0 - lost / e});
    }
  }
  return out;
}

AgingAxis parse_axis(const std::string& s, std::size_t line) {
  if (s == "days") return AgingAxis::days;
  if (s == "full_cycles") return AgingAxis::full_cycles;
  throw ParseError("unknown axis '" + s + "'", line);
}

}  // namespace

void AgingProtocol::validate() const {
  if (!(temperature_k > 0.0)) throw ConfigError("protocol temperature must be positive");
  if (kind == Kind::calendar) {
    if (!(soc >= 0.0 && soc <= 1.0)) throw ConfigError("calendar SoC outside [0, 1]");
    if (!(duration_days >= 0.0)) throw ConfigError("negative protocol duration");
    if (!(checkup_days > 0.0)) throw ConfigError("checkup interval must be positive");
  } else {
    if (!(soc_lo >= 0.0 && soc_lo < soc_hi && soc_hi <= 1.0)) throw ConfigError("cycle window must satisfy 0 <= lo < hi <= 1");
    if (!(charge_rate_c > 0.0)) throw ConfigError("charge rate must be positive");
    if (n_cycles < 0 || checkup_cycles < 1) throw ConfigError("bad cycle counts");
  }
}

void MeasuredSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (i > 0 && !(p.axis > points[i - 1].axis)) throw SchemaError("axis values must be strictly increasing");
    if (!(p.relative_capacity > 0.0 && p.relative_capacity <= 1.1))
      throw SchemaError("relative capacity outside (0, 1.1]");
  }
}

std::string to_string(AgingAxis a) { return a == AgingAxis::days ? "days" : "full_cycles"; }

MeasuredSeries run_protocol(const AgingProtocol& protocol, const ModelSetup& model) {
  protocol.validate();
  switch (model.kind()) {
    case ModelKind::bucket: return bucket_protocol(protocol, model.bucket_params());
    case ModelKind::ecm: return ecm_protocol(protocol, model.ecm_config());
    case ModelKind::spm: return spm_protocol(protocol, *model.spm_model());
  }
  throw ConfigError("unknown model");
}

double rmse(const MeasuredSeries& sim, const MeasuredSeries& meas) {
  if (sim.axis != meas.axis) throw ConfigError("series use different axes");
  if (meas.points.empty()) throw ConfigError("no measured points");
  if (sim.points.empty()) throw ExtrapolationError("empty simulation");
  const auto& sp = sim.points;
  const double tol = 1e-9 * std::max(1.0, std::abs(sp.back().axis));
  double acc = 0.0;
  for (const auto& m : meas.points) {
    if (m.axis < sp.front().axis - tol || m.axis > sp.back().axis + tol)
      throw ExtrapolationError("measured point at " + format_double(m.axis) + " outside the simulated span");
    double v;
    if (sp.size() == 1 || m.axis <= sp.front().axis) {
      v = sp.front().relative_capacity;
    } else if (m.axis >= sp.back().axis) {
      v = sp.back().relative_capacity;
    } else {
      auto it = std::upper_bound(sp.begin(), sp.end(), m.axis,
                                 [](double a, const AgingPoint& p) { return a < p.axis; });
      const auto& b = *it;
      const auto& a = *(it - 1);
      double f = (m.axis - a.axis) / (b.axis - a.axis);
      v = a.relative_capacity + f * (b.relative_capacity - a.relative_capacity);
    }
    double d = v - m.relative_capacity;
    acc += d * d;
  }
  return 100.0 * std::sqrt(acc / static_cast<double>(meas.points.size()));
}

MeasuredSeries load_measured(const std::filesystem::path& csv) {
  CsvDocument doc = read_csv(csv);
  if (doc.header != std::vector<std::string>{"axis", "value", "relative_capacity"})
    throw SchemaError(csv.string() + ": header must be axis,value,relative_capacity");
  if (doc.rows.empty()) throw SchemaError(csv.string() + ": no data rows");
  MeasuredSeries s;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& r = doc.rows[i];
    if (r.fields.size() != 3) throw ParseError("expected 3 fields", r.line);
    AgingAxis a = parse_axis(r.fields[0], r.line);
    if (i == 0) s.axis = a;
    else if (a != s.axis) throw SchemaError("mixed axes at line " + std::to_string(r.line));
    s.points.push_back({parse_double(r.fields[1], r.line), parse_double(r.fields[2], r.line)});
  }
  s.validate();
  return s;
}

void write_measured(const MeasuredSeries& s, const std::filesystem::path& csv) {
  std::ofstream f(csv);
  if (!f) throw ConfigError("cannot write " + csv.string());
  f << "axis,value,relative_capacity\n";
  for (const auto& p : s.points)
    f << to_string(s.axis) << ',' << format_double(p.axis) << ',' << format_double(p.relative_capacity) << '\n';
}

AgingProtocol load_protocol(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open protocol descriptor " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  AgingProtocol p;
  try {
    std::string kind = j.at("kind").get<std::string>();
    p.temperature_k = j.at("temperature_k").get<double>();
    if (kind == "calendar") {
      p.kind = AgingProtocol::Kind::calendar;
      p.soc = j.at("soc").get<double>();
      p.duration_days = j.at("duration_days").get<double>();
      p.checkup_days = j.at("checkup_days").get<double>();
    } else if (kind == "cycle") {
      p.kind = AgingProtocol::Kind::cycle;
      p.soc_lo = j.at("soc_lo").get<double>();
      p.soc_hi = j.at("soc_hi").get<double>();
      p.charge_rate_c = j.at("charge_rate_c").get<double>();
      p.n_cycles = j.at("n_cycles").get<int>();
      p.checkup_cycles = j.at("checkup_cycles").get<int>();
    } else {
      throw ConfigError(path.string() + ": unknown protocol kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  p.validate();
  return p;
}

void write_protocol(const AgingProtocol& p, const std::filesystem::path& path) {
  json j;
  if (p.kind == AgingProtocol::Kind::calendar) {
    j["kind"] = "calendar";
    j["temperature_k"] = p.temperature_k;
    j["soc"] = p.soc;
    j["duration_days"] = p.duration_days;
    j["checkup_days"] = p.checkup_days;
  } else {
    j["kind"] = "cycle";
    j["temperature_k"] = p.temperature_k;
    j["soc_lo"] = p.soc_lo;
    j["soc_hi"] = p.soc_hi;
    j["charge_rate_c"] = p.charge_rate_c;
    j["n_cycles"] = p.n_cycles;
    j["checkup_cycles"] = p.checkup_cycles;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::vector<BenchDataset> load_datasets(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("bench directory " + dir.string() + " not found");
  std::vector<BenchDataset> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    BenchDataset d;
    d.name = e.path().stem().string();
    d.protocol = load_protocol(e.path());
    auto csv = e.path();
    csv.replace_extension(".csv");
    if (std::filesystem::exists(csv)) d.measured = load_measured(csv);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::string BenchTable::to_csv() const {
  std::string s = "model";
  for (const auto& d : datasets) s += "," + d;
  s += ",average\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v, 6) : std::string("n/a"); };
  for (std::size_t m = 0; m < models.size(); ++m) {
    s += models[m];
    for (const auto& v : rmse[m]) s += "," + cell(v);
    s += "," + cell(average[m]) + "\n";
  }
  return s;
}

BenchTable benchmark_table(const std::vector<BenchDataset>& datasets, const std::vector<BenchModel>& models) {
  BenchTable t;
  for (const auto& d : datasets) t.datasets.push_back(d.name);
  for (const auto& m : models) {
    t.models.push_back(m.name);
    std::vector<std::optional<double>> row;
    double sum = 0.0;
    int n = 0;
    for (const auto& d : datasets) {
      std::optional<double> v;
      if (d.measured) {
        try {
          v = rmse(run_protocol(d.protocol, m.setup), *d.measured);
        } catch (const ProtocolError&) {
        } catch (const ExtrapolationError&) {
        }
      }
      if (v) {
        sum += *v;
        ++n;
      }
      row.push_back(v);
    }
    t.rmse.push_back(std::move(row));
    t.average.push_back(n > 0 ? std::optional<double>(sum / n) : std::nullopt);
  }
  return t;
}

}  // namespace batopt
