#include "batopt/params_io.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "batopt/errors.hpp"
#include "json.hpp"

namespace batopt {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  double num(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
    return v.get<double>();
  }
  bool flag(const std::string& key) {
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true/false");
    return v.get<bool>();
  }
  std::string str(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }
  Reader sub(const std::string& key) { return Reader(at(key), where_ + "." + key); }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& at(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(where_ + ": missing key '" + key + "'");
    seen_.insert(key);
    return *it;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void expect_model(Reader& r, const std::string& model, const std::filesystem::path& path) {
  if (r.str("model") != model) throw ConfigError(path.string() + ": expected model '" + model + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : base.parent_path() / p;
}

ElectrodeParams read_electrode(Reader r, const std::filesystem::path& path) {
  ElectrodeParams e;
  e.radius = r.num("radius");
  e.c_max = r.num("c_max");
  e.diffusivity_ref = r.num("diffusivity_ref");
  e.diffusivity_activation = r.num("diffusivity_activation");
  e.rate_ref = r.num("rate_ref");
  e.rate_activation = r.num("rate_activation");
  e.specific_area = r.num("specific_area");
  e.area = r.num("area");
  e.ocv = Table1d::load_csv(resolve(path, r.str("ocv_table")), "stoichiometry", "ocv_v",
                            Table1d::Method::pchip);
  r.finish();
  return e;
}

}  // namespace

BucketParams load_bucket_params(const std::filesystem::path& path) {
  json j = read_json(path);
  Reader r(j, path.filename().string());
  expect_model(r, "bucket", path);
  BucketParams p;
  p.energy_wh = r.num("energy_wh");
  p.cells = r.num("cells");
  p.degradation_cost_per_wh = r.num("degradation_cost_per_wh");
  p.k_power = r.num("k_power");
  p.k_throughput = r.num("k_throughput");
  p.power_bound_w = r.num("power_bound_w");
  p.nominal_voltage = r.num("nominal_voltage");
  r.finish();
  p.validate();
  return p;
}

EcmConfig load_ecm_params(const std::filesystem::path& path) {
  json j = read_json(path);
  Reader r(j, path.filename().string());
  expect_model(r, "ecm", path);
  EcmConfig c;
  auto& p = c.ecm;
  p.capacity_ah = r.num("capacity_ah");
  p.r_series = r.num("r_series");
  p.r_parallel = r.num("r_parallel");
  p.c_parallel = r.num("c_parallel");
  p.ocv = Table1d::load_csv(resolve(path, r.str("ocv_table")), "soc", "ocv_v", Table1d::Method::linear);
  p.v_min = r.num("v_min");
  p.v_max = r.num("v_max");
  p.cells = r.num("cells");
  p.degradation_cost_per_ah = r.num("degradation_cost_per_ah");
  p.temperature_k = r.num("temperature_k");
  Reader s = r.sub("schmalstieg");
  Reader a = s.sub("alpha");
  c.schmalstieg.alpha.v_coeff = a.num("v_coeff");
  c.schmalstieg.alpha.v_offset = a.num("v_offset");
  c.schmalstieg.alpha.scale = a.num("scale");
  c.schmalstieg.alpha.temp_coeff = a.num("temp_coeff");
  a.finish();
  Reader b = s.sub("beta");
  c.schmalstieg.beta.quad = b.num("quad");
  c.schmalstieg.beta.v_ref = b.num("v_ref");
  c.schmalstieg.beta.offset = b.num("offset");
  c.schmalstieg.beta.dod = b.num("dod");
  b.finish();
  c.schmalstieg.scale_divisor = s.num("scale_divisor");
  c.schmalstieg.time_unit_s = s.num("time_unit_s");
  s.finish();
  r.finish();
  const auto& z = p.ocv.x();
  if (z.front() < 0.0 || z.back() > 1.0) throw ConfigError(path.string() + ": OCV soc outside [0, 1]");
  p.validate();
  c.schmalstieg.validate();
  return c;
}

SpmParams load_spm_params(const std::filesystem::path& path) {
  json j = read_json(path);
  Reader r(j, path.filename().string());
  expect_model(r, "spm", path);
  SpmParams p;
  p.pos = read_electrode(r.sub("pos"), path);
  p.neg = read_electrode(r.sub("neg"), path);
  p.alpha_ct = r.num("alpha_ct");
  p.electrons = r.num("electrons");
  p.c_electrolyte = r.num("c_electrolyte");
  p.entropic_coeff = r.num("entropic_coeff");
  p.r_batt = r.num("r_batt");
  p.r_sei = r.num("r_sei");
  Reader s = r.sub("sei");
  p.sei.electrons = s.num("electrons");
  p.sei.rate_ref = s.num("rate_ref");
  p.sei.rate_activation = s.num("rate_activation");
  p.sei.diffusivity_ref = s.num("diffusivity_ref");
  p.sei.diffusivity_activation = s.num("diffusivity_activation");
  p.sei.molar_mass = s.num("molar_mass");
  p.sei.density = s.num("density");
  p.sei.initial_thickness = s.num("initial_thickness");
  s.finish();
  Reader t = r.sub("thermal");
  p.thermal.density = t.num("density");
  p.thermal.volume = t.num("volume");
  p.thermal.heat_capacity = t.num("heat_capacity");
  p.thermal.h = t.num("h");
  p.thermal.area = t.num("area");
  p.thermal.t_env = t.num("t_env");
  p.thermal.t_ref = t.num("t_ref");
  t.finish();
  p.faraday = r.num("faraday");
  p.gas_constant = r.num("gas_constant");
  p.v_min = r.num("v_min");
  p.v_max = r.num("v_max");
  p.cells = r.num("cells");
  p.degradation_cost_per_ah = r.num("degradation_cost_per_ah");
  p.nominal_capacity_ah = r.num("nominal_capacity_ah");
  p.cyclable_lithium_ah = r.num("cyclable_lithium_ah");
  p.side_reaction = r.flag("side_reaction");
  r.finish();
  p.validate();
  return p;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("BATOPT_DATA_DIR"); env && *env) return env;
#ifdef BATOPT_DATA_DIR
  return BATOPT_DATA_DIR;
#else
  return "data";
#endif
}

BucketParams default_bucket_params() { return load_bucket_params(data_dir() / "params" / "bucket_default.json"); }
EcmConfig default_ecm_params() { return load_ecm_params(data_dir() / "params" / "ecm_default.json"); }
SpmParams default_spm_params() { return load_spm_params(data_dir() / "params" / "spm_default.json"); }

}  // namespace batopt
