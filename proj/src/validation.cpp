#include "batopt/validation.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"

namespace batopt {

namespace {

constexpr double kVoltageSlack = 1e-9;
constexpr double kHoldTol = 1e-6;

int steps_of(const ControlProfile& p) {
  double q = p.interval_s / kReplayStep;
  if (!(q >= 1.0) || std::abs(q - std::round(q)) > 1e-9)
    throw ConfigError("profile interval must be a multiple of 5 s");
  return static_cast<int>(std::lround(q));
}

ControlProfile as_current(const ControlProfile& p, double nominal_voltage) {
  if (p.kind == ControlKind::current_a) return p;
  return power_to_current(p, nominal_voltage);
}

std::string dump(const SpmState& s) {
  std::string out = "c_pos=[";
  for (double c : s.c_pos) out += format_double(c, 8) + " ";
  out += "] c_neg=[";
  for (double c : s.c_neg) out += format_double(c, 8) + " ";
  out += "] T=" + format_double(s.temperature, 8) + " delta=" + format_double(s.sei_thickness, 8) +
         " L=" + format_double(s.lost_lithium_ah, 8);
  return out;
}

}  // namespace

std::string to_string(PlaybackMode m) { return m == PlaybackMode::rescale ? "rescale" : "voltage_hold"; }

PlaybackMode parse_playback_mode(const std::string& s) {
  if (s == "rescale") return PlaybackMode::rescale;
  if (s == "voltage_hold" || s == "hold") return PlaybackMode::voltage_hold;
  throw ConfigError("unknown playback mode '" + s + "'");
}

ReplayTrace replay(const ControlProfile& current, const SpmModel& model, const SpmState& x0, bool stop_early) {
  const int steps = steps_of(current);
  const auto& p = model.params();
  ReplayTrace tr;
  tr.v_lowest = std::numeric_limits<double>::infinity();
  tr.v_highest = -std::numeric_limits<double>::infinity();
  SpmState s = x0;
  for (std::size_t k = 0; k < current.size(); ++k) {
    const double i = current.values[k];
    for (int j = 0; j < steps; ++j) {
      const double t = (static_cast<double>(k) * steps + j) * kReplayStep;
      SpmOperatingPoint op;
      SpmStepResult r;
      try {
        r = model.step(s, i, kReplayStep, p.side_reaction, &op);
      } catch (const DomainError& e) {
        tr.violations.push_back("t=" + format_double(t, 10) + " s: " + e.what());
        tr.final_state = s;
        return tr;
      }
      tr.v_lowest = std::min(tr.v_lowest, op.voltage);
      tr.v_highest = std::max(tr.v_highest, op.voltage);
      if (op.voltage < p.v_min - kVoltageSlack || op.voltage > p.v_max + kVoltageSlack) {
        tr.violations.push_back("t=" + format_double(t, 10) + " s: voltage " + format_double(op.voltage, 10) +
                                " V at " + format_double(i, 8) + " A");
        if (stop_early) {
          tr.final_state = s;
          return tr;
        }
      }
      if (!model.concentrations_valid(r.state)) {
        tr.violations.push_back("t=" + format_double(t + kReplayStep, 10) + " s: concentration out of range");
        if (stop_early) {
          tr.final_state = r.state;
          return tr;
        }
      }
      s = r.state;
    }
  }
  tr.final_state = s;
  return tr;
}

RescaleResult rescale_profile(const ControlProfile& current, const SpmModel& model, const SpmState& x0) {
  RescaleResult res;
  if (replay(current, model, x0).violations.empty()) {
    res.profile = current;
    res.factor = 1.0;
    return res;
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    if (replay(current.scaled(mid), model, x0).violations.empty())
      lo = mid;
    else
      hi = mid;
  }
  if (lo < 1e-3) {
    if (!replay(current.scaled(1e-3), model, x0).violations.empty())
      throw DegenerateProfileError("profile violates the limits even when scaled by 1e-3");
    lo = 1e-3;
  }
  res.factor = lo;
  res.profile = current.scaled(lo);
  return res;
}

HoldResult voltage_hold_playback(const ControlProfile& current, const SpmModel& model, const SpmState& x0) {
  const int steps = steps_of(current);
  const auto& p = model.params();
  const double one_c = p.nominal_capacity_ah;
  HoldResult out;
  out.executed.kind = ControlKind::current_a;
  out.executed.interval_s = kReplayStep;
  out.executed.values.reserve(current.size() * static_cast<std::size_t>(steps));
  out.voltage.reserve(out.executed.values.capacity());
  SpmState s = x0;

  // Voltage as a function of current; kinetics failures read as far beyond the limit.
  auto volt = [&](double i) {
    try {
      return model.operating_point(s, i, p.side_reaction).voltage;
    } catch (const DomainError&) {
      return i > 0.0 ? p.v_max + 1.0 : p.v_min - 1.0;
    }
  };

  for (std::size_t k = 0; k < current.size(); ++k) {
    for (int j = 0; j < steps; ++j) {
      double i = current.values[k];
      double v = volt(i);
      if (v > p.v_max || v < p.v_min) {
        const bool upper = v > p.v_max;
        const double limit = upper ? p.v_max : p.v_min;
        auto f = [&](double x) { return volt(x) - limit; };
        // Bracket from the request towards the opposite direction.
        double a = i, b = 0.0, fb = f(b);
        for (int e = 0; (upper ? fb > 0.0 : fb < 0.0) && e < 8; ++e) {
          b = upper ? -one_c * std::ldexp(1.0, e) : one_c * std::ldexp(1.0, e);
          fb = f(b);
        }
        if (upper ? fb > 0.0 : fb < 0.0)
          throw ReplayError("voltage hold: no current keeps V inside the limits; " + dump(s));
        std::uintmax_t iters = 200;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(1.0, std::abs(x)); };
        std::pair<double, double> br;
        try {
          br = a < b ? boost::math::tools::toms748_solve(f, a, b, f(a), fb, tol, iters)
                     : boost::math::tools::toms748_solve(f, b, a, fb, f(a), tol, iters);
        } catch (const std::exception& e) {
          throw ReplayError(std::string("voltage hold root find failed: ") + e.what() + "; " + dump(s));
        }
        // Endpoint on the safe side of the limit.
        double x1 = br.first, x2 = br.second;
        double f1 = f(x1), f2 = f(x2);
        bool safe1 = upper ? f1 <= 0.0 : f1 >= 0.0;
        i = safe1 ? x1 : x2;
        double fi = safe1 ? f1 : f2;
        if (!(std::abs(fi) <= kHoldTol) || (upper ? fi > 0.0 : fi < 0.0))
          throw ReplayError("voltage hold residual " + format_double(fi, 6) + " V; " + dump(s));
        v = limit + fi;
        ++out.held_steps;
      }
      SpmStepResult r;
      try {
        r = model.step(s, i, kReplayStep, p.side_reaction, nullptr);
      } catch (const DomainError& e) {
        throw ReplayError(std::string("voltage hold step failed: ") + e.what() + "; " + dump(s));
      }
      out.executed.values.push_back(i);
      out.voltage.push_back(v);
      s = r.state;
    }
  }
  out.final_state = s;
  return out;
}

LedgerReport account(const ControlProfile& executed, const PriceSeries& prices, double offset_s,
                     const SpmModel& model, const SpmState& x0, double lambda_per_ah, double cells) {
  if (executed.kind != ControlKind::current_a) throw ConfigError("accounting expects a current profile");
  const int steps = steps_of(executed);
  if (offset_s < 0.0 || offset_s + executed.duration_s() > prices.horizon_s() + 1e-6)
    throw RangeError("profile extends beyond the price horizon");
  const auto& p = model.params();
  LedgerReport rep;
  SpmState s = x0;
  double cash = 0.0;  // per cell, EUR
  const int hour_steps = static_cast<int>(std::lround(3600.0 / kReplayStep));
  int n = 0;
  for (std::size_t k = 0; k < executed.size(); ++k) {
    const double i = executed.values[k];
    for (int j = 0; j < steps; ++j, ++n) {
      const double t = n * kReplayStep;
      if (n % hour_steps == 0) rep.hourly_soc.push_back(model.soc(s));
      SpmOperatingPoint op;
      SpmStepResult r;
      try {
        r = model.step(s, i, kReplayStep, p.side_reaction, &op);
      } catch (const DomainError& e) {
        throw ReplayError("accounting refused at t=" + format_double(t, 10) + " s: " + e.what());
      }
      if (op.voltage < p.v_min - kVoltageSlack || op.voltage > p.v_max + kVoltageSlack || !model.concentrations_valid(r.state))
        throw ReplayError("accounting refused: profile violates the limits at t=" + format_double(t, 10) + " s");
      cash -= i * op.voltage * price_at(prices, offset_s + t) * kReplayStep / 3600.0;
      if ((n + 1) % hour_steps == 0) rep.hourly_revenue.push_back(cells * cash);
      s = r.state;
    }
  }
  rep.hourly_soc.push_back(model.soc(s));
  rep.revenue = cells * cash;
  rep.capacity_before_ah = model.measure_capacity(x0);
  rep.capacity_after_ah = model.measure_capacity(s);
  rep.lost_capacity_ah = rep.capacity_before_ah - rep.capacity_after_ah;
  rep.lost_capacity_pct = 100.0 * rep.lost_capacity_ah / rep.capacity_before_ah;
  rep.lost_lithium_ah = s.lost_lithium_ah - x0.lost_lithium_ah;
  rep.degradation_cost = rep.lost_capacity_ah * lambda_per_ah * cells;
  rep.profit = rep.revenue - rep.degradation_cost;
  return rep;
}

LedgerReport validate_profile(const ControlProfile& profile, PlaybackMode mode, const PriceSeries& prices,
                              double offset_s, const SpmModel& model, const SpmState& x0,
                              double nominal_voltage) {
  ControlProfile current = as_current(profile, nominal_voltage);
  const auto& p = model.params();
  LedgerReport rep;
  if (mode == PlaybackMode::rescale) {
    RescaleResult rs = rescale_profile(current, model, x0);
    rep = account(rs.profile, prices, offset_s, model, x0, p.degradation_cost_per_ah, p.cells);
    rep.scale_factor = rs.factor;
    if (rs.factor < 1.0)
      rep.violations.push_back("profile scaled by " + format_double(rs.factor, 6));
  } else {
    HoldResult h = voltage_hold_playback(current, model, x0);
    rep = account(h.executed, prices, offset_s, model, x0, p.degradation_cost_per_ah, p.cells);
    if (h.held_steps > 0)
      rep.violations.push_back(std::to_string(h.held_steps) + " steps held at a voltage limit");
  }
  rep.mode = mode;
  return rep;
}

}  // namespace batopt
