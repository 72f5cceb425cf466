#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace batopt {

using TimePoint = std::chrono::sys_seconds;

// Hourly price signal. Values are held both as read from file (EUR/MWh)
// and in internal units (EUR/Wh).
class PriceSeries {
 public:
  static constexpr double kStepSeconds = 3600.0;
  static constexpr double kPerWhPerMWh = 1e-6;

  PriceSeries() = default;
  PriceSeries(TimePoint start, std::vector<double> eur_per_mwh);

  TimePoint start_time() const { return start_; }
  double step_s() const { return kStepSeconds; }
  std::size_t size() const { return per_wh_.size(); }
  double horizon_s() const { return static_cast<double>(size()) * kStepSeconds; }

  // EUR/Wh
  double operator[](std::size_t hour) const { return per_wh_[hour]; }
  const std::vector<double>& per_wh() const { return per_wh_; }
  const std::vector<double>& eur_per_mwh() const { return eur_mwh_; }

  // Hours [first, first + count).
  PriceSeries slice(std::size_t first_hour, std::size_t count) const;

 private:
  TimePoint start_{};
  std::vector<double> eur_mwh_;
  std::vector<double> per_wh_;
};

enum class PriceFormat { csv_eur_mwh };

PriceSeries load_prices(const std::filesystem::path& path,
                        PriceFormat format = PriceFormat::csv_eur_mwh);
void write_prices(const PriceSeries& series, const std::filesystem::path& path);

// Zero-order hold lookup; t in seconds from the series start.
double price_at(const PriceSeries& series, double t_s);

// Average of the price signal over [t0, t1), exact for the piecewise-constant signal.
double mean_price(const PriceSeries& series, double t0_s, double t1_s);

TimePoint parse_timestamp(const std::string& text);
std::string format_timestamp(TimePoint t);

}  // namespace batopt
