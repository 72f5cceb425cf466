#include "batopt/market_data.hpp"

#include <cmath>
#include <fstream>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"

namespace batopt {

namespace {

int parse_int(const std::string& s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) throw std::invalid_argument("short");
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("digit");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

PriceSeries::PriceSeries(TimePoint start, std::vector<double> eur_per_mwh)
    : start_(start), eur_mwh_(std::move(eur_per_mwh)) {
  if (eur_mwh_.empty()) throw SchemaError("price series is empty");
  per_wh_.reserve(eur_mwh_.size());
  for (double v : eur_mwh_) {
    if (!std::isfinite(v)) throw SchemaError("non-finite price");
    per_wh_.push_back(v * kPerWhPerMWh);
  }
}

PriceSeries PriceSeries::slice(std::size_t first_hour, std::size_t count) const {
  if (count == 0 || first_hour + count > size())
    throw RangeError("price slice [" + std::to_string(first_hour) + ", " +
                     std::to_string(first_hour + count) + ") outside series of " +
                     std::to_string(size()) + " hours");
  std::vector<double> v(eur_mwh_.begin() + static_cast<std::ptrdiff_t>(first_hour),
                        eur_mwh_.begin() + static_cast<std::ptrdiff_t>(first_hour + count));
  return PriceSeries(start_ + std::chrono::hours(first_hour), std::move(v));
}

TimePoint parse_timestamp(const std::string& text) {
  using namespace std::chrono;
  // YYYY-MM-DD[T ]HH:MM[:SS][Z|+HH:MM|-HH:MM]
  try {
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':')
      throw std::invalid_argument("layout");
    int y = parse_int(text, 0, 4);
    int mo = parse_int(text, 5, 2);
    int d = parse_int(text, 8, 2);
    int hh = parse_int(text, 11, 2);
    int mi = parse_int(text, 14, 2);
    int ss = 0;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
      ss = parse_int(text, pos + 1, 2);
      pos += 3;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      }
    }
    int offset_min = 0;
    if (pos < text.size()) {
      if (text[pos] == 'Z' && pos + 1 == text.size()) {
        pos += 1;
      } else if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 &&
                 text[pos + 3] == ':') {
        int sign = text[pos] == '+' ? 1 : -1;
        offset_min = sign * (parse_int(text, pos + 1, 2) * 60 + parse_int(text, pos + 4, 2));
        pos += 6;
      } else {
        throw std::invalid_argument("zone");
      }
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) throw std::invalid_argument("range");
    return sys_days{ymd} + hours{hh} + minutes{mi} + seconds{ss} - minutes{offset_min};
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed timestamp '" + text + "'");
  }
}

std::string format_timestamp(TimePoint t) {
  using namespace std::chrono;
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

PriceSeries load_prices(const std::filesystem::path& path, PriceFormat format) {
  if (format != PriceFormat::csv_eur_mwh) throw ConfigError("unsupported price format");
  if (!std::filesystem::exists(path)) throw ConfigError("price file not found: " + path.string());
  CsvDocument doc = read_csv(path);
  if (doc.header.empty()) throw SchemaError(path.string() + ": empty price file");
  if (doc.header.size() != 2 || doc.header[0] != "timestamp" || doc.header[1] != "price_eur_mwh")
    throw SchemaError(path.string() + ": expected header 'timestamp,price_eur_mwh'");
  if (doc.rows.empty()) throw SchemaError(path.string() + ": no price rows");
  std::vector<double> values;
  values.reserve(doc.rows.size());
  TimePoint start{}, prev{};
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& row = doc.rows[i];
    if (row.fields.size() != 2) throw ParseError("expected 2 fields", row.line);
    TimePoint t;
    try {
      t = parse_timestamp(row.fields[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), row.line);
    }
    double v = parse_double(row.fields[1], row.line);
    if (i == 0) {
      start = t;
    } else {
      auto expected = prev + std::chrono::hours(1);
      if (t == prev || (t > prev && t < expected))
        throw SchemaError(path.string() + ": duplicate or off-grid hour " + format_timestamp(t) +
                          " at line " + std::to_string(row.line));
      if (t > expected)
        throw SchemaError(path.string() + ": missing hour " + format_timestamp(expected) +
                          " before line " + std::to_string(row.line));
      if (t < prev)
        throw SchemaError(path.string() + ": timestamps out of order at line " +
                          std::to_string(row.line));
    }
    prev = t;
    values.push_back(v);
  }
  return PriceSeries(start, std::move(values));
}

void write_prices(const PriceSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "timestamp,price_eur_mwh\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.start_time() + std::chrono::hours(i)) << ','
        << format_double(series.eur_per_mwh()[i]) << '\n';
}

double price_at(const PriceSeries& series, double t_s) {
  if (!(t_s >= 0.0) || !(t_s < series.horizon_s()))
    throw RangeError("time " + format_double(t_s) + " s outside price horizon [0, " +
                     format_double(series.horizon_s()) + ")");
  auto idx = static_cast<std::size_t>(std::floor(t_s / PriceSeries::kStepSeconds));
  if (idx >= series.size()) idx = series.size() - 1;
  return series[idx];
}

double mean_price(const PriceSeries& series, double t0_s, double t1_s) {
  if (!(t1_s > t0_s)) throw RangeError("empty averaging interval");
  if (t0_s < 0.0 || t1_s > series.horizon_s() * (1 + 1e-12))
    throw RangeError("averaging interval outside price horizon");
  const double step = PriceSeries::kStepSeconds;
  double acc = 0.0;
  double t = t0_s;
  while (t < t1_s) {
    auto idx = static_cast<std::size_t>(std::floor(t / step + 1e-12));
    if (idx >= series.size()) idx = series.size() - 1;
    double end = std::min(t1_s, (static_cast<double>(idx) + 1) * step);
    if (end <= t) end = t1_s;
    acc += series[idx] * (end - t);
    t = end;
  }
  return acc / (t1_s - t0_s);
}

}  // namespace batopt
