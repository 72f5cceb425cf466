#include "batopt/table.hpp"

#include <algorithm>
#include <cmath>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"

namespace batopt {

Table1d::Table1d(std::vector<double> x, std::vector<double> y, Method method)
    : x_(std::move(x)), y_(std::move(y)), method_(method) {
  if (x_.size() != y_.size()) throw SchemaError("table columns differ in length");
  if (x_.size() < 2) throw SchemaError("table needs at least two rows");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw SchemaError("non-finite table entry");
    if (i > 0 && !(x_[i] > x_[i - 1]))
      throw SchemaError("table abscissae not strictly increasing at row " + std::to_string(i + 1));
  }
  const std::size_t n = x_.size();
  double h0 = x_[1] - x_[0];
  uniform_ = true;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (std::abs((x_[i + 1] - x_[i]) - h0) > 1e-9 * h0) uniform_ = false;
  inv_h_ = uniform_ ? (n - 1) / (x_.back() - x_.front()) : 0.0;

  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  if (method_ == Method::linear) {
    slope_ = d;
    return;
  }
  // Fritsch-Carlson monotone node slopes.
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = d[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      double h1 = x_[i] - x_[i - 1], h2 = x_[i + 1] - x_[i];
      double w1 = 2 * h2 + h1, w2 = h2 + 2 * h1;
      slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto end_slope = [](double h1, double h2, double d1, double d2) {
    double s = ((2 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
    if (s * d1 <= 0.0) return 0.0;
    if (d1 * d2 <= 0.0 && std::abs(s) > std::abs(3 * d1)) return 3 * d1;
    return s;
  };
  slope_[0] = end_slope(x_[1] - x_[0], x_[2] - x_[1], d[0], d[1]);
  slope_[n - 1] = end_slope(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3], d[n - 2], d[n - 3]);
}

std::size_t Table1d::segment(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return n - 2;
  if (uniform_) {
    auto i = static_cast<std::size_t>((x - x_.front()) * inv_h_);
    if (i > n - 2) i = n - 2;
    while (i > 0 && x < x_[i]) --i;
    while (i < n - 2 && x >= x_[i + 1]) ++i;
    return i;
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Table1d::operator()(double x) const {
  const std::size_t n = x_.size();
  if (method_ == Method::linear) {
    std::size_t i = segment(x);
    return y_[i] + slope_[i] * (x - x_[i]);
  }
  if (x < x_.front()) return y_.front() + slope_.front() * (x - x_.front());
  if (x > x_.back()) return y_.back() + slope_[n - 1] * (x - x_.back());
  std::size_t i = segment(x);
  double h = x_[i + 1] - x_[i];
  double t = (x - x_[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

double Table1d::derivative(double x) const {
  const std::size_t n = x_.size();
  if (method_ == Method::linear) return slope_[segment(x)];
  if (x < x_.front()) return slope_.front();
  if (x > x_.back()) return slope_[n - 1];
  std::size_t i = segment(x);
  double h = x_[i + 1] - x_[i];
  double t = (x - x_[i]) / h;
  double t2 = t * t;
  double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * slope_[i] + d11 * slope_[i + 1];
}

bool Table1d::strictly_increasing_values() const {
  for (std::size_t i = 1; i < y_.size(); ++i)
    if (!(y_[i] > y_[i - 1])) return false;
  return true;
}

bool Table1d::nonincreasing_values() const {
  for (std::size_t i = 1; i < y_.size(); ++i)
    if (y_[i] > y_[i - 1]) return false;
  return true;
}

Table1d Table1d::load_csv(const std::filesystem::path& path, const std::string& x_name,
                          const std::string& y_name, Method method) {
  CsvDocument doc = read_csv(path);
  if (doc.header.size() != 2 || doc.header[0] != x_name || doc.header[1] != y_name)
    throw SchemaError(path.string() + ": expected header '" + x_name + "," + y_name + "'");
  std::vector<double> xs, ys;
  for (const auto& row : doc.rows) {
    if (row.fields.size() != 2)
      throw ParseError(path.string() + ": expected 2 fields", row.line);
    xs.push_back(parse_double(row.fields[0], row.line));
    ys.push_back(parse_double(row.fields[1], row.line));
  }
  if (xs.empty()) throw SchemaError(path.string() + ": empty table");
  try {
    return Table1d(std::move(xs), std::move(ys), method);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace batopt
