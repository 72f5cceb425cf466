#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace batopt {

// One-dimensional lookup table over strictly increasing abscissae.
// Outside the sampled range the end segments are extended linearly.
class Table1d {
 public:
  enum class Method { linear, pchip };

  Table1d() = default;
  Table1d(std::vector<double> x, std::vector<double> y, Method method);

  double operator()(double x) const;
  double derivative(double x) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  Method method() const { return method_; }
  bool empty() const { return x_.empty(); }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  bool strictly_increasing_values() const;
  bool nonincreasing_values() const;

  // Reads a two-column CSV whose header must equal `x_name,y_name`.
  static Table1d load_csv(const std::filesystem::path& path, const std::string& x_name,
                          const std::string& y_name, Method method);

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;  // node derivatives (pchip) or segment slopes (linear)
  Method method_ = Method::linear;
  bool uniform_ = false;
  double inv_h_ = 0.0;
};

}  // namespace batopt
