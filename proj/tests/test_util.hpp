#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "batopt/market_data.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("batopt_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline batopt::TimePoint day0() {
  using namespace std::chrono;
  return sys_days{year{2014} / January / 1};
}

inline batopt::PriceSeries prices(std::vector<double> eur_mwh) {
  return batopt::PriceSeries(day0(), std::move(eur_mwh));
}

// Hourly prices repeating a fixed daily shape.
inline batopt::PriceSeries daily_pattern(int days) {
  const double shape[24] = {30, 28, 26, 25, 26, 30, 38, 50, 55, 52, 48, 45,
                            43, 42, 44, 48, 55, 65, 70, 62, 52, 44, 38, 33};
  std::vector<double> v;
  for (int d = 0; d < days; ++d)
    for (double x : shape) v.push_back(x);
  return prices(v);
}

}  // namespace testutil
