#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace batopt {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

// Comma separated, no quoting. Blank lines are skipped.
CsvDocument read_csv(const std::filesystem::path& path);
CsvDocument parse_csv(std::string_view text);

std::vector<std::string> split_fields(std::string_view line);
double parse_double(std::string_view text, std::size_t line);

// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);
// Fixed number of significant digits, locale independent.
std::string format_double(double v, int precision);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace batopt
