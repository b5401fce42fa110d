#include "cavityq/csv.hpp"

#include <ostream>

#include <fmt/format.h>

namespace cavityq::csv {

std::string num(double v) { return fmt::format("{:.12g}", v); }

void write_meta(std::ostream& os, const Meta& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_row(std::ostream& os, const std::vector<double>& values) {
  std::string line;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += num(values[i]);
  }
  os << line << '\n';
}

}  // namespace cavityq::csv
