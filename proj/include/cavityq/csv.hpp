#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cavityq::csv {

using Meta = std::map<std::string, std::string>;

// "# key = value" lines, sorted by key.
void write_meta(std::ostream& os, const Meta& meta);
void write_header(std::ostream& os, const std::vector<std::string>& cols);
void write_row(std::ostream& os, const std::vector<double>& values);
std::string num(double v);

}  // namespace cavityq::csv
