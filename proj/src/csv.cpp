#include "ellroll/csv.hpp"

#include <fmt/format.h>

#include <sstream>

#include "ellroll/errors.hpp"

namespace ellroll::csv {

std::string num(double v) { return fmt::format("{:.9g}", v); }

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw ConfigError("trailing characters in number '" + field + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + field + "'");
  }
}

}  // namespace ellroll::csv
