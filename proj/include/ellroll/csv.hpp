#pragma once

#include <string>
#include <vector>

namespace ellroll::csv {

// %.9g rendering used by every CSV this project writes.
[[nodiscard]] std::string num(double v);

[[nodiscard]] std::string join(const std::vector<std::string>& fields);

// Splits one line on commas. No quoting support; none of our fields need it.
[[nodiscard]] std::vector<std::string> split(const std::string& line);

[[nodiscard]] double parse_double(const std::string& field);

}  // namespace ellroll::csv
