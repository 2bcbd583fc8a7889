#pragma once

#include <stdexcept>
#include <string>

namespace ellroll {

// Invalid parameters, malformed config files, incompatible checkpoints.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite state, loss blow-up, or a diverging trajectory.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse such as stepping an environment past truncation.
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ellroll
