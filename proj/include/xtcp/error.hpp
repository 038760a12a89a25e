#pragma once

#include <stdexcept>
#include <string>

namespace xtcp {

/// Raised for invalid configuration or a violated precondition of the engine.
/// The message names the offending field or argument.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xtcp
