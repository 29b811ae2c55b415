#pragma once

#include <stdexcept>
#include <string>

namespace musiclite {

/// Invalid user configuration (bad adder spec, inconsistent formats, missing baseline...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace musiclite
