#pragma once

#include <stdexcept>
#include <string>

namespace specsim {

// File, schema, and configuration problems. The CLI maps these to exit
// code 2; plain std::invalid_argument (domain errors) maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specsim
