#pragma once

#include <stdexcept>
#include <string>

namespace nsrm {

// Invalid argument or configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed annotation or config text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary tensor file rejected (magic, version, dtype, truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched tensor shapes between prediction and ground truth.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nsrm
