// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bspd {

// A scalar argument or configuration value violates its documented range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested support does not fit in the available pilot observations.
class UnderdeterminedSupport : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config-file problem; carries the offending line (1-based, 0 if unknown) and key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error(format(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field, const std::string& what) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!field.empty()) out += ": field '" + field + "'";
    return out + ": " + what;
  }

  std::size_t line_;
  std::string field_;
};

}  // namespace bspd
