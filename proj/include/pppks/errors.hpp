#pragma once

#include <stdexcept>
#include <string>

namespace pppks {

/// Argument outside the mathematical domain of a function (non-finite input,
/// non-positive shape, negative support point, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Data for which the gamma MLE does not exist (zero dispersion, n < 2).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an algorithm (non-finite target, no convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or settings. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed input data file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pppks
