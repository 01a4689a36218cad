#pragma once

#include <stdexcept>
#include <string>

namespace bistable {

/// Invalid shape or model parameter (nonpositive sigma, bad table, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numeric overflow or an index/shift out of range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Mismatched grids, spacings or frames between collaborating objects.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimization could not bracket a minimum.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level crossing or front not found.
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file problems; carries the offending line (0 when not line-bound).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace bistable
