#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace recur {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownMapError : public Error {
 public:
  using Error::Error;
};

/// Map parameter outside the admissible range of its family.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class NoSamplerError : public Error {
 public:
  using Error::Error;
};

/// Raised when an orbit point has zero or undefined derivative.
class CriticalPointError : public Error {
 public:
  using Error::Error;
};

/// Raised when a Gauss-map orbit falls below the materialized branch range.
class BranchTruncationError : public Error {
 public:
  using Error::Error;
};

/// Floating-point orbit requested for a map that only supports symbolic orbits.
class OrbitModeError : public Error {
 public:
  using Error::Error;
};

class InadmissibleWordError : public Error {
 public:
  using Error::Error;
};

/// No admissible return within the mixing-time bound of a transition matrix.
class NonMixingError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// The map violates a hypothesis of the estimator (e.g. zero entropy).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid config:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace recur
