#pragma once

#include <stdexcept>
#include <string>

namespace filmheat {

/// Input outside the mathematical domain of an operation (non-positive
/// thickness, reduced coordinate outside [0, 1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Solver breakdown: non-finite values, singular systems, eigen-solver
/// failures, film rupture.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid request from a caller or from a configuration file.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system or format failure while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace filmheat
