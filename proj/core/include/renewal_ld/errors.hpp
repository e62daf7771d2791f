#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace renewal_ld {

// Caller broke a documented precondition (bad parameter, out-of-range index).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent configuration text.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double t)
      : std::runtime_error(what + " (t=" + std::to_string(t) + ")"), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

// The series remainder could not be certified below the requested tolerance
// with the rows available; required_k_max() rows would suffice.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::size_t required_k_max)
      : std::runtime_error(what), required_k_max_(required_k_max) {}
  std::size_t required_k_max() const noexcept { return required_k_max_; }

 private:
  std::size_t required_k_max_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace renewal_ld
