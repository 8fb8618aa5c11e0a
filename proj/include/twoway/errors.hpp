#pragma once

#include <stdexcept>
#include <string>

namespace twoway {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A design target that no impairment level can meet.
class InfeasibleTarget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query the closed forms cannot answer (e.g. gain mismatch); use Monte-Carlo.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace twoway
