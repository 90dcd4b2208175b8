#pragma once

#include <stdexcept>
#include <string>

namespace geoent {

// Precondition violations: bad qubit counts, out-of-range indices, shape mismatches.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when an operation needs a permutation-invariant target and does not get one.
struct SymmetryError : DomainError {
  using DomainError::DomainError;
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}

  // Iteration at which the failure was detected, -1 if not iterative.
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace geoent
