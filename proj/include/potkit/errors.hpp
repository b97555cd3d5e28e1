#pragma once

#include <stdexcept>
#include <string>

namespace potkit {

// Base class for everything the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside a field's domain, or a sphere leaving it.
struct DomainError : Error {
  using Error::Error;
};

// A documented precondition was not met by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// A sampled hypothesis check rejected the input (gluing bounds, majorants, ...).
struct RejectError : Error {
  using Error::Error;
};

// A test-family member could not be evaluated or integrated; names the member.
struct FamilyError : Error {
  using Error::Error;
};

// Solver or estimator failed to converge.
struct NumericError : Error {
  using Error::Error;
};

// A point of interest sits too close to the grid lattice; shift or refine the grid.
struct RegridError : NumericError {
  using NumericError::NumericError;
};

}  // namespace potkit
