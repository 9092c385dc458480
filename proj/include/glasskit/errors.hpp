#pragma once

#include <stdexcept>
#include <string>

namespace glasskit {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a formula (nonpositive log argument,
// indefinite matrix where a definite one is required, ...).
struct DomainError : Error {
  using Error::Error;
};

// Matrix asymmetry above tolerance where a symmetric matrix is required.
struct NonSymmetricError : Error {
  using Error::Error;
};

// An iteration exceeded its budget without reaching its target residual.
struct NoConvergenceError : Error {
  using Error::Error;
};

// Requested a nontrivial-phase quantity in the trivial phase (minimizing
// overlap q = 0).
struct TrivialPhaseError : Error {
  using Error::Error;
};

// A root claimed unique by theory showed more than one sign change on the
// scan grid.  Surfaced rather than silently resolved.
struct MultipleRootsError : Error {
  using Error::Error;
};

// chaos_u0 is undefined when both external fields vanish.
struct BothFieldsZeroError : Error {
  using Error::Error;
};

// The reduced scalar equation has no admissible solution.
struct NoRootError : Error {
  using Error::Error;
};

// Monte Carlo effective sample size too small for a usable estimate.
struct ChainTooShortError : Error {
  using Error::Error;
};

}  // namespace glasskit
