#pragma once

#include <stdexcept>
#include <string>

namespace p2h {

// Error taxonomy shared across the library. The CLI maps these onto
// distinct exit codes.

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Euler-operator test failed: the argument is not a total derivative.
struct NotExactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structural claim (norm grading, degree bound, extracted constant)
// failed during construction.
struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exactness test requested on a polynomial with explicit x-dependence.
struct ExplicitVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The linear factor for a series coefficient vanished (or failed to be a
// plain rational); the order is reported in the message.
struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Leading balance of the decaying branch needs alpha != 0 in float mode.
struct ZeroAlphaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fractional power was requested on the branch cut with no directive.
struct BranchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Jet transform requested at z = 0.
struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step size collapsed without a blow-up signature.
struct ToleranceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rate-fit window too short or ill-conditioned.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace p2h
