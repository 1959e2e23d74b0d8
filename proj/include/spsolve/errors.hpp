#pragma once

#include <stdexcept>
#include <string>

namespace spsolve {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AsymmetricMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when min{delta_x, delta_y} = 0: no linear rate exists for such
// problems and every solver in this library refuses them.
struct DegenerateProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonQuadratic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssumptionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasiblePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteIterate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spsolve
