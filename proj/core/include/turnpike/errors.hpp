#pragma once

#include <stdexcept>
#include <string>

namespace turnpike {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TURNPIKE_DEFINE_ERROR(Name)                         \
  struct Name : Error {                                     \
    explicit Name(const std::string& what) : Error(what) {} \
  }

// Model construction and coefficient validation.
TURNPIKE_DEFINE_ERROR(SignViolation);        // speed signs wrong (need d- < 0 < d+)
TURNPIKE_DEFINE_ERROR(PositivityViolation);  // nonpositive length, eta0 > 0, ...
TURNPIKE_DEFINE_ERROR(OutOfDomain);          // x outside [0, L]
TURNPIKE_DEFINE_ERROR(NonSPD);               // metric matrix not SPD / not diagonal-positive
TURNPIKE_DEFINE_ERROR(RegimeMismatch);       // weight sign pattern vs requested certificate
TURNPIKE_DEFINE_ERROR(EmptyGrid);            // empty search grid or zero-size mesh

// Discretization.
TURNPIKE_DEFINE_ERROR(CflViolation);   // CFL > 1 or explicit source restriction broken
TURNPIKE_DEFINE_ERROR(ShapeMismatch);  // signal/trajectory sizes inconsistent with grid

// Linear algebra and optimization.
TURNPIKE_DEFINE_ERROR(SingularSystem);    // direct solve failed
TURNPIKE_DEFINE_ERROR(LambdaOutOfRange);  // tracking weight outside (0, 1)
TURNPIKE_DEFINE_ERROR(NoConvergence);     // iteration budget exhausted
TURNPIKE_DEFINE_ERROR(SPDViolation);      // operator not positive definite in CG

// Integer control.
TURNPIKE_DEFINE_ERROR(ThresholdNotMet);  // switching-cost premise fails
TURNPIKE_DEFINE_ERROR(NotDiagonal);      // metric requires per-channel structure

// Gas pipeline.
TURNPIKE_DEFINE_ERROR(VacuumReached);      // density hit zero along the stationary ODE
TURNPIKE_DEFINE_ERROR(DegenerateDensity);  // R+ - R- <= 0 in diagonal variables

// CLI and I/O.
TURNPIKE_DEFINE_ERROR(ParseError);       // malformed config / CSV
TURNPIKE_DEFINE_ERROR(ValidationError);  // well-formed config with invalid values
TURNPIKE_DEFINE_ERROR(IoError);          // filesystem failures

#undef TURNPIKE_DEFINE_ERROR

}  // namespace turnpike
