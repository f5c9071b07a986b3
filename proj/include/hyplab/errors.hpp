#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

/// Base of every numerical failure raised by the library. The CLI maps these
/// to exit status 1; ConfigError maps to 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define HYPLAB_DEFINE_ERROR(Name, tag)                               \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(what) {}          \
    const char* kind() const noexcept override { return tag; }       \
  };

HYPLAB_DEFINE_ERROR(InvalidInput, "invalid-input")
HYPLAB_DEFINE_ERROR(ConfigError, "invalid-config")
HYPLAB_DEFINE_ERROR(PreconditionError, "precondition")
HYPLAB_DEFINE_ERROR(CapabilityError, "capability")
HYPLAB_DEFINE_ERROR(StepRejected, "step-rejected")
HYPLAB_DEFINE_ERROR(ConvergenceError, "non-convergence")
HYPLAB_DEFINE_ERROR(TruncationError, "truncation")
HYPLAB_DEFINE_ERROR(SurfaceFolding, "surface-folding")
HYPLAB_DEFINE_ERROR(ResolutionError, "resolution")
HYPLAB_DEFINE_ERROR(WindowError, "window")
HYPLAB_DEFINE_ERROR(IllPosed, "ill-posed")

#undef HYPLAB_DEFINE_ERROR

/// Sonic crossing (f'(u) ~ 0) along a stationary path.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, double a_location, double state)
      : Error(what), a_location_(a_location), state_(state) {}
  const char* kind() const noexcept override { return "resonance"; }
  double a_location() const noexcept { return a_location_; }
  double state() const noexcept { return state_; }

 private:
  double a_location_;
  double state_;
};

/// Density or distribution lost positivity; carries the offending cell.
class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, long cell) : Error(what), cell_(cell) {}
  const char* kind() const noexcept override { return "positivity"; }
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

}  // namespace hyplab
