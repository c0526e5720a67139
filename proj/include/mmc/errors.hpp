#pragma once

#include <stdexcept>
#include <string>

namespace mmc {

// All failures surface as typed exceptions so callers (and the CLI) can map
// them to exit codes without string matching.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input or construction problems. The CLI maps these to exit code 2.
struct InputError : Error {
  using Error::Error;
};

struct TriangleViolation : InputError {
  using InputError::InputError;
};
struct AsymmetricMatrix : InputError {
  using InputError::InputError;
};
struct NegativeWeight : InputError {
  using InputError::InputError;
};
struct EmptyMeasure : InputError {
  using InputError::InputError;
};
struct EmptySubset : InputError {
  using InputError::InputError;
};
struct OutOfDisk : InputError {
  using InputError::InputError;
};
struct InvalidTreePoint : InputError {
  using InputError::InputError;
};
struct ScreenMismatch : InputError {
  using InputError::InputError;
};
struct BadSpec : InputError {
  using InputError::InputError;
};
struct ModeUnavailable : InputError {
  using InputError::InputError;
};
struct FamilyNotLipschitz : InputError {
  using InputError::InputError;
};

// Numerical failures. These indicate the computation itself gave up.
struct NoConvergence : Error {
  using Error::Error;
};
struct RepairFailed : Error {
  using Error::Error;
};

}  // namespace mmc
