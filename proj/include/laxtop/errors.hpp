#pragma once

#include <stdexcept>
#include <string>

namespace laxtop {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation was requested in a regime that does not support it.
struct WrongRegime : Error {
  using Error::Error;
};

// A series evaluation cannot reach the requested accuracy.
struct NonConvergent : Error {
  using Error::Error;
};

// An argument is closer to the singular set than the active pole guard.
struct NearPole : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

// No candidate in the enumerated normalization family passed the
// residue and axiom gates.
struct CalibrationFailed : Error {
  using Error::Error;
};

struct NotRankOne : Error {
  using Error::Error;
};

// A strict-mode operation received a state violating q̇_i = tr S^{ii}.
struct OffShell : Error {
  using Error::Error;
};

// A trajectory reached a configuration too close to the singular set.
struct SingularConfiguration : Error {
  using Error::Error;
};

// Malformed or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace laxtop
