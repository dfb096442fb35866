#pragma once

#include <stdexcept>
#include <string>

namespace nhse {

enum class ErrorKind {
  InvalidArgument,
  Capacity,
  NotInBasis,
  Mismatch,
  Convergence,
  Resonance,
  BracketInvalid,
  NotIsolable,
  NoState,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhse
