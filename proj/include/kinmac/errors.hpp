#pragma once

#include <stdexcept>
#include <string>

namespace kinmac {

/// A caller broke an operation's precondition (bad sizes, bad parameters).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration document failed validation. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver detected a broken invariant mid-run (NaN, negativity, N below
/// floor). Maps to CLI exit code 2.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinmac
