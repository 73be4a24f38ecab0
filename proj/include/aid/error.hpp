#pragma once

#include <stdexcept>
#include <string>

namespace aid {

/// Raised for any contract violation or unrecoverable input problem.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an oracle's observations contradict the single-root-cause /
/// deterministic-effect model the search relies on.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace aid
