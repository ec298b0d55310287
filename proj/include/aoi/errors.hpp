#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative time, d <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised when energy per update is at or below the limit 2*B*ln2, so no finite
/// delay can deliver the packet.
class EnergyBelowShannonFloor : public Error {
 public:
  using Error::Error;
};

/// Service times do not fit in the session: sum of delays exceeds T.
class InfeasibleSession : public Error {
 public:
  using Error::Error;
};

/// No consistent choice pattern exists for an arrival-driven instance.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A policy handed to an evaluator violates its preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OracleBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace aoi
