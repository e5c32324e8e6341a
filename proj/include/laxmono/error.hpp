#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laxmono {

enum class ErrorKind {
  DegenerateLeadingCoefficient,
  RefinementExhausted,
  NotClosed,
  ConstraintViolation,
  AtInfinity,
  FiberEmpty,
  BranchFailure,
  NonGeneric,
  UnexpectedPermutation,
  ResidueMismatch,
  ToleranceFailure,
  NoReturn,
  UnwrapFailure,
  DegenerateFiber,
  UsageError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the failure class
/// so that front ends can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace laxmono
