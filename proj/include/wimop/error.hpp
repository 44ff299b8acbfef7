#pragma once

#include <stdexcept>
#include <string>

namespace wimop {

enum class ErrorCode {
  DimensionMismatch,
  OutOfBounds,
  InvalidArgument,
  Infeasible,
  Unbounded,
  DegenerateHessian,
  IterationLimit,
  BadArity,
  EmptyFrontier,
  NoObservations,
  NotStronglyConvex,
  EmptyBoundsBox,
  UnknownInstance,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every library failure is
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wimop
