#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergo {

enum class ErrorCode {
  // validation family
  CommutationViolation,
  MeasureNotPreserved,
  BadWeights,
  DimensionMismatch,
  EmptySubset,
  SupportMismatch,
  NotInvariantPartition,
  ZeroMassAtom,
  ZeroMassPoint,
  ArityMismatch,
  AxisOutOfRange,
  NotInvariant,
  NonCommutingStream,
  InvalidArgument,
  // resource family
  SupportExplosion,
  CapExceeded,
  // configuration family
  ParseError,
  UnknownGenerator,
};

/// Process exit code for each error family (2 parse, 3 validation, 4 resource).
int exit_code_for(ErrorCode code);

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse error carrying a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace ergo
