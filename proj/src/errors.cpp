#include "ergo/errors.hpp"

namespace ergo {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownGenerator:
      return 2;
    case ErrorCode::SupportExplosion:
    case ErrorCode::CapExceeded:
      return 4;
    default:
      return 3;
  }
}

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::CommutationViolation: return "CommutationViolation";
    case ErrorCode::MeasureNotPreserved: return "MeasureNotPreserved";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::NotInvariantPartition: return "NotInvariantPartition";
    case ErrorCode::ZeroMassAtom: return "ZeroMassAtom";
    case ErrorCode::ZeroMassPoint: return "ZeroMassPoint";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::NonCommutingStream: return "NonCommutingStream";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SupportExplosion: return "SupportExplosion";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownGenerator: return "UnknownGenerator";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorCode::ParseError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ergo
