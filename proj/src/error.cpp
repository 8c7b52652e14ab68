#include "coach/error.hpp"

namespace coach {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::MissingJoint: return "MissingJoint";
    case ErrorKind::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::DivergedPose: return "DivergedPose";
    case ErrorKind::DegenerateEye: return "DegenerateEye";
    case ErrorKind::DegenerateArm: return "DegenerateArm";
    case ErrorKind::UnknownKeyword: return "UnknownKeyword";
    case ErrorKind::OutOfOrderInput: return "OutOfOrderInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsortedTrace: return "UnsortedTrace";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::MissingAnnotations: return "MissingAnnotations";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

LineError::LineError(ErrorKind kind, std::size_t line, const std::string& reason)
    : Error(kind, "line " + std::to_string(line) + ": " + reason), line_(line) {}

}  // namespace coach
