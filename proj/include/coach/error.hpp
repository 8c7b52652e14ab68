#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coach {

enum class ErrorKind {
  DegenerateVector,
  BehindCamera,
  TooFewPoints,
  MissingJoint,
  NonMonotonicTimestamp,
  DegenerateConfiguration,
  DivergedPose,
  DegenerateEye,
  DegenerateArm,
  UnknownKeyword,
  OutOfOrderInput,
  ParseError,
  UnsortedTrace,
  InvalidParams,
  MissingAnnotations,
  IoFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// The single exception type thrown by the library. Callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Errors tied to a line of an input file (trace or config).
class LineError : public Error {
 public:
  LineError(ErrorKind kind, std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace coach
