#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nino {

enum class ErrorKind {
  // data / file-format family
  FormatError,
  InconsistentAxes,
  GapInTime,
  MissingValues,
  // region / coverage family
  EmptyRegion,
  AllMissing,
  NoOverlap,
  InsufficientData,
  AxesMismatch,
  OutOfRange,
  TooShort,
  // numeric / model family
  ShapeMismatch,
  BadRate,
  NotScalar,
  BadScale,
  EmptySplit,
  LengthMismatch,
  BadK,
  EmptyMatrix,
  // configuration family
  BadSpec,
  BadConfig,
  // io family
  FileNotFound,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Errors are grouped so the CLI can return one exit status per family.
enum class ErrorFamily { Data = 3, Coverage = 4, Numeric = 5, Config = 6, FileNotFound = 7, Io = 8 };

ErrorFamily family_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace nino
