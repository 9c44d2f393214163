#include "nino/error.hpp"

namespace nino {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::InconsistentAxes: return "InconsistentAxes";
    case ErrorKind::GapInTime: return "GapInTime";
    case ErrorKind::MissingValues: return "MissingValues";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::AllMissing: return "AllMissing";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::AxesMismatch: return "AxesMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::BadRate: return "BadRate";
    case ErrorKind::NotScalar: return "NotScalar";
    case ErrorKind::BadScale: return "BadScale";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorFamily family_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FormatError:
    case ErrorKind::InconsistentAxes:
    case ErrorKind::GapInTime:
    case ErrorKind::MissingValues:
      return ErrorFamily::Data;
    case ErrorKind::EmptyRegion:
    case ErrorKind::AllMissing:
    case ErrorKind::NoOverlap:
    case ErrorKind::InsufficientData:
    case ErrorKind::AxesMismatch:
    case ErrorKind::OutOfRange:
    case ErrorKind::TooShort:
      return ErrorFamily::Coverage;
    case ErrorKind::ShapeMismatch:
    case ErrorKind::BadRate:
    case ErrorKind::NotScalar:
    case ErrorKind::BadScale:
    case ErrorKind::EmptySplit:
    case ErrorKind::LengthMismatch:
    case ErrorKind::BadK:
    case ErrorKind::EmptyMatrix:
      return ErrorFamily::Numeric;
    case ErrorKind::BadSpec:
    case ErrorKind::BadConfig:
      return ErrorFamily::Config;
    case ErrorKind::FileNotFound:
      return ErrorFamily::FileNotFound;
    case ErrorKind::IoError:
      return ErrorFamily::Io;
  }
  return ErrorFamily::Io;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace nino
