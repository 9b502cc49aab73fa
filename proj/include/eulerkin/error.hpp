#pragma once

#include <stdexcept>
#include <string>

namespace eulerkin {

// Machine-readable failure codes. Library functions throw Error; the CLI maps
// input and validation failures to exit code 2 and tolerance gates to 3.
enum class ErrorCode {
  FaceClosureViolation,
  ImproperIntersection,
  DegenerateSimplex,
  NonCompactSupport,
  DimensionCapExceeded,
  NotOrthogonal,
  NotAFace,
  InvalidSampleCount,
  RankDeficientSystem,
  OutOfRange,
  RadiusSumExceedsRegime,
  NerveBoundExceeded,
  DegenerateTangency,
  ParseError,
  ValidationError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::FaceClosureViolation: return "FaceClosureViolation";
    case ErrorCode::ImproperIntersection: return "ImproperIntersection";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::NonCompactSupport: return "NonCompactSupport";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotAFace: return "NotAFace";
    case ErrorCode::InvalidSampleCount: return "InvalidSampleCount";
    case ErrorCode::RankDeficientSystem: return "RankDeficientSystem";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RadiusSumExceedsRegime: return "RadiusSumExceedsRegime";
    case ErrorCode::NerveBoundExceeded: return "NerveBoundExceeded";
    case ErrorCode::DegenerateTangency: return "DegenerateTangency";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace eulerkin
