#pragma once

#include <stdexcept>
#include <string>

namespace gaitphase {

enum class ErrorCode {
  kInvalidParameter,
  kSignalFault,
  kDegenerateStride,
  kUndefinedPhase,
  kTooFewStrides,
  kDegenerateCalibration,
  kCalibrationFailed,
  kCalibrationMissing,
  kInvalidCalibration,
  kInsufficientCalibrationData,
  kRomViolation,
  kDataError,
  kConfigError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kSignalFault: return "signal fault";
    case ErrorCode::kDegenerateStride: return "degenerate stride";
    case ErrorCode::kUndefinedPhase: return "undefined phase";
    case ErrorCode::kTooFewStrides: return "insufficient strides";
    case ErrorCode::kDegenerateCalibration: return "degenerate calibration";
    case ErrorCode::kCalibrationFailed: return "calibration failed";
    case ErrorCode::kCalibrationMissing: return "calibration missing";
    case ErrorCode::kInvalidCalibration: return "invalid calibration";
    case ErrorCode::kInsufficientCalibrationData: return "insufficient calibration data";
    case ErrorCode::kRomViolation: return "range-of-motion violation";
    case ErrorCode::kDataError: return "data error";
    case ErrorCode::kConfigError: return "config error";
  }
  return "unknown error";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Process exit status for an error: 2 data, 3 calibration, 4 config.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSignalFault:
    case ErrorCode::kDegenerateStride:
    case ErrorCode::kDataError:
      return 2;
    case ErrorCode::kUndefinedPhase:
    case ErrorCode::kTooFewStrides:
    case ErrorCode::kDegenerateCalibration:
    case ErrorCode::kCalibrationFailed:
    case ErrorCode::kCalibrationMissing:
    case ErrorCode::kInvalidCalibration:
    case ErrorCode::kInsufficientCalibrationData:
      return 3;
    case ErrorCode::kInvalidParameter:
    case ErrorCode::kRomViolation:
    case ErrorCode::kConfigError:
      return 4;
  }
  return 4;
}

}  // namespace gaitphase
