#pragma once

#include <stdexcept>
#include <string>

namespace distlqr {

enum class ErrorCode {
  DimensionMismatch,
  NotPositiveDefinite,
  NonStabilizing,
  NotScalarSystem,
  CovarianceNotSPD,
  BetaOutOfRange,
  SeriesNotConverged,
  EigensolveFailure,
  GridTooCoarse,
  InsufficientSamples,
  ConfigError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonStabilizing: return "NonStabilizing";
    case ErrorCode::NotScalarSystem: return "NotScalarSystem";
    case ErrorCode::CovarianceNotSPD: return "CovarianceNotSPD";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace distlqr
