#include "epkit/error.hpp"

namespace epkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoValidEpochs: return "NoValidEpochs";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::TooFewEpochs: return "TooFewEpochs";
    case ErrorCode::NoN1: return "NoN1";
    case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::MissingCenter: return "MissingCenter";
    case ErrorCode::UndefinedOnset: return "UndefinedOnset";
    case ErrorCode::NonPositiveDelay: return "NonPositiveDelay";
    case ErrorCode::NonPositiveDiameter: return "NonPositiveDiameter";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::KernelOutOfWindow: return "KernelOutOfWindow";
    case ErrorCode::TrainTooLong: return "TrainTooLong";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownCommand:
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidSpec:
      return ErrorCategory::usage;
    case ErrorCode::NonFinite:
    case ErrorCode::NoN1:
    case ErrorCode::NoZeroCrossing:
    case ErrorCode::ZeroVariance:
    case ErrorCode::DegenerateX:
    case ErrorCode::NonPositiveDelay:
    case ErrorCode::UndefinedOnset:
      return ErrorCategory::numeric;
    default:
      return ErrorCategory::data;
  }
}

}  // namespace epkit
