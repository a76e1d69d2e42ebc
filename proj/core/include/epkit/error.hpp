#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epkit {

enum class ErrorCode {
  // session / geometry
  MissingFile,
  TruncatedData,
  InvalidManifest,
  NonFinite,
  // preprocess
  WindowOutOfRange,
  TooShort,
  MissingTemplate,
  InvalidSpec,
  // epochs
  NoValidEpochs,
  Empty,
  TooFewEpochs,
  // metrics
  NoN1,
  NoZeroCrossing,
  // time-frequency
  WindowTooShort,
  MissingCenter,
  // conduction
  UndefinedOnset,
  NonPositiveDelay,
  NonPositiveDiameter,
  NonPositiveDistance,
  // stats
  SampleTooSmall,
  SampleTooLarge,
  LengthMismatch,
  ZeroVariance,
  EmptySample,
  DegenerateX,
  // synth
  KernelOutOfWindow,
  TrainTooLong,
  // cli
  UnknownCommand,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Broad class of an error, used to pick a process exit status.
enum class ErrorCategory { usage, data, numeric };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace epkit
