#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbsim {

enum class ErrorCode {
  ZeroState,
  DimensionMismatch,
  OrthogonalStates,
  CapacityExceeded,
  SameMode,
  TruncationOverflow,
  OffSphere,
  DegenerateLoop,
  UnsupportedScenario,
  UnsupportedN,
  InvalidProbability,
  InsufficientData,
  ConstantGrid,
  Indeterminate,
  NonNormalizedFamily,
  DegenerateProbability,
  ZeroInformation,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroState: return "ZeroState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OrthogonalStates: return "OrthogonalStates";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::SameMode: return "SameMode";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::OffSphere: return "OffSphere";
    case ErrorCode::DegenerateLoop: return "DegenerateLoop";
    case ErrorCode::UnsupportedScenario: return "UnsupportedScenario";
    case ErrorCode::UnsupportedN: return "UnsupportedN";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConstantGrid: return "ConstantGrid";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::NonNormalizedFamily: return "NonNormalizedFamily";
    case ErrorCode::DegenerateProbability: return "DegenerateProbability";
    case ErrorCode::ZeroInformation: return "ZeroInformation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Configuration problems (bad input) as opposed to numeric-domain failures.
constexpr bool is_config_error(ErrorCode code) {
  return code == ErrorCode::ConfigError || code == ErrorCode::IoError ||
         code == ErrorCode::UnsupportedScenario || code == ErrorCode::UnsupportedN;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbsim
