#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thickknot {

enum class ErrorCode {
  DegenerateCurve,
  InvalidArgument,
  NotAKnot,
  NonPlanarInput,
  Infeasible,
  CapCollision,
  OverlapStuck,
  InfeasibleStart,
  InfeasibleSeed,
  OffsetCurvatureViolation,
  PreconditionViolated,
  NoAperture,
  EmptyTrace,
  NoTube,
  Format,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every module. `stage` is filled in by pipelines
/// that wrap a failing step.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAKnot: return "NotAKnot";
    case ErrorCode::NonPlanarInput: return "NonPlanarInput";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::CapCollision: return "CapCollision";
    case ErrorCode::OverlapStuck: return "OverlapStuck";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::InfeasibleSeed: return "InfeasibleSeed";
    case ErrorCode::OffsetCurvatureViolation: return "OffsetCurvatureViolation";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoAperture: return "NoAperture";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::NoTube: return "NoTube";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

}  // namespace thickknot
