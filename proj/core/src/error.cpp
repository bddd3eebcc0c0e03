#include "twmg/error.hpp"

namespace twmg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::SamplingViolation: return "SamplingViolation";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptStack: return "CorruptStack";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Usage;
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::SamplingViolation:
    case ErrorCode::NumericalFailure:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace twmg
