#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twmg {

enum class ErrorCode {
  InvalidArgument,
  InvalidConfig,
  DegenerateGeometry,
  SamplingViolation,
  InvalidSpec,
  ShapeMismatch,
  EmptyEnsemble,
  InsufficientSamples,
  UnreadableFile,
  UnsupportedFormat,
  CorruptStack,
  NumericalFailure,
};

/// Broad failure class; the CLI maps these onto its exit codes.
enum class ErrorCategory { Usage = 1, Data = 2, Numerical = 3 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace twmg
