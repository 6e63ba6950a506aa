#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tlsurf {

enum class ErrorCode {
  InvalidInput,
  SyntaxError,
  UnknownIdentifier,
  ArityMismatch,
  DomainError,
  DegeneratePoint,
  LightLikeNormal,
  SingularMetric,
  NotAsymptotic,
  WrongSignature,
  DegenerateDenominator,
  MethodNotApplicable,
  FrameIncompatible,
  CrossVariationTooLarge,
  NonPositiveGauge,
  InterpolationOutOfRange,
  NonPositiveResult,
  StepTooCoarse,
  IntegrabilityViolated,
  Incompatible,
  GramDriftExceeded,
  ClosureExceeded,
  AllNodesMasked,
  Divergence,
  NonPositiveK,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code drives the CLI exit
/// status; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the 0-based character offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, std::size_t position)
      : Error(code, message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace tlsurf
