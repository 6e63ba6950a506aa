#include "tlsurf/error.hpp"

namespace tlsurf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::LightLikeNormal: return "LightLikeNormal";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::NotAsymptotic: return "NotAsymptotic";
    case ErrorCode::WrongSignature: return "WrongSignature";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::MethodNotApplicable: return "MethodNotApplicable";
    case ErrorCode::FrameIncompatible: return "FrameIncompatible";
    case ErrorCode::CrossVariationTooLarge: return "CrossVariationTooLarge";
    case ErrorCode::NonPositiveGauge: return "NonPositiveGauge";
    case ErrorCode::InterpolationOutOfRange: return "InterpolationOutOfRange";
    case ErrorCode::NonPositiveResult: return "NonPositiveResult";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::IntegrabilityViolated: return "IntegrabilityViolated";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::GramDriftExceeded: return "GramDriftExceeded";
    case ErrorCode::ClosureExceeded: return "ClosureExceeded";
    case ErrorCode::AllNodesMasked: return "AllNodesMasked";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::NonPositiveK: return "NonPositiveK";
  }
  return "Unknown";
}

}  // namespace tlsurf
