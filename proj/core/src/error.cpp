#include "monopole/error.hpp"

namespace monopole {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FewerThanFourRealRoots: return "FewerThanFourRealRoots";
    case ErrorCode::MultipleRootDetected: return "MultipleRootDetected";
    case ErrorCode::NonZeroRootSum: return "NonZeroRootSum";
    case ErrorCode::InadmissibleParams: return "InadmissibleParams";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotEvenQuartic: return "NotEvenQuartic";
    case ErrorCode::DegenerateCoordinates: return "DegenerateCoordinates";
    case ErrorCode::WrongSignature: return "WrongSignature";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::StencilOutsideChart: return "StencilOutsideChart";
    case ErrorCode::ChartOverflow: return "ChartOverflow";
    case ErrorCode::InterlacingViolated: return "InterlacingViolated";
    case ErrorCode::AxisPoint: return "AxisPoint";
    case ErrorCode::NonPositiveCoordinate: return "NonPositiveCoordinate";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::OutsideChart: return "OutsideChart";
    case ErrorCode::FixedPointSingularity: return "FixedPointSingularity";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::CenterSingularity: return "CenterSingularity";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::SingularSample: return "SingularSample";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace monopole
