#include "bmatch/error.hpp"

namespace bmatch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorCode::InvalidMaxMatches: return "InvalidMaxMatches";
    case ErrorCode::EmptyOrFullSubset: return "EmptyOrFullSubset";
    case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::AlphaShapeMismatch: return "AlphaShapeMismatch";
    case ErrorCode::AlphaNotNormalized: return "AlphaNotNormalized";
    case ErrorCode::InfeasibleDecision: return "InfeasibleDecision";
    case ErrorCode::InvalidArrival: return "InvalidArrival";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::UnsupportedPair: return "UnsupportedPair";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::ZeroDrift: return "ZeroDrift";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NCondViolated: return "NCondViolated";
    case ErrorCode::DisconnectedRestriction: return "DisconnectedRestriction";
    case ErrorCode::EmptyOppositeSide: return "EmptyOppositeSide";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace bmatch
