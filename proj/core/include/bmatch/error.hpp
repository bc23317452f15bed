#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmatch {

enum class ErrorCode {
  DisconnectedGraph,
  IndexOutOfRange,
  EmptyEdgeSet,
  InvalidMaxMatches,
  EmptyOrFullSubset,
  SubsetTooLarge,
  AlphaShapeMismatch,
  AlphaNotNormalized,
  InfeasibleDecision,
  InvalidArrival,
  NotNormalized,
  UnsupportedPair,
  EmptyComplement,
  ZeroDrift,
  ZeroVariance,
  InvalidParameter,
  NCondViolated,
  DisconnectedRestriction,
  EmptyOppositeSide,
  NoConvergence,
  StateSpaceTooLarge,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error code. All library failures
/// are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bmatch
