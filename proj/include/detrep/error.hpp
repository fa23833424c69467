#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace detrep {

/// Failure categories raised by the library. Callers branch on the code,
/// the message is for humans.
enum class Errc {
  InvalidArgument,
  ZeroPolynomial,
  SingularTransform,
  NearZeroLeadingCoefficient,
  ReductionResidual,
  TangentIsCoordinateLine,
  SingularPoint,
  NeedsRotation,
  NotDecomposable,
  ZeroConic,
  ConstructionFailed,
  UnsupportedDegree,
  DegenerateInput,
  RetriesExhausted,
  DimensionMismatch,
  SingularDelta0,
  ParseError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::SingularTransform: return "SingularTransform";
    case Errc::NearZeroLeadingCoefficient: return "NearZeroLeadingCoefficient";
    case Errc::ReductionResidual: return "ReductionResidual";
    case Errc::TangentIsCoordinateLine: return "TangentIsCoordinateLine";
    case Errc::SingularPoint: return "SingularPoint";
    case Errc::NeedsRotation: return "NeedsRotation";
    case Errc::NotDecomposable: return "NotDecomposable";
    case Errc::ZeroConic: return "ZeroConic";
    case Errc::ConstructionFailed: return "ConstructionFailed";
    case Errc::UnsupportedDegree: return "UnsupportedDegree";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::RetriesExhausted: return "RetriesExhausted";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularDelta0: return "SingularDelta0";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace detrep
