#pragma once

#include <stdexcept>
#include <string>

namespace iterx {

enum class ErrorCode {
  ZeroMap,
  ConstantMap,
  Overflow,
  SingularMobius,
  IndeterminateValue,
  UnsupportedCriticalDegree,
  SingularCurve,
  NonConvergence,
  ToleranceExceeded,
  NotPowerComposite,
  HypothesisFailure,
  DegenerateLift,
  PrecisionExhausted,
  DivisionByZeroToPrecision,
  HenselConditionFailed,
  NotEisenstein,
  InvalidBreaks,
  NotGoodReduction,
  NotPowerLikeWithin,
  AmbiguousPolygon,
  UnitEquationUnsolvableAtPrecision,
  ResidueExtensionTooLarge,
  CertificateFailure,
  InvalidInput,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroMap: return "ZeroMap";
    case ErrorCode::ConstantMap: return "ConstantMap";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SingularMobius: return "SingularMobius";
    case ErrorCode::IndeterminateValue: return "IndeterminateValue";
    case ErrorCode::UnsupportedCriticalDegree: return "UnsupportedCriticalDegree";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorCode::NotPowerComposite: return "NotPowerComposite";
    case ErrorCode::HypothesisFailure: return "HypothesisFailure";
    case ErrorCode::DegenerateLift: return "DegenerateLift";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::DivisionByZeroToPrecision: return "DivisionByZeroToPrecision";
    case ErrorCode::HenselConditionFailed: return "HenselConditionFailed";
    case ErrorCode::NotEisenstein: return "NotEisenstein";
    case ErrorCode::InvalidBreaks: return "InvalidBreaks";
    case ErrorCode::NotGoodReduction: return "NotGoodReduction";
    case ErrorCode::NotPowerLikeWithin: return "NotPowerLikeWithin";
    case ErrorCode::AmbiguousPolygon: return "AmbiguousPolygon";
    case ErrorCode::UnitEquationUnsolvableAtPrecision: return "UnitEquationUnsolvableAtPrecision";
    case ErrorCode::ResidueExtensionTooLarge: return "ResidueExtensionTooLarge";
    case ErrorCode::CertificateFailure: return "CertificateFailure";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can tell input problems from failed checks.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Usage/input problems as opposed to a mathematical check failing.
  bool is_input_error() const noexcept {
    return code_ == ErrorCode::ZeroMap || code_ == ErrorCode::ConstantMap ||
           code_ == ErrorCode::InvalidInput || code_ == ErrorCode::SingularMobius ||
           code_ == ErrorCode::SingularCurve;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace iterx
