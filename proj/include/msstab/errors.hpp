#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msstab {

enum class ErrorCode {
  DegenerateDenominator,
  CriterionDisagreement,
  NoConvergence,
  SingularDenominator,
  SingularResolvent,
  DimensionMismatch,
  NotApplicable,
  OutsideDomain,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::CriterionDisagreement: return "CriterionDisagreement";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Numerical failure raised by the analysis routines. `index()` carries the
/// offending denominator or condition index where one applies, else -1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int index = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  int index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  int index_;
};

}  // namespace msstab
