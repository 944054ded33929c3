#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>

namespace msstab {

enum class Status { Stable, Unstable, Marginal };

constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::Stable: return "stable";
    case Status::Unstable: return "unstable";
    case Status::Marginal: return "marginal";
  }
  return "unknown";
}

/// Outcome of a stability test. `witness` is the spectral radius for
/// radius-based verdicts and the margin (rhs - lhs) of the deciding
/// inequality for closed-form criteria. `failed_condition` is 1-based.
template <class Real>
struct StabilityVerdict {
  Status status = Status::Unstable;
  Real witness = Real(0);
  std::optional<int> failed_condition;

  bool stable() const { return status == Status::Stable; }
  bool unstable() const { return status == Status::Unstable; }
  bool marginal() const { return status == Status::Marginal; }
};

struct Tolerances {
  double marginal = 1e-9;           // band around closed-form inequalities
  double denominator_floor = 1e-14; // Schur coefficient recursion
  double radius_margin = 1e-7;      // |rho - 1| band for eigensolver-based verdicts
};

/// Verdict from a list of margins m_k = rhs_k - lhs_k, condition k holding
/// strictly iff m_k > 0. A clear violation wins over a near-equality.
template <class Real>
StabilityVerdict<Real> verdict_from_margins(std::span<const Real> margins, double tol) {
  for (std::size_t k = 0; k < margins.size(); ++k) {
    if (!(margins[k] >= -Real(tol))) {
      return {Status::Unstable, margins[k], static_cast<int>(k + 1)};
    }
  }
  for (std::size_t k = 0; k < margins.size(); ++k) {
    if (margins[k] <= Real(tol)) {
      return {Status::Marginal, margins[k], static_cast<int>(k + 1)};
    }
  }
  Real smallest = margins.empty() ? Real(0) : *std::min_element(margins.begin(), margins.end());
  return {Status::Stable, smallest, std::nullopt};
}

/// One inequality of a criterion. Non-strict conditions (>= 0) hold at
/// equality and never produce a Marginal verdict.
template <class Real>
struct Condition {
  Real margin;
  bool strict = true;
};

template <class Real>
StabilityVerdict<Real> verdict_from_conditions(std::span<const Condition<Real>> conds, double tol) {
  for (std::size_t k = 0; k < conds.size(); ++k) {
    if (!(conds[k].margin >= -Real(tol))) return {Status::Unstable, conds[k].margin, static_cast<int>(k + 1)};
  }
  for (std::size_t k = 0; k < conds.size(); ++k) {
    if (conds[k].strict && conds[k].margin <= Real(tol)) {
      return {Status::Marginal, conds[k].margin, static_cast<int>(k + 1)};
    }
  }
  Real smallest = conds.empty() ? Real(0) : conds[0].margin;
  for (const auto& c : conds) smallest = std::min(smallest, c.margin);
  return {Status::Stable, smallest, std::nullopt};
}

template <class Real>
StabilityVerdict<Real> verdict_from_radius(Real rho, double tol) {
  using std::abs;
  if (!std::isfinite(static_cast<double>(rho))) return {Status::Unstable, rho, std::nullopt};
  if (abs(rho - Real(1)) <= Real(tol)) return {Status::Marginal, rho, std::nullopt};
  return {rho < Real(1) ? Status::Stable : Status::Unstable, rho, std::nullopt};
}

}  // namespace msstab
