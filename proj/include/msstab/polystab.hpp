#pragma once

// Root location for the monic quartic z^4 + p1 z^3 + p2 z^2 + p3 z + p4:
// Schur coefficients, Schur-Cohn determinant criteria in their general and
// Jury-reduced forms, and a Durand-Kerner root finder used as the oracle.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "msstab/errors.hpp"
#include "msstab/verdict.hpp"

namespace msstab {

template <class Real>
struct QuarticCoeffs {
  Real p1 = 0, p2 = 0, p3 = 0, p4 = 0;

  /// Coefficients c_0..c_4 of sum c_k z^k.
  std::array<Real, 5> ascending() const { return {p4, p3, p2, p1, Real(1)}; }

  Real max_abs() const {
    using std::abs;
    return std::max({abs(p1), abs(p2), abs(p3), abs(p4)});
  }

  bool finite() const {
    return std::isfinite(double(p1)) && std::isfinite(double(p2)) && std::isfinite(double(p3)) &&
           std::isfinite(double(p4));
  }

  template <class T>
  T operator()(const T& z) const {
    return (((z + T(p1)) * z + T(p2)) * z + T(p3)) * z + T(p4);
  }
};

template <class Real>
struct SchurCoefficients {
  Real nu0 = 0, nu1 = 0, nu2 = 0, nu3 = 0;

  std::array<Real, 4> as_array() const { return {nu0, nu1, nu2, nu3}; }
};

template <class Real>
struct RootSet {
  std::array<std::complex<Real>, 4> roots{};
  Real residual = 0;

  Real spectral_radius() const {
    Real r = 0;
    for (const auto& z : roots) r = std::max(r, std::abs(z));
    return r;
  }
};

/// Closed-form Schur coefficients of the pair (P, P#). Throws
/// DegenerateDenominator(k) when the k-th denominator is below `floor`.
template <class Real>
SchurCoefficients<Real> schur_coefficients(const QuarticCoeffs<Real>& p, double floor = 1e-14) {
  using std::abs;
  const auto [p1, p2, p3, p4] = p;
  const Real d1 = 1 - p4 * p4;
  const Real e = p3 - p4 * p1;
  const Real f = p2 - p4 * p2;
  const Real g = p1 - p4 * p3;
  if (abs(d1) <= Real(floor)) throw Error(ErrorCode::DegenerateDenominator, "1 - p4^2 vanishes", 1);
  const Real d2 = d1 * d1 - e * e;
  if (abs(d2) <= Real(floor)) throw Error(ErrorCode::DegenerateDenominator, "(1-p4^2)^2 - (p3-p4 p1)^2 vanishes", 2);
  SchurCoefficients<Real> nu;
  nu.nu0 = p4;
  nu.nu1 = e / d1;
  nu.nu2 = (d1 * f - e * g) / d2;
  const Real num3 = g - e * f / d1 - nu.nu2 * (g - e * f / d1);
  const Real den3 = d1 - e * e / d1 - nu.nu2 * (f - e * g / d1);
  if (abs(den3) <= Real(floor)) throw Error(ErrorCode::DegenerateDenominator, "nu3 denominator vanishes", 3);
  nu.nu3 = num3 / den3;
  return nu;
}

/// Generic (P_k, Q_k) recursion for a real polynomial given by ascending
/// coefficients c_0..c_n (c_n != 0), paired with P#(z) = z^n P(1/z).
/// Returns nu_0..nu_{n-1}.
template <class Real>
std::vector<Real> schur_recursion(std::span<const Real> ascending, double floor = 1e-14) {
  using std::abs;
  const std::size_t n = ascending.size() - 1;
  std::vector<Real> P(ascending.begin(), ascending.end());
  std::vector<Real> Q(ascending.rbegin(), ascending.rend());
  std::vector<Real> nu;
  nu.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (abs(Q[0]) <= Real(floor)) {
      throw Error(ErrorCode::DegenerateDenominator, "Q_k(0) vanishes in Schur recursion", static_cast<int>(k));
    }
    const Real v = P[0] / Q[0];
    nu.push_back(v);
    // P_{k+1} = (P_k - v Q_k) / z ; Q_{k+1} = Q_k - v P_k
    std::vector<Real> Pn(P.size() - 1), Qn(Q.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
      const Real diff = P[i] - v * Q[i];
      if (i > 0) Pn[i - 1] = diff;
      Qn[i] = Q[i] - v * P[i];
    }
    // Q_{k+1} has a vanishing leading term; drop it to keep degrees aligned.
    Qn.pop_back();
    P = std::move(Pn);
    Q = std::move(Qn);
  }
  return nu;
}

/// Delta_4(P, P#) = T1 T1^T - T2 T2^T with lower-triangular Toeplitz factors.
template <class Real>
Eigen::Matrix<Real, 4, 4> schur_cohn_matrix(const QuarticCoeffs<Real>& p) {
  Eigen::Matrix<Real, 4, 4> t1, t2;
  t1 << 1, 0, 0, 0,
        p.p1, 1, 0, 0,
        p.p2, p.p1, 1, 0,
        p.p3, p.p2, p.p1, 1;
  t2 << p.p4, 0, 0, 0,
        p.p3, p.p4, 0, 0,
        p.p2, p.p3, p.p4, 0,
        p.p1, p.p2, p.p3, p.p4;
  return t1 * t1.transpose() - t2 * t2.transpose();
}

namespace detail {

template <class Real>
Real cofactor_det(const Eigen::Matrix<Real, 4, 4>& m, int k) {
  if (k == 1) return m(0, 0);
  if (k == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Real det = 0;
  for (int col = 0; col < k; ++col) {
    Eigen::Matrix<Real, 4, 4> minor = Eigen::Matrix<Real, 4, 4>::Zero();
    for (int r = 1; r < k; ++r) {
      for (int c = 0, mc = 0; c < k; ++c) {
        if (c == col) continue;
        minor(r - 1, mc++) = m(r, c);
      }
    }
    const Real sign = (col % 2 == 0) ? Real(1) : Real(-1);
    det += sign * m(0, col) * cofactor_det(minor, k - 1);
  }
  return det;
}

}  // namespace detail

/// det Delta_k for k = 1..4 by cofactor expansion of the leading minors.
template <class Real>
std::array<Real, 4> schur_cohn_minors(const QuarticCoeffs<Real>& p) {
  const auto m = schur_cohn_matrix(p);
  return {detail::cofactor_det(m, 1), detail::cofactor_det(m, 2), detail::cofactor_det(m, 3),
          detail::cofactor_det(m, 4)};
}

/// Durand-Kerner simultaneous iteration. Throws NoConvergence when the
/// residual bound is not met after `max_iter` sweeps; retry with another
/// `phase` in that case.
template <class Real>
RootSet<Real> quartic_roots(const QuarticCoeffs<Real>& p, Real phase = Real(0.4), int max_iter = 500) {
  using C = std::complex<Real>;
  using std::abs;
  if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "non-finite quartic coefficients");
  const Real scale = std::max(Real(1), p.max_abs());
  const Real radius = std::pow(scale, Real(0.25));
  RootSet<Real> out;
  auto& z = out.roots;
  for (int k = 0; k < 4; ++k) {
    z[k] = std::polar(radius, phase + Real(k) * std::numbers::pi_v<Real> / 2);
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int iter = 0; iter < max_iter; ++iter) {
    Real max_step = 0;
    for (int i = 0; i < 4; ++i) {
      C denom(1);
      for (int j = 0; j < 4; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      if (denom == C(0)) denom = C(eps, eps);
      const C step = p(z[i]) / denom;
      z[i] -= step;
      max_step = std::max(max_step, abs(step) / std::max(Real(1), abs(z[i])));
    }
    if (max_step <= 4 * eps) break;
  }
  out.residual = 0;
  for (const auto& r : z) out.residual = std::max(out.residual, abs(p(r)));
  if (!(out.residual <= Real(1e-10) * scale)) {
    throw Error(ErrorCode::NoConvergence, "Durand-Kerner residual above tolerance");
  }
  return out;
}

/// Spectral radius of the companion polynomial, retrying the root finder
/// from rotated starts on NoConvergence.
template <class Real>
Real root_radius(const QuarticCoeffs<Real>& p) {
  for (int attempt = 0;; ++attempt) {
    try {
      return quartic_roots(p, Real(0.4) + Real(0.37) * Real(attempt)).spectral_radius();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoConvergence || attempt >= 5) throw;
    }
  }
}

template <class Real>
StabilityVerdict<Real> root_verdict(const QuarticCoeffs<Real>& p, const Tolerances& tol = {}) {
  return verdict_from_radius(root_radius(p), tol.marginal);
}

/// Simplified Schur-Cohn conditions (SC). Condition 1 is |p4| < 1, which
/// equals p4 < 1 for every p4 >= 0 produced by a stability matrix.
template <class Real>
StabilityVerdict<Real> schur_cohn_general(const QuarticCoeffs<Real>& p, const Tolerances& tol = {}) {
  using std::abs;
  const auto [p1, p2, p3, p4] = p;
  const Real d1 = 1 - p4 * p4;
  const Real e = p3 - p4 * p1;
  const Real g = p1 - p4 * p3;
  const std::array<Real, 4> margins{
      1 - abs(p4),
      d1 - abs(e),
      d1 * d1 - e * e - abs(d1 * (p2 - p4 * p2) - e * g),
      d1 * (1 + p2 + p4) - (p1 + p3) * e - abs((1 + p4) * g - p2 * e),
  };
  return verdict_from_margins<Real>(margins, tol.marginal);
}

/// |nu_k| < 1 for the closed-form Schur coefficients, deferring to the root
/// oracle when a denominator degenerates.
template <class Real>
StabilityVerdict<Real> schur_nu_verdict(const QuarticCoeffs<Real>& p, const Tolerances& tol = {}) {
  using std::abs;
  if (abs(p.p4) >= 1) return {Status::Unstable, 1 - abs(p.p4), 1};
  try {
    const auto nu = schur_coefficients(p, tol.denominator_floor).as_array();
    std::array<Real, 4> margins;
    for (int k = 0; k < 4; ++k) margins[k] = 1 - abs(nu[k]);
    return verdict_from_margins<Real>(margins, tol.marginal);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDenominator) throw;
    return root_verdict(p, tol);
  }
}

/// Margin of the alternative third Jury condition (positive when it holds).
template <class Real>
Real elaydi_third_margin(const QuarticCoeffs<Real>& p) {
  using std::abs;
  const auto [p1, p2, p3, p4] = p;
  const Real lhs = abs(p2 * (1 - p4) + p4 * (1 - p4 * p4) + p1 * (p4 * p1 - p3));
  const Real rhs = p2 * p4 * (1 - p4) + 1 - p4 * p4 + p3 * (p1 * p4 - p3);
  return rhs - lhs;
}

/// Jury-reduced Schur-Cohn conditions (SCJ). Throws CriterionDisagreement
/// when the third condition and its alternative form disagree by more than
/// the marginal band while conditions 1 and 2 hold.
template <class Real>
StabilityVerdict<Real> schur_cohn_jury(const QuarticCoeffs<Real>& p, const Tolerances& tol = {}) {
  using std::abs;
  const auto [p1, p2, p3, p4] = p;
  const Real d1 = 1 - p4 * p4;
  const std::array<Real, 3> margins{
      1 - abs(p4),
      1 + p2 + p4 - abs(p1 + p3),
      d1 * d1 - (p3 - p1 * p4) * (p3 - p1 * p4) - abs(p2 * (1 - p4) * d1 - (p3 - p4 * p1) * (p1 - p4 * p3)),
  };
  if (margins[0] > Real(tol.marginal) && margins[1] > Real(tol.marginal)) {
    const Real alt = elaydi_third_margin(p);
    const bool clear = abs(margins[2]) > Real(tol.marginal) && abs(alt) > Real(tol.marginal);
    if (clear && ((margins[2] > 0) != (alt > 0))) {
      throw Error(ErrorCode::CriterionDisagreement, "third Jury condition and its alternative form disagree", 3);
    }
  }
  return verdict_from_margins<Real>(margins, tol.marginal);
}

}  // namespace msstab
