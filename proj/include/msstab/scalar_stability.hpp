#pragma once

// Mean-square stability of two-step Maruyama methods on the scalar test
// equation dX = lambda X dt + mu X dW.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "msstab/errors.hpp"
#include "msstab/polystab.hpp"
#include "msstab/schemes.hpp"
#include "msstab/verdict.hpp"

namespace msstab {

template <class Real>
using StabilityMatrixScalar = Eigen::Matrix<std::complex<Real>, 4, 4>;

/// Second-moment transition matrix of the reduced recurrence.
template <class Real>
StabilityMatrixScalar<Real> build_stability_matrix(const ReducedCoeffs<Real>& rc) {
  using std::conj;
  using std::norm;
  const auto& [a, b, c, d, x, y] = rc;
  StabilityMatrixScalar<Real> s;
  s << norm(a) + norm(b), conj(a) * c, a * conj(c), norm(c) + norm(d) + (a * b * conj(d) + conj(a) * conj(b) * d),
       conj(a), 0, conj(c), b * conj(d),
       a, c, 0, conj(b) * d,
       1, 0, 0, 0;
  return s;
}

namespace detail {

// Moduli and real parts shared by the characteristic polynomial and the
// theorem conditions.
template <class Real>
struct RcInvariants {
  Real A2, B2, C2, D2;  // |a|^2 .. |d|^2
  Real re_abd;          // Re(a b conj(d))
  Real re_abcd;         // Re(conj(a) b c conj(d))
  Real re_a2c;          // Re(a^2 conj(c))

  explicit RcInvariants(const ReducedCoeffs<Real>& rc) {
    using std::conj;
    using std::norm;
    A2 = norm(rc.a);
    B2 = norm(rc.b);
    C2 = norm(rc.c);
    D2 = norm(rc.d);
    re_abd = (rc.a * rc.b * conj(rc.d)).real();
    re_abcd = (conj(rc.a) * rc.b * rc.c * conj(rc.d)).real();
    re_a2c = (rc.a * rc.a * conj(rc.c)).real();
  }
};

}  // namespace detail

template <class Real>
QuarticCoeffs<Real> quartic_coeffs(const ReducedCoeffs<Real>& rc) {
  const detail::RcInvariants<Real> v(rc);
  QuarticCoeffs<Real> p;
  p.p1 = -v.A2 - v.B2;
  p.p2 = -2 * v.C2 - v.D2 - 2 * v.re_abd - 2 * v.re_a2c;
  p.p3 = -2 * v.re_abcd - v.A2 * v.C2 + v.B2 * v.C2;
  p.p4 = v.C2 * v.C2 + v.C2 * v.D2;
  return p;
}

/// Necessary and sufficient conditions in terms of (a, b, c, d). Condition
/// indices: 1 bounds |c|^2(|c|^2+|d|^2), 2 is the P(1) > 0 inequality, 3 the
/// reduced Jury determinant inequality. Improved schemes pass b*, d*.
template <class Real>
StabilityVerdict<Real> theorem_conditions(const ReducedCoeffs<Real>& rc, const Tolerances& tol = {}) {
  using std::abs;
  const detail::RcInvariants<Real> v(rc);
  const Real p4 = v.C2 * (v.C2 + v.D2);
  const Real one_m_c2 = 1 - v.C2;

  const Real m1 = 1 - p4;

  const Real lhs2 = v.A2 * (1 + v.C2) + v.B2 * one_m_c2 + 2 * v.re_abcd;
  const Real rhs2 = one_m_c2 * one_m_c2 - one_m_c2 * v.D2 - 2 * v.re_abd - 2 * v.re_a2c;
  const Real m2 = rhs2 - lhs2;

  const Real one_m_p4sq = 1 - p4 * p4;
  const Real skew = v.C2 * (v.B2 - v.A2);
  const Real first = (-2 * v.C2 - v.D2 - 2 * v.re_abd - 2 * v.re_a2c) * (1 - p4) * one_m_p4sq;
  const Real second = (-2 * v.re_abcd + skew + p4 * (v.A2 + v.B2)) * (-v.A2 - v.B2 + p4 * (2 * v.re_abcd - skew));
  const Real lhs3 = abs(first - second);
  const Real tail = 2 * v.re_abcd - skew - p4 * (v.A2 + v.B2);
  const Real rhs3 = one_m_p4sq * one_m_p4sq - tail * tail;
  const Real m3 = rhs3 - lhs3;

  const std::array<Real, 3> margins{m1, m2, m3};
  return verdict_from_margins<Real>(margins, tol.marginal);
}

/// Sufficient set: condition 2 of the theorem with |c|^2+|d|^2 < 1 and the
/// two sign conditions. True implies theorem_conditions is Stable.
template <class Real>
bool sufficient_conditions(const ReducedCoeffs<Real>& rc) {
  const detail::RcInvariants<Real> v(rc);
  const Real one_m_c2 = 1 - v.C2;
  const Real lhs2 = v.A2 * (1 + v.C2) + v.B2 * one_m_c2 + 2 * v.re_abcd;
  const Real rhs2 = one_m_c2 * one_m_c2 - one_m_c2 * v.D2 - 2 * v.re_abd - 2 * v.re_a2c;
  return lhs2 < rhs2 && v.C2 + v.D2 < 1 && v.re_abd + v.re_abcd >= 0 && v.re_a2c >= -v.A2 * v.C2;
}

/// Adams-type proposition for d = 0. Conditions: 1 |c| < 1, 2 the b-free
/// quadratic bound, 3 the |b|^2 bound, 4 the sign clause
/// Re(a^2 conj(c)) >= -|a|^2|c|^2 (non-strict).
template <class Real>
StabilityVerdict<Real> abam_conditions(const ReducedCoeffs<Real>& rc, const Tolerances& tol = {}) {
  if (rc.d != std::complex<Real>(0)) throw Error(ErrorCode::NotApplicable, "Adams-type proposition needs d = 0");
  using std::sqrt;
  const detail::RcInvariants<Real> v(rc);
  const Real one_m_c2 = 1 - v.C2;
  const Real m1 = 1 - sqrt(v.C2);
  const Real m2 = one_m_c2 * one_m_c2 - v.A2 * (1 + v.C2) - 2 * v.re_a2c;
  const Real m3 = one_m_c2 > 0 ? one_m_c2 - v.A2 * (1 + v.C2) / one_m_c2 - 2 * v.re_a2c / one_m_c2 - v.B2 : m1;
  const std::array<Condition<Real>, 4> conds{{{m1}, {m2}, {m3}, {v.re_a2c + v.A2 * v.C2, false}}};
  return verdict_from_conditions<Real>(conds, tol.marginal);
}

/// Hereditary proposition for b = 0. Conditions: 1 |c|^2+|d|^2 < 1, 2 the
/// quadratic bound, 3 the sign clause (non-strict).
template <class Real>
StabilityVerdict<Real> hereditary_conditions(const ReducedCoeffs<Real>& rc, const Tolerances& tol = {}) {
  if (rc.b != std::complex<Real>(0)) throw Error(ErrorCode::NotApplicable, "hereditary proposition needs b = 0");
  const detail::RcInvariants<Real> v(rc);
  const Real one_m_c2 = 1 - v.C2;
  const Real m1 = 1 - v.C2 - v.D2;
  const Real m2 = one_m_c2 * one_m_c2 - one_m_c2 * v.D2 - v.A2 * (1 + v.C2) - 2 * v.re_a2c;
  const std::array<Condition<Real>, 3> conds{{{m1}, {m2}, {v.re_a2c + v.A2 * v.C2, false}}};
  return verdict_from_conditions<Real>(conds, tol.marginal);
}

/// Real-coefficient form of the Adams-type proposition (d = 0).
template <class Real>
bool abam_real_remark(Real a, Real b, Real c) {
  using std::abs;
  return c > 0 && c < 1 && abs(a) < 1 - c && b * b * (1 - c) < (1 + c) * ((1 - c) * (1 - c) - a * a);
}

/// Real-coefficient form of the hereditary proposition (b = 0).
template <class Real>
bool hereditary_real_remark(Real a, Real c, Real d) {
  using std::abs;
  if (!(c * c + d * d < 1 && abs(a) < 1 - c)) return false;
  if (d == 0) return true;
  return (1 - c) / ((1 + c) * ((1 - c) * (1 - c) - a * a)) < 1 / (d * d);
}

template <class Real>
bool sde_stable(const ScalarTestEq<Real>& eq) {
  return eq.lambda.real() + std::norm(eq.mu) / 2 < 0;
}

/// Signed distance-like margin of the closed-form AB2 region in the
/// (x, Y) = (lambda h, mu^2 h) plane; inside iff > 0.
template <class Real>
Real region_ab2_margin_xy(Real x, Real Y) {
  const Real range = std::min(x + 1, -x);
  if (range <= 0) return range;
  return std::min(range, 2 * x * (x - 2) * (x + 1) / (x + 2) - Y);
}

template <class Real>
Real region_am2_margin_xy(Real x, Real Y) {
  const Real range = std::min(x + 6, -x);
  if (range <= 0) return range;
  return std::min(range, x * (x - 2) * (x + 6) / (2 * (3 - x)) - Y);
}

template <class Real>
bool region_ab2(Real h, Real lambda, Real mu) {
  return region_ab2_margin_xy(lambda * h, mu * mu * h) > 0;
}

template <class Real>
bool region_am2(Real h, Real lambda, Real mu) {
  return region_am2_margin_xy(lambda * h, mu * mu * h) > 0;
}

namespace detail {

template <class Real>
void require_sde_domain(const ScalarTestEq<Real>& eq) {
  using std::abs;
  const Real re = eq.lambda.real();
  const Real half_mu2 = std::norm(eq.mu) / 2;
  if (!(re < 0) || re + half_mu2 > Real(1e-12) * (abs(re) + half_mu2)) {
    throw Error(ErrorCode::OutsideDomain, "test equation is not mean-square stable");
  }
}

}  // namespace detail

/// Step-size bound below which AB2 is mean-square stable. Uses the real
/// closed form when lambda and mu are real, the complex bound otherwise.
template <class Real>
Real h0_ab2(const ScalarTestEq<Real>& eq) {
  using std::abs;
  using std::max;
  using std::sqrt;
  detail::require_sde_domain(eq);
  if (eq.is_real()) {
    const Real lam = eq.lambda.real();
    const Real mu2 = eq.mu.real() * eq.mu.real();
    const Real s = mu2 + 2 * lam;
    const Real second = (s + sqrt(max(Real(0), s * (mu2 + 18 * lam)))) / (4 * lam * lam);
    return std::min(-1 / lam, max(Real(0), second));
  }
  const Real re = eq.lambda.real();
  const Real lam_abs2 = std::norm(eq.lambda);
  const Real mu_abs2 = std::norm(eq.mu);
  const Real h1 = std::min(mu_abs2 / (2 * lam_abs2),
                           sqrt(max(Real(0), 4 * (-2 * re - mu_abs2) / (-6 * re * lam_abs2))));
  return std::min(1 / abs(eq.lambda), h1);
}

/// Real-parameter step-size bound for AM2.
template <class Real>
Real h0_am2(const ScalarTestEq<Real>& eq) {
  using std::max;
  using std::sqrt;
  if (!eq.is_real()) throw Error(ErrorCode::NotApplicable, "closed-form AM2 bound is for real lambda, mu");
  detail::require_sde_domain(eq);
  const Real lam = eq.lambda.real();
  const Real mu2 = eq.mu.real() * eq.mu.real();
  const Real s = mu2 + 2 * lam;
  const Real second = (-s + sqrt(max(Real(0), s * (mu2 + 8 * lam)))) / (lam * lam);
  return std::min(-6 / lam, max(Real(0), second));
}

template <class Real>
StabilityVerdict<Real> classify(Scheme scheme, const ScalarTestEq<Real>& eq, Real h, const Tolerances& tol = {}) {
  return theorem_conditions(reduce_scalar(catalog(scheme), eq, h), tol);
}

/// Cross-validation of one (scheme, lambda, mu, h) through every route.
template <class Real>
struct ClassifyReport {
  Scheme scheme;
  ReducedCoeffs<Real> rc;
  QuarticCoeffs<Real> p;
  StabilityVerdict<Real> theorem;
  std::optional<StabilityVerdict<Real>> jury;
  StabilityVerdict<Real> general;
  Real rho = 0;
  StabilityVerdict<Real> radius;
  std::optional<StabilityVerdict<Real>> proposition;
  std::vector<std::string> disagreements;  // theorem vs Schur-Cohn vs roots
  std::vector<std::string> findings;       // proposition vs theorem, logged only

  bool consistent() const { return disagreements.empty(); }
};

template <class Real>
ClassifyReport<Real> classify_checked(Scheme scheme, const ScalarTestEq<Real>& eq, Real h,
                                      const Tolerances& tol = {}) {
  ClassifyReport<Real> r{scheme, reduce_scalar(catalog(scheme), eq, h), {}, {}, {}, {}, 0, {}, {}, {}, {}};
  r.p = quartic_coeffs(r.rc);
  r.theorem = theorem_conditions(r.rc, tol);
  r.general = schur_cohn_general(r.p, tol);
  try {
    r.jury = schur_cohn_jury(r.p, tol);
  } catch (const Error& e) {
    r.disagreements.emplace_back(e.what());
  }
  r.rho = root_radius(r.p);
  r.radius = verdict_from_radius(r.rho, tol.marginal);

  const bool boundary = r.theorem.marginal() || r.general.marginal() || r.radius.marginal() ||
                        (r.jury && r.jury->marginal());
  if (!boundary) {
    auto check = [&](const char* name, Status s) {
      if (s != r.theorem.status) {
        r.disagreements.push_back(std::string(name) + " says " + std::string(to_string(s)) + ", theorem says " +
                                  std::string(to_string(r.theorem.status)));
      }
    };
    check("schur_cohn_general", r.general.status);
    if (r.jury) check("schur_cohn_jury", r.jury->status);
    check("root radius", r.radius.status);
  }

  const bool d_zero = r.rc.d == std::complex<Real>(0);
  const bool b_zero = r.rc.b == std::complex<Real>(0);
  if (d_zero || b_zero) {
    r.proposition = d_zero ? abam_conditions(r.rc, tol) : hereditary_conditions(r.rc, tol);
    const int sign_clause = d_zero ? 4 : 3;
    const auto& prop = *r.proposition;
    if (prop.status != r.theorem.status && !prop.marginal() && !r.theorem.marginal()) {
      const bool sign_failed = prop.failed_condition == sign_clause;
      std::string msg = std::string(d_zero ? "Adams-type" : "hereditary") + " proposition says " +
                        std::string(to_string(prop.status)) + ", theorem says " +
                        std::string(to_string(r.theorem.status));
      if (sign_failed) msg += " (sign clause is sufficient-only)";
      r.findings.push_back(std::move(msg));
    }
  }
  return r;
}

}  // namespace msstab
