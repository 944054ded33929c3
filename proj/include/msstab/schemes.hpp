#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msstab/errors.hpp"

namespace msstab {

/// Exact rational coefficient, converted to floating point at use.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  template <class Real>
  constexpr Real as() const {
    return Real(num) / Real(den);
  }
  friend constexpr bool operator==(const Rational&, const Rational&) = default;
};

enum class Scheme { AB2, AB2I, AM2, AM2I, BDF2, BDF2I };

inline constexpr std::array<Scheme, 6> kAllSchemes{Scheme::AB2, Scheme::AB2I, Scheme::AM2,
                                                   Scheme::AM2I, Scheme::BDF2, Scheme::BDF2I};

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view token);
Scheme standard_variant(Scheme s);
Scheme improved_variant(Scheme s);

/// Coefficients of one two-step method: alpha_0..2, beta_0..2, gamma_1..2 and,
/// for the improved variants, eta_1..2.
struct SchemeSpec {
  Scheme name;
  std::array<Rational, 3> alpha;
  std::array<Rational, 3> beta;
  std::array<Rational, 2> gamma;
  std::optional<std::array<Rational, 2>> eta;

  bool improved() const { return eta.has_value(); }
};

const SchemeSpec& catalog(Scheme s);

template <class Real>
struct ScalarTestEq {
  std::complex<Real> lambda;
  std::complex<Real> mu;

  bool is_real() const { return lambda.imag() == 0 && mu.imag() == 0; }
};

/// Coefficients of X_i = a X_{i-1} + c X_{i-2} + b X_{i-1} xi_{i-1} + d X_{i-2} xi_{i-2}.
/// For improved schemes b and d already hold b* and d*.
template <class Real>
struct ReducedCoeffs {
  using C = std::complex<Real>;
  C a{}, b{}, c{}, d{};
  C x{}, y{};
};

/// x = h lambda, y = mu sqrt(h).
template <class Real>
ReducedCoeffs<Real> reduce_xy(const SchemeSpec& s, std::complex<Real> x, std::complex<Real> y) {
  using C = std::complex<Real>;
  const Real a0 = s.alpha[0].as<Real>(), a1 = s.alpha[1].as<Real>(), a2 = s.alpha[2].as<Real>();
  const Real b0 = s.beta[0].as<Real>(), b1 = s.beta[1].as<Real>(), b2 = s.beta[2].as<Real>();
  const Real g1 = s.gamma[0].as<Real>(), g2 = s.gamma[1].as<Real>();
  const C den = a0 - b0 * x;
  if (std::abs(den) <= Real(1e-14)) {
    throw Error(ErrorCode::SingularDenominator, "alpha0 - beta0*h*lambda vanishes");
  }
  // Real denominators scale by the reciprocal, rounding like the LU solve in reduce_system.
  const Real inv_den = den.imag() == 0 ? 1 / den.real() : Real(0);
  const auto over_den = [&](C num) { return den.imag() == 0 ? num * inv_den : num / den; };
  ReducedCoeffs<Real> rc;
  rc.x = x;
  rc.y = y;
  rc.a = over_den(-a1 + b1 * x);
  rc.b = over_den(g1 * y);
  rc.c = over_den(-a2 + b2 * x);
  rc.d = over_den(g2 * y);
  if (s.eta) {
    const Real e1 = (*s.eta)[0].as<Real>(), e2 = (*s.eta)[1].as<Real>();
    rc.b += over_den((g1 + e1) * (x * y));
    rc.d += over_den((g2 + e2) * (x * y));
  }
  return rc;
}

template <class Real>
ReducedCoeffs<Real> reduce_scalar(const SchemeSpec& s, const ScalarTestEq<Real>& eq, Real h) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  using std::sqrt;
  return reduce_xy<Real>(s, h * eq.lambda, eq.mu * sqrt(h));
}

template <class Real>
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// dX = F X dt + sum_r G_r X dW_r.
template <class Real>
struct SystemTestEq {
  MatrixX<Real> F;
  std::vector<MatrixX<Real>> G;

  Eigen::Index dim() const { return F.rows(); }
  std::size_t noises() const { return G.size(); }

  void validate() const {
    if (F.rows() == 0 || F.rows() != F.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "F must be a non-empty square matrix");
    }
    if (G.empty()) throw Error(ErrorCode::DimensionMismatch, "at least one diffusion matrix is required");
    for (const auto& g : G) {
      if (g.rows() != F.rows() || g.cols() != F.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "diffusion matrices must match F");
      }
      if (!g.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite diffusion entry");
    }
    if (!F.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite drift entry");
  }
};

/// X_i = A X_{i-1} + C X_{i-2} + sum_r B_r X_{i-1} xi_{r,i-1} + sum_r D_r X_{i-2} xi_{r,i-2}.
template <class Real>
struct SystemMatrices {
  MatrixX<Real> A, C;
  std::vector<MatrixX<Real>> B, D;
  bool improved = false;

  Eigen::Index dim() const { return A.rows(); }
};

/// Single-noise example system: F = lambda I, G = [[sigma, eps], [eps, sigma]].
template <class Real>
SystemTestEq<Real> single_noise_system(Real lambda, Real sigma, Real eps) {
  SystemTestEq<Real> eq;
  eq.F = lambda * MatrixX<Real>::Identity(2, 2);
  MatrixX<Real> g(2, 2);
  g << sigma, eps, eps, sigma;
  eq.G = {g};
  return eq;
}

/// Two-noise example system: F = lambda I, G_1 = sigma I, G_2 = [[0, -eps], [eps, 0]].
template <class Real>
SystemTestEq<Real> two_noise_system(Real lambda, Real sigma, Real eps) {
  SystemTestEq<Real> eq;
  eq.F = lambda * MatrixX<Real>::Identity(2, 2);
  MatrixX<Real> g2(2, 2);
  g2 << 0, -eps, eps, 0;
  eq.G = {sigma * MatrixX<Real>::Identity(2, 2), g2};
  return eq;
}

template <class Real>
SystemMatrices<Real> reduce_system(const SchemeSpec& s, const SystemTestEq<Real>& eq, Real h,
                                   double max_condition = 1e12) {
  using std::sqrt;
  eq.validate();
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  const Eigen::Index n = eq.dim();
  const MatrixX<Real> I = MatrixX<Real>::Identity(n, n);
  const Real a0 = s.alpha[0].as<Real>(), a1 = s.alpha[1].as<Real>(), a2 = s.alpha[2].as<Real>();
  const Real b0 = s.beta[0].as<Real>(), b1 = s.beta[1].as<Real>(), b2 = s.beta[2].as<Real>();
  const Real g1 = s.gamma[0].as<Real>(), g2 = s.gamma[1].as<Real>();

  // Scaled exactly as reduce_xy scales x = h lambda and y = mu sqrt(h).
  const MatrixX<Real> X = h * eq.F;
  const MatrixX<Real> resolvent = a0 * I - b0 * X;
  Eigen::PartialPivLU<MatrixX<Real>> lu(resolvent);
  const Real rcond = lu.rcond();
  if (!(rcond > Real(1) / Real(max_condition))) {
    throw Error(ErrorCode::SingularResolvent, "alpha0 I - h beta0 F is singular or ill-conditioned");
  }

  SystemMatrices<Real> m;
  m.improved = s.improved();
  m.A = lu.solve(-a1 * I + b1 * X);
  m.C = lu.solve(-a2 * I + b2 * X);
  const Real sh = sqrt(h);
  for (const auto& g : eq.G) {
    const MatrixX<Real> Y = sh * g;
    MatrixX<Real> b = lu.solve(g1 * Y);
    MatrixX<Real> d = lu.solve(g2 * Y);
    if (s.eta) {
      const MatrixX<Real> xy = X * Y;
      b += lu.solve((g1 + (*s.eta)[0].as<Real>()) * xy);
      d += lu.solve((g2 + (*s.eta)[1].as<Real>()) * xy);
    }
    m.B.push_back(std::move(b));
    m.D.push_back(std::move(d));
  }
  return m;
}

}  // namespace msstab
