#pragma once

// Mean-square stability of two-step Maruyama methods on linear systems
// dX = F X dt + sum_r G_r X dW_r.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

#include "msstab/errors.hpp"
#include "msstab/schemes.hpp"
#include "msstab/verdict.hpp"

namespace msstab {

/// 4n^2 x 4n^2 second-moment transition matrix acting on
/// (vec E[X_i X_i^T], vec E[X_i X_{i-1}^T], vec E[X_{i-1} X_i^T], vec E[X_{i-1} X_{i-1}^T]).
template <class Real>
MatrixX<Real> build_system_stability_matrix(const SystemMatrices<Real>& sm) {
  using Eigen::kroneckerProduct;
  const Eigen::Index n = sm.A.rows();
  if (n == 0 || sm.A.cols() != n || sm.C.rows() != n || sm.C.cols() != n || sm.B.size() != sm.D.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent system matrices");
  }
  for (std::size_t r = 0; r < sm.B.size(); ++r) {
    if (sm.B[r].rows() != n || sm.B[r].cols() != n || sm.D[r].rows() != n || sm.D[r].cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "noise matrices must be n x n", static_cast<int>(r));
    }
  }
  const Eigen::Index n2 = n * n;
  const MatrixX<Real> I = MatrixX<Real>::Identity(n, n);
  MatrixX<Real> bb = MatrixX<Real>::Zero(n2, n2);
  MatrixX<Real> dd = MatrixX<Real>::Zero(n2, n2);
  MatrixX<Real> db = MatrixX<Real>::Zero(n2, n2);
  MatrixX<Real> bd = MatrixX<Real>::Zero(n2, n2);
  MatrixX<Real> R = MatrixX<Real>::Zero(n2, n2);
  for (std::size_t r = 0; r < sm.B.size(); ++r) {
    const auto& B = sm.B[r];
    const auto& D = sm.D[r];
    bb += kroneckerProduct(B, B);
    dd += kroneckerProduct(D, D);
    db += kroneckerProduct(D, B);
    bd += kroneckerProduct(B, D);
    const MatrixX<Real> AB = sm.A * B;
    R += kroneckerProduct(AB, D);
    R += kroneckerProduct(D, AB);
  }

  MatrixX<Real> S = MatrixX<Real>::Zero(4 * n2, 4 * n2);
  S.block(0, 0, n2, n2) = MatrixX<Real>(kroneckerProduct(sm.A, sm.A)) + bb;
  S.block(0, n2, n2, n2) = kroneckerProduct(sm.A, sm.C);
  S.block(0, 2 * n2, n2, n2) = kroneckerProduct(sm.C, sm.A);
  S.block(0, 3 * n2, n2, n2) = MatrixX<Real>(kroneckerProduct(sm.C, sm.C)) + dd + R;

  S.block(n2, 0, n2, n2) = kroneckerProduct(sm.A, I);
  S.block(n2, 2 * n2, n2, n2) = kroneckerProduct(sm.C, I);
  S.block(n2, 3 * n2, n2, n2) = db;

  S.block(2 * n2, 0, n2, n2) = kroneckerProduct(I, sm.A);
  S.block(2 * n2, n2, n2, n2) = kroneckerProduct(I, sm.C);
  S.block(2 * n2, 3 * n2, n2, n2) = bd;

  S.block(3 * n2, 0, n2, n2).setIdentity();
  return S;
}

/// Largest eigenvalue modulus (Hessenberg reduction + shifted QR).
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real spectral_radius(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (M.rows() != M.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
  if (M.rows() > 256) throw Error(ErrorCode::InvalidArgument, "matrix larger than 256 x 256");
  if (M.rows() == 0) return Real(0);
  const Dense A = M;
  if (!A.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    Eigen::ComplexEigenSolver<Dense> es(A, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex QR iteration did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
  } else {
    // Block-symmetric stability matrices can stall the default 40 sweeps per row.
    Eigen::EigenSolver<Dense> es;
    es.setMaxIterations(400 * A.rows());
    es.compute(A, false);
    if (es.info() == Eigen::Success) return es.eigenvalues().cwiseAbs().maxCoeff();
    using Complex = std::complex<Real>;
    using ComplexDense = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::ComplexEigenSolver<ComplexDense> ces;
    ces.setMaxIterations(400 * A.rows());
    ces.compute(A.template cast<Complex>(), false);
    if (ces.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "real and complex QR iteration did not converge");
    return ces.eigenvalues().cwiseAbs().maxCoeff();
  }
}

/// Gelfand estimate ||M^(2^k)||^(1/2^k) by repeated squaring with
/// renormalisation. Converges slowly but needs no eigensolver.
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real gelfand_radius(const Eigen::MatrixBase<Derived>& M,
                                                                          int squarings = 48) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using std::exp;
  using std::log;
  if (M.rows() != M.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> P = M;
  // After k squarings P * exp(log_scale) == M^(2^k); log_rho tracks log_scale / 2^k.
  Real log_rho = 0;
  Real weight = 1;
  for (int k = 0; k <= squarings; ++k) {
    const Real nrm = P.norm();
    if (nrm == Real(0)) return Real(0);
    P /= nrm;
    log_rho += weight * log(nrm);
    if (k == squarings) break;
    P = (P * P).eval();
    weight /= 2;
  }
  return exp(log_rho);
}

template <class Real>
bool sde_system_stable_single_noise(Real lambda, Real sigma, Real eps) {
  using std::abs;
  const Real s = abs(sigma) + abs(eps);
  return lambda + s * s / 2 < 0;
}

template <class Real>
bool sde_system_stable_two_noise(Real lambda, Real sigma, Real eps) {
  return lambda + (sigma * sigma + eps * eps) / 2 < 0;
}

/// Continuous-time second-moment generator F (+) F + sum_r G_r (x) G_r.
template <class Real>
MatrixX<Real> sde_ms_matrix(const SystemTestEq<Real>& eq) {
  using Eigen::kroneckerProduct;
  eq.validate();
  const Eigen::Index n = eq.dim();
  const MatrixX<Real> I = MatrixX<Real>::Identity(n, n);
  MatrixX<Real> S = MatrixX<Real>(kroneckerProduct(eq.F, I)) + MatrixX<Real>(kroneckerProduct(I, eq.F));
  for (const auto& g : eq.G) S += kroneckerProduct(g, g);
  return S;
}

template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real spectral_abscissa(const Eigen::MatrixBase<Derived>& M) {
  using Dense = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (M.rows() != M.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral abscissa needs a square matrix");
  Eigen::EigenSolver<Dense> es(Dense(M), false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "QR iteration did not converge");
  return es.eigenvalues().real().maxCoeff();
}

/// General (F, G) SDE-level check via the spectral abscissa.
template <class Real>
bool sde_system_stable(const SystemTestEq<Real>& eq) {
  return spectral_abscissa(sde_ms_matrix(eq)) < 0;
}

template <class Real>
StabilityVerdict<Real> classify_system(Scheme scheme, const SystemTestEq<Real>& eq, Real h,
                                       const Tolerances& tol = {}) {
  const Real rho = spectral_radius(build_system_stability_matrix(reduce_system(catalog(scheme), eq, h)));
  return verdict_from_radius(rho, tol.radius_margin);
}

template <class Real>
Real system_radius(Scheme scheme, const SystemTestEq<Real>& eq, Real h) {
  return spectral_radius(build_system_stability_matrix(reduce_system(catalog(scheme), eq, h)));
}

}  // namespace msstab
