// Copyright 2026, The parafis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small dense kernels shared by the rule premises, the WRLS conclusions and
// the deferred forgetting windows. Dimensions are tiny (d <= ~10), so
// everything works on dynamic Eigen types and favours clarity.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "parafis/errors.hpp"

namespace parafis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Downdates whose denominator 1 - w x'Cx falls below this are skipped.
inline constexpr double kDowndateGuard = 1e-8;

/// Relative ridge added to a covariance before it is inverted.
inline constexpr double kRidgeScale = 1e-6;
inline constexpr double kRidgeFloor = 1e-12;

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

inline void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace detail

/// (x - mu)' A^{-1} (x - mu), given the inverse directly.
inline double mahalanobis_sq(const Vector& x, const Vector& mu,
                             const Matrix& a_inv) {
  detail::require(x.size() == mu.size() && a_inv.rows() == x.size() &&
                      a_inv.cols() == x.size(),
                  "mahalanobis_sq: dimension mismatch");
  const Vector diff = x - mu;
  // Clamp tiny negative values produced by rounding on near-singular inputs.
  return std::max(0.0, diff.dot(a_inv * diff));
}

/// In-place WRLS correlation step: C <- C - w C x x'C / (1 + w x'Cx).
/// Equivalent to (C^{-1} + w x x')^{-1}.
inline void rank_one_increment_inplace(Matrix& c, const Vector& x, double w) {
  if (w == 0.0) return;
  const Vector cx = c * x;
  const double denom = 1.0 + w * x.dot(cx);
  c.noalias() -= (w / denom) * cx * cx.transpose();
  detail::symmetrize(c);
}

inline Matrix rank_one_increment(Matrix c, const Vector& x, double w) {
  detail::require(c.rows() == x.size() && c.cols() == x.size(),
                  "rank_one_increment: dimension mismatch");
  rank_one_increment_inplace(c, x, w);
  return c;
}

struct DowndateResult {
  Matrix c;
  bool applied = true;
  double denominator = 1.0;
};

/// Exact inverse of rank_one_increment: C + w C x x'C / (1 - w x'Cx), which
/// is (C^{-1} - w x x')^{-1}. When |1 - w x'Cx| < kDowndateGuard the removal
/// would be numerically meaningless; C is returned untouched and `applied`
/// is false.
inline bool sherman_morrison_downdate_inplace(Matrix& c, const Vector& x,
                                              double w,
                                              double* denominator = nullptr) {
  if (w == 0.0) {
    if (denominator) *denominator = 1.0;
    return true;
  }
  const Vector cx = c * x;
  const double denom = 1.0 - w * x.dot(cx);
  if (denominator) *denominator = denom;
  if (std::abs(denom) < kDowndateGuard) return false;
  c.noalias() += (w / denom) * cx * cx.transpose();
  detail::symmetrize(c);
  return true;
}

inline DowndateResult sherman_morrison_downdate(Matrix c, const Vector& x,
                                                double w) {
  detail::require(c.rows() == x.size() && c.cols() == x.size(),
                  "sherman_morrison_downdate: dimension mismatch");
  DowndateResult out;
  out.applied = sherman_morrison_downdate_inplace(c, x, w, &out.denominator);
  out.c = std::move(c);
  return out;
}

/// Ridge used before inverting a covariance: 1e-6 * trace(A) / d, floored.
inline double pd_ridge(const Matrix& a) {
  const double d = static_cast<double>(a.rows());
  return std::max(kRidgeScale * a.trace() / d, kRidgeFloor);
}

/// Inverse of A + pd_ridge(A) I.
inline Matrix regularized_inverse(const Matrix& a) {
  detail::require(a.rows() == a.cols(), "regularized_inverse: not square");
  Matrix reg = a;
  reg.diagonal().array() += pd_ridge(a);
  Eigen::LDLT<Matrix> ldlt(reg);
  Matrix inv = ldlt.solve(Matrix::Identity(a.rows(), a.cols()));
  detail::symmetrize(inv);
  return inv;
}

/// Radius of the unit Mahalanobis ellipsoid {z : (z-mu)A^{-1}(z-mu)' = 1}
/// along the unit direction u, given A^{-1}.
inline double ellipsoid_radius_along_inv(const Matrix& a_inv, const Vector& u) {
  const double q = u.dot(a_inv * u);
  detail::require(q > 0.0 && std::isfinite(q),
                  "ellipsoid_radius_along: inverse not positive definite");
  return 1.0 / std::sqrt(q);
}

/// Same as ellipsoid_radius_along_inv but from A itself; A must be SPD and u
/// must have unit norm.
inline double ellipsoid_radius_along(const Matrix& a, const Vector& u) {
  detail::require(a.rows() == a.cols() && a.rows() == u.size(),
                  "ellipsoid_radius_along: dimension mismatch");
  detail::require(std::abs(u.norm() - 1.0) < 1e-9,
                  "ellipsoid_radius_along: direction is not a unit vector");
  Eigen::LLT<Matrix> llt(a);
  detail::require(llt.info() == Eigen::Success,
                  "ellipsoid_radius_along: matrix is not positive definite");
  const Vector w = llt.matrixL().solve(u);
  return 1.0 / w.norm();
}

}  // namespace parafis
