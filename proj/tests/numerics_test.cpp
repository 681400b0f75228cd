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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "parafis/numerics.hpp"

namespace parafis {
namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(Mahalanobis, ZeroAtCentre) {
  std::mt19937_64 rng(3);
  const Matrix a = oracle::random_spd(rng, 3);
  const Vector mu = oracle::random_vector(rng, 3);
  EXPECT_EQ(mahalanobis_sq(mu, mu, a.inverse()), 0.0);
}

TEST(Mahalanobis, EuclideanWithIdentity) {
  EXPECT_DOUBLE_EQ(mahalanobis_sq(vec2(3, 4), vec2(0, 0), Matrix::Identity(2, 2)), 25.0);
}

TEST(Mahalanobis, DiagonalCovariance) {
  // 2^2/4 + 1^2/1
  EXPECT_DOUBLE_EQ(mahalanobis_sq(vec2(2, 1), vec2(0, 0), diag2(4, 1).inverse()), 2.0);
}

TEST(Mahalanobis, DimensionMismatchThrows) {
  EXPECT_THROW(mahalanobis_sq(vec2(1, 1), Vector::Zero(3), Matrix::Identity(2, 2)),
               ContractViolation);
}

TEST(Mahalanobis, RotationInvariance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 1 + trial % 8;
    const Matrix a = oracle::random_spd(rng, d);
    const Vector x = oracle::random_vector(rng, d, 2.0);
    const Vector mu = oracle::random_vector(rng, d, 2.0);
    const Matrix q = oracle::random_rotation(rng, d);
    const double base = mahalanobis_sq(x, mu, a.inverse());
    const Matrix ar = q * a * q.transpose();
    const double rotated = mahalanobis_sq(q * x, q * mu, ar.inverse());
    EXPECT_NEAR(base, rotated, 1e-9 * std::max(1.0, base));
  }
}

TEST(ShermanMorrison, ZeroWeightIsIdentity) {
  std::mt19937_64 rng(5);
  const Matrix c = oracle::random_spd(rng, 4);
  const Vector x = oracle::random_vector(rng, 4);
  EXPECT_EQ(sherman_morrison_downdate(c, x, 0.0).c, c);
  EXPECT_EQ(rank_one_increment(c, x, 0.0), c);
}

TEST(ShermanMorrison, ScalarHandComputation) {
  Matrix c(1, 1);
  c << 100.0;
  const Vector x = Vector::Ones(1);
  const Matrix inc = rank_one_increment(c, x, 1.0);
  EXPECT_NEAR(inc(0, 0), 100.0 / 101.0, 1e-14);
  const auto dec = sherman_morrison_downdate(inc, x, 1.0);
  EXPECT_TRUE(dec.applied);
  EXPECT_NEAR(dec.c(0, 0), 100.0, 1e-10);
}

TEST(ShermanMorrison, OmegaIdentityRoundTrip) {
  const Matrix c = 100.0 * Matrix::Identity(2, 2);
  const Vector x = vec2(1, 0);
  const Matrix back = sherman_morrison_downdate(rank_one_increment(c, x, 1.0), x, 1.0).c;
  EXPECT_LT((back - c).norm(), 1e-10);
}

TEST(ShermanMorrison, IncrementMatchesInformationForm) {
  std::mt19937_64 rng(8);
  const Matrix c = oracle::random_spd(rng, 5);
  const Vector x = oracle::random_vector(rng, 5);
  const double w = 0.7;
  const Matrix expected = (c.inverse() + w * x * x.transpose()).inverse();
  EXPECT_LT((rank_one_increment(c, x, w) - expected).norm(), 1e-10 * expected.norm());
}

TEST(ShermanMorrison, RandomRoundTripProperty) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> weight(1e-3, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index d = 1 + trial % 10;
    const Matrix c = oracle::random_spd(rng, d);
    const Vector x = oracle::random_vector(rng, d);
    const double w = weight(rng);
    const auto back = sherman_morrison_downdate(rank_one_increment(c, x, w), x, w);
    ASSERT_TRUE(back.applied);
    EXPECT_LT((back.c - c).norm(), 1e-8);
  }
}

TEST(ShermanMorrison, NearSingularRemovalIsSkipped) {
  // 1 - w x'Cx = 0 exactly: removing x would leave a singular information matrix.
  Matrix c(1, 1);
  c << 1.0;
  const auto r = sherman_morrison_downdate(c, Vector::Ones(1), 1.0);
  EXPECT_FALSE(r.applied);
  EXPECT_EQ(r.c, c);
  EXPECT_LT(std::abs(r.denominator), kDowndateGuard);
}

TEST(EllipsoidRadius, UnitSphere) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const Vector u = oracle::random_vector(rng, 3).normalized();
    EXPECT_NEAR(ellipsoid_radius_along(Matrix::Identity(3, 3), u), 1.0, 1e-14);
  }
}

TEST(EllipsoidRadius, PrincipalAxis) {
  EXPECT_NEAR(ellipsoid_radius_along(diag2(4, 1), vec2(1, 0)), 2.0, 1e-14);
}

TEST(EllipsoidRadius, Diagonal) {
  // 1 / sqrt(0.5/4 + 0.5/1) = 2 sqrt(2/5)
  const Vector u = vec2(1, 1) / std::sqrt(2.0);
  EXPECT_NEAR(ellipsoid_radius_along(diag2(4, 1), u), 1.2649110640673518, 1e-14);
  EXPECT_NEAR(ellipsoid_radius_along_inv(diag2(0.25, 1), u), 1.2649110640673518, 1e-14);
}

TEST(EllipsoidRadius, ScalesWithSquareRoot) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 100; ++i) {
    const Matrix a = oracle::random_spd(rng, 4);
    const Vector u = oracle::random_vector(rng, 4).normalized();
    const double c = scale(rng);
    EXPECT_NEAR(ellipsoid_radius_along(c * a, u),
                std::sqrt(c) * ellipsoid_radius_along(a, u),
                1e-10 * std::sqrt(c) * ellipsoid_radius_along(a, u));
  }
}

TEST(EllipsoidRadius, RejectsNonPositiveDefinite) {
  EXPECT_THROW(ellipsoid_radius_along(diag2(1, -1), vec2(1, 0)), ContractViolation);
  EXPECT_THROW(ellipsoid_radius_along(diag2(1, 1), vec2(2, 0)), ContractViolation);
}

TEST(RegularizedInverse, InverseOfRidgedMatrix) {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_spd(rng, 6);
  const Matrix inv = regularized_inverse(a);
  const Matrix ridged = a + pd_ridge(a) * Matrix::Identity(6, 6);
  EXPECT_LT((inv * ridged - Matrix::Identity(6, 6)).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(pd_ridge(a), 1e-6 * a.trace() / 6.0);
  // A zero matrix still yields a finite inverse.
  EXPECT_TRUE(regularized_inverse(Matrix::Zero(2, 2)).allFinite());
}

}  // namespace
}  // namespace parafis
