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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "parafis/forgetting.hpp"

namespace parafis {
namespace {

struct Step {
  Vector xa;
  double w;
  Vector y;
};

std::vector<Step> random_steps(std::mt19937_64& rng, std::size_t d, std::size_t classes,
                               std::size_t n) {
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> label(0, classes - 1);
  std::vector<Step> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({augment(oracle::random_vector(rng, static_cast<Eigen::Index>(d))),
                   weight(rng), one_hot(label(rng), classes)});
  return out;
}

TEST(DdfUpdate, UnitWindowKeepsOnlyLastPoint) {
  std::mt19937_64 rng(1);
  DDFConsequent dc = make_ddf_consequent(make_consequent(2, 2), 1);
  const auto steps = random_steps(rng, 2, 2, 2);
  for (const auto& s : steps) ddf_update(dc, s.xa, s.w, s.y);
  ASSERT_EQ(dc.window.size(), 1u);
  const Matrix expected = oracle::information({{steps[1].xa, steps[1].w, steps[1].y}}, 3, 100.0);
  EXPECT_LT((dc.consequent.corr.inverse() - expected).norm(), 1e-8);
}

TEST(DdfUpdate, LargeWindowEqualsPlainWrls) {
  std::mt19937_64 rng(2);
  DDFConsequent dc = make_ddf_consequent(make_consequent(3, 2), 1000);
  Consequent plain = make_consequent(3, 2);
  for (const auto& s : random_steps(rng, 3, 2, 200)) {
    ddf_update(dc, s.xa, s.w, s.y);
    wrls_update(plain, s.xa, s.w, s.y);
  }
  EXPECT_EQ(dc.consequent.pi, plain.pi);
  EXPECT_EQ(dc.consequent.corr, plain.corr);
}

TEST(DdfUpdate, MemorizesTheWeightUsed) {
  DDFConsequent dc = make_ddf_consequent(make_consequent(1, 2), 4);
  Vector xa(2);
  xa << 1.0, 0.25;
  const double w = 0.123456789012345678;
  ddf_update(dc, xa, w, one_hot(1, 2));
  ASSERT_EQ(dc.window.size(), 1u);
  EXPECT_EQ(dc.window.entries.back().weight, w);
  EXPECT_EQ(dc.window.entries.back().x_aug, xa);
}

TEST(DdfUpdate, CoefficientsAreNeverDecremented) {
  // Pi after eviction equals Pi of a WRLS that used the windowed gains:
  // in particular it differs from a fresh fit on the window alone.
  std::mt19937_64 rng(3);
  DDFConsequent dc = make_ddf_consequent(make_consequent(2, 2), 5);
  const auto steps = random_steps(rng, 2, 2, 40);
  for (const auto& s : steps) ddf_update(dc, s.xa, s.w, s.y);
  std::vector<oracle::WeightedPoint> window;
  for (std::size_t i = steps.size() - 5; i < steps.size(); ++i)
    window.push_back({steps[i].xa, steps[i].w, steps[i].y});
  const Matrix window_fit = oracle::weighted_ridge(window, 3, 2, 100.0);
  EXPECT_GT((dc.consequent.pi - window_fit).norm(), 1e-3);
}

TEST(DdfUpdate, DisabledWindowStoresNothing) {
  DDFConsequent dc = make_ddf_consequent(make_consequent(2, 2), 0);
  std::mt19937_64 rng(4);
  for (const auto& s : random_steps(rng, 2, 2, 10)) ddf_update(dc, s.xa, s.w, s.y);
  EXPECT_TRUE(dc.window.empty());
}

TEST(WindowConsistency, HoldsAtEveryStep) {
  std::mt19937_64 rng(5);
  for (std::size_t ws : {5u, 20u, 100u}) {
    const std::size_t d = 1 + ws % 7;
    DDFConsequent dc = make_ddf_consequent(make_consequent(d, 3), ws);
    for (const auto& s : random_steps(rng, d, 3, 600)) {
      ddf_update(dc, s.xa, s.w, s.y);
      ASSERT_LE(dc.window.size(), ws);
      ASSERT_LT(window_residual(dc).norm(), 1e-6);
      ASSERT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(dc.consequent.corr)
                    .eigenvalues()
                    .minCoeff(),
                0.0);
    }
    EXPECT_EQ(dc.skipped_downdates, 0u);
  }
}

TEST(WindowConsistency, EvictingEverythingRestoresOmegaIdentity) {
  std::mt19937_64 rng(6);
  DDFConsequent dc = make_ddf_consequent(make_consequent(4, 2), 20);
  for (const auto& s : random_steps(rng, 4, 2, 300)) ddf_update(dc, s.xa, s.w, s.y);
  Matrix c = dc.consequent.corr;
  for (const auto& e : dc.window.entries)
    ASSERT_TRUE(sherman_morrison_downdate_inplace(c, e.x_aug, e.weight));
  EXPECT_LT((c - 100.0 * Matrix::Identity(5, 5)).norm(), 1e-6);
}

TEST(WindowTransfer, DeepCopySemantics) {
  std::mt19937_64 rng(7);
  DDFConsequent src = make_ddf_consequent(make_consequent(2, 2), 10);
  const auto steps = random_steps(rng, 2, 2, 30);
  for (std::size_t i = 0; i < 20; ++i) ddf_update(src, steps[i].xa, steps[i].w, steps[i].y);

  DDFConsequent dst = make_ddf_consequent(make_consequent(2, 2), 3);
  window_transfer(src, dst);
  EXPECT_LT(window_residual(dst).norm(), 1e-6);

  DDFConsequent src_copy = src;
  ddf_update(dst, steps[20].xa, steps[20].w, steps[20].y);
  ddf_update(src_copy, steps[20].xa, steps[20].w, steps[20].y);
  EXPECT_EQ(dst.consequent.pi, src_copy.consequent.pi);
  EXPECT_EQ(dst.consequent.corr, src_copy.consequent.corr);

  // Mutating the source afterwards leaves the destination alone.
  const Matrix dst_pi = dst.consequent.pi;
  for (std::size_t i = 21; i < 30; ++i) ddf_update(src, steps[i].xa, steps[i].w, steps[i].y);
  EXPECT_EQ(dst.consequent.pi, dst_pi);
  EXPECT_EQ(dst.window.size(), 10u);
}

TEST(WindowTransfer, EmptySourceWindow) {
  const DDFConsequent src = make_ddf_consequent(make_consequent(2, 2), 10);
  DDFConsequent dst = make_ddf_consequent(make_consequent(2, 2), 10);
  std::mt19937_64 rng(8);
  for (const auto& s : random_steps(rng, 2, 2, 5)) ddf_update(dst, s.xa, s.w, s.y);
  window_transfer(src, dst);
  EXPECT_TRUE(dst.window.empty());
  EXPECT_EQ(dst.consequent.corr, 100.0 * Matrix::Identity(3, 3));
}

}  // namespace
}  // namespace parafis
