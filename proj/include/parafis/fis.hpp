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

// First-order Takagi-Sugeno inference: elliptical premises with Cauchy
// membership, MIMO linear conclusions learned by weighted RLS.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "parafis/numerics.hpp"

namespace parafis {

/// tmax value meaning "never cap the fading factor".
inline constexpr std::size_t kNoForgetting =
    std::numeric_limits<std::size_t>::max();

/// Correlation-matrix initial scale.
inline constexpr double kDefaultOmega = 100.0;

enum class WeightMode { normalized, raw };

struct Premise {
  Vector mu;
  Matrix cov;
  Matrix cov_inv;  // inverse of cov + pd_ridge(cov) I
  std::size_t k = 1;
  std::size_t tmax = kNoForgetting;

  std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }
};

/// Rule conclusion. `pi` is (d+1) x c with row 0 holding the biases.
struct Consequent {
  Matrix pi;
  Matrix corr;
  double omega = kDefaultOmega;
};

inline const Consequent& consequent_of(const Consequent& c) { return c; }
inline Consequent& consequent_of(Consequent& c) { return c; }

template <class Conclusion>
struct BasicRule {
  std::uint64_t id = 0;
  Premise premise;
  Conclusion conclusion;
};

/// A rule base. `Conclusion` is either a bare Consequent or one wrapped
/// with a forgetting window; both expose `consequent_of()`.
template <class Conclusion>
struct BasicFuzzySystem {
  std::vector<BasicRule<Conclusion>> rules;
  std::size_t dim = 0;
  std::size_t classes = 0;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

using Rule = BasicRule<Consequent>;
using FuzzySystem = BasicFuzzySystem<Consequent>;

/// (1, x_1, ..., x_d)
inline Vector augment(const Vector& x) {
  Vector out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

inline Vector one_hot(std::size_t label, std::size_t classes) {
  detail::require(label < classes, "one_hot: label out of range");
  Vector y = Vector::Zero(static_cast<Eigen::Index>(classes));
  y(static_cast<Eigen::Index>(label)) = 1.0;
  return y;
}

inline Premise make_premise(const Vector& x, double sigma_init,
                            std::size_t tmax = kNoForgetting) {
  Premise p;
  p.mu = x;
  p.cov = Matrix::Identity(x.size(), x.size()) * (sigma_init * sigma_init);
  p.cov_inv = regularized_inverse(p.cov);
  p.k = 1;
  p.tmax = tmax;
  return p;
}

inline Consequent make_consequent(std::size_t dim, std::size_t classes,
                                  double omega = kDefaultOmega) {
  const auto n = static_cast<Eigen::Index>(dim + 1);
  Consequent c;
  c.pi = Matrix::Zero(n, static_cast<Eigen::Index>(classes));
  c.corr = Matrix::Identity(n, n) * omega;
  c.omega = omega;
  return c;
}

/// A fresh rule centred on x: A = sigma_init^2 I, Pi = 0, C = omega I.
inline Rule create_rule(std::uint64_t id, const Vector& x, std::size_t classes,
                        double sigma_init, double omega = kDefaultOmega,
                        std::size_t tmax = kNoForgetting) {
  return Rule{id, make_premise(x, sigma_init, tmax),
              make_consequent(static_cast<std::size_t>(x.size()), classes,
                              omega)};
}

/// Cauchy membership 1 / (1 + mahalanobis^2).
inline double membership(const Premise& p, const Vector& x) {
  return 1.0 / (1.0 + mahalanobis_sq(x, p.mu, p.cov_inv));
}

template <class C>
double membership(const BasicRule<C>& rule, const Vector& x) {
  return membership(rule.premise, x);
}

template <class C>
Vector raw_memberships(const BasicFuzzySystem<C>& sys, const Vector& x) {
  Vector beta(static_cast<Eigen::Index>(sys.size()));
  for (std::size_t i = 0; i < sys.size(); ++i)
    beta(static_cast<Eigen::Index>(i)) = membership(sys.rules[i], x);
  return beta;
}

template <class C>
Vector normalized_memberships(const BasicFuzzySystem<C>& sys, const Vector& x) {
  if (sys.empty()) throw EmptySystemError();
  Vector beta = raw_memberships(sys, x);
  return beta / beta.sum();
}

/// y^j = sum_i beta_bar_i (x_aug . Pi_i^j)
template <class C>
Vector predict_scores(const BasicFuzzySystem<C>& sys, const Vector& x) {
  if (sys.empty()) throw EmptySystemError();
  const Vector weights = normalized_memberships(sys, x);
  const Vector xa = augment(x);
  Vector scores = Vector::Zero(static_cast<Eigen::Index>(sys.classes));
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Consequent& c = consequent_of(sys.rules[i].conclusion);
    scores.noalias() +=
        weights(static_cast<Eigen::Index>(i)) * (c.pi.transpose() * xa);
  }
  return scores;
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax_lowest(const Vector& v) {
  std::size_t best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j)
    if (v(j) > v(static_cast<Eigen::Index>(best)))
      best = static_cast<std::size_t>(j);
  return best;
}

template <class C>
std::size_t predict_class(const BasicFuzzySystem<C>& sys, const Vector& x) {
  return argmax_lowest(predict_scores(sys, x));
}

/// Index of the rule with the highest membership (lowest index on ties).
template <class C>
std::size_t most_activated(const BasicFuzzySystem<C>& sys, const Vector& x) {
  if (sys.empty()) throw EmptySystemError();
  return argmax_lowest(raw_memberships(sys, x));
}

/// Fading-factor update of centre and covariance with
/// alpha = 1 / min(k, tmax), using the updated centre in the outer product.
inline void update_premise(Premise& p, const Vector& x) {
  detail::require(x.size() == p.mu.size(), "update_premise: dimension mismatch");
  ++p.k;
  const double alpha = 1.0 / static_cast<double>(std::min(p.k, p.tmax));
  p.mu = (1.0 - alpha) * p.mu + alpha * x;
  const Vector diff = x - p.mu;
  p.cov = (1.0 - alpha) * p.cov + alpha * (diff * diff.transpose());
  p.cov_inv = regularized_inverse(p.cov);
}

/// Weighted RLS step on all class columns at once. The gain uses the
/// correlation matrix after its own update.
inline void wrls_update(Consequent& c, const Vector& x_aug, double weight,
                        const Vector& target) {
  detail::require(x_aug.size() == c.corr.rows() && target.size() == c.pi.cols(),
                  "wrls_update: dimension mismatch");
  if (weight == 0.0) return;
  rank_one_increment_inplace(c.corr, x_aug, weight);
  const Vector gain = weight * (c.corr * x_aug);
  const Vector residual = target - c.pi.transpose() * x_aug;
  c.pi.noalias() += gain * residual.transpose();
}

/// Plain evolving TS classifier: per-class rule seeding, winner-only premise
/// adaptation, WRLS on every conclusion. Serves as the no-anticipation
/// baseline.
struct BaselineParams {
  double sigma_init = 1.0;
  double omega = kDefaultOmega;
  WeightMode weight_mode = WeightMode::normalized;
};

class EvolvingClassifier {
 public:
  using Params = BaselineParams;

  EvolvingClassifier(std::size_t dim, std::size_t classes, Params params = {})
      : params_(params), covered_(classes, false) {
    system_.dim = dim;
    system_.classes = classes;
  }

  /// Test-then-train on one sample; returns the prediction made before
  /// learning (the label itself for the very first sample).
  std::size_t learn(const Vector& x, std::size_t y) {
    check(x, y);
    const std::size_t pred = system_.empty() ? y : predict_class(system_, x);
    if (!covered_[y]) {
      covered_[y] = true;
      system_.rules.push_back(create_rule(next_id_++, x, system_.classes,
                                          params_.sigma_init, params_.omega));
    } else {
      update_premise(system_.rules[most_activated(system_, x)].premise, x);
    }
    const Vector weights = params_.weight_mode == WeightMode::normalized
                               ? normalized_memberships(system_, x)
                               : raw_memberships(system_, x);
    const Vector xa = augment(x);
    const Vector target = one_hot(y, system_.classes);
    for (std::size_t i = 0; i < system_.size(); ++i)
      wrls_update(system_.rules[i].conclusion, xa,
                  weights(static_cast<Eigen::Index>(i)), target);
    return pred;
  }

  std::size_t predict(const Vector& x) const { return predict_class(system_, x); }

  const FuzzySystem& system() const { return system_; }
  std::size_t rule_count() const { return system_.size(); }

 private:
  void check(const Vector& x, std::size_t y) const {
    detail::require(static_cast<std::size_t>(x.size()) == system_.dim,
                    "learn: dimension mismatch");
    detail::require(y < system_.classes, "learn: label out of range");
  }

  Params params_;
  FuzzySystem system_;
  std::vector<bool> covered_;
  std::uint64_t next_id_ = 0;
};

}  // namespace parafis
