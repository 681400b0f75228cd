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

// Anticipation module and drift handling.
//
// Every principal rule i owns an anticipated system S_i in which the rule is
// split into a slow sub-rule (tmax1) and a fast sub-rule (tmax2). Only the
// S_i of the most activated rule learns on a given sample. When the two
// sub-rule clusters become separable the principal rule is replaced by the
// pair, and depending on the strategy the other rules' conclusions are
// refreshed from their own slow sub-rules.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "parafis/fis.hpp"
#include "parafis/forgetting.hpp"

namespace parafis {

enum class Strategy { naive, global };
enum class ForgettingMode { none, forget_ps, forget_am };
enum class SubRuleInit { parent, zero };

inline std::string_view to_string(Strategy s) {
  return s == Strategy::naive ? "naive" : "global";
}

inline std::string_view to_string(ForgettingMode m) {
  switch (m) {
    case ForgettingMode::none: return "none";
    case ForgettingMode::forget_ps: return "forget_ps";
    case ForgettingMode::forget_am: return "forget_am";
  }
  return "none";
}

inline std::string_view to_string(WeightMode m) {
  return m == WeightMode::normalized ? "normalized" : "raw";
}

inline std::string_view to_string(SubRuleInit m) {
  return m == SubRuleInit::parent ? "parent" : "zero";
}

struct LearnerParams {
  std::size_t tmax1 = 200;
  std::size_t tmax2 = 10;
  double ks = 0.5;  // +inf disables detection
  std::size_t nmin = 20;
  std::size_t ws = 50;
  double omega = kDefaultOmega;
  double sigma_init = 1.0;
  Strategy strategy = Strategy::global;
  ForgettingMode forgetting = ForgettingMode::forget_am;
  WeightMode weight_mode = WeightMode::normalized;
  SubRuleInit subrule_init = SubRuleInit::parent;

  void validate() const {
    detail::require(tmax2 >= 1 && tmax1 > tmax2, "params: need tmax1 > tmax2 >= 1");
    detail::require(ks > 0.0 && !std::isnan(ks), "params: ks must be positive");
    detail::require(ws >= 1, "params: ws must be >= 1");
    detail::require(omega > 0.0, "params: omega must be positive");
    detail::require(sigma_init > 0.0, "params: sigma_init must be positive");
  }
};

using PrincipalRule = BasicRule<DDFConsequent>;
using PrincipalSystem = BasicFuzzySystem<DDFConsequent>;

struct SubRule {
  Premise premise;
  DDFConsequent conclusion;
  std::size_t samples_seen = 0;
};

struct AnticipatedSystem {
  std::uint64_t parent_rule_id = 0;
  SubRule slow;  // tmax1
  SubRule fast;  // tmax2
};

struct DriftEvent {
  std::uint64_t rule_id = 0;
  std::size_t sample_index = 0;
  Strategy strategy = Strategy::naive;
  double separation = 0.0;
};

struct Separability {
  bool fired = false;
  /// ||mu_slow - mu_fast|| / (sigma_slow + sigma_fast); fires when > ks.
  double separation = 0.0;
};

/// Separation of the two sub-rule clusters relative to their ellipsoid radii
/// along the centre-to-centre axis, plus the minimum-sample condition on
/// both sub-rules.
inline Separability check_separability(const AnticipatedSystem& am, double ks,
                                       std::size_t nmin) {
  const Vector diff = am.fast.premise.mu - am.slow.premise.mu;
  const double dist = diff.norm();
  if (dist == 0.0) return {false, 0.0};
  const Vector u = diff / dist;
  const double sigma_slow = ellipsoid_radius_along_inv(am.slow.premise.cov_inv, u);
  const double sigma_fast = ellipsoid_radius_along_inv(am.fast.premise.cov_inv, u);
  Separability out;
  out.separation = dist / (sigma_slow + sigma_fast);
  out.fired = out.separation > ks && am.slow.samples_seen > nmin &&
              am.fast.samples_seen > nmin;
  return out;
}

namespace detail {

inline SubRule spawn_subrule(const PrincipalRule& rule, std::size_t tmax,
                             const LearnerParams& params) {
  SubRule s;
  s.premise = rule.premise;
  s.premise.tmax = tmax;
  s.premise.k = std::min(rule.premise.k, tmax);
  const Consequent& parent = rule.conclusion.consequent;
  Consequent c = params.subrule_init == SubRuleInit::parent
                     ? parent
                     : make_consequent(static_cast<std::size_t>(parent.pi.rows() - 1),
                                       static_cast<std::size_t>(parent.pi.cols()),
                                       parent.omega);
  s.conclusion = make_ddf_consequent(std::move(c), params.ws);
  return s;
}

}  // namespace detail

/// Both sub-rules start as copies of the parent premise (k capped at their
/// tmax) and of its conclusion, with empty windows.
inline AnticipatedSystem spawn_anticipated(const PrincipalRule& rule,
                                           const LearnerParams& params) {
  return AnticipatedSystem{rule.id,
                           detail::spawn_subrule(rule, params.tmax1, params),
                           detail::spawn_subrule(rule, params.tmax2, params)};
}

/// Complete mutable state of a learner; exposed for snapshots and tests.
struct LearnerState {
  PrincipalSystem principal;
  std::vector<AnticipatedSystem> anticipations;
  std::vector<bool> covered;  // classes that already seeded a rule
  std::vector<DriftEvent> drift_log;
  std::uint64_t next_id = 0;
  std::size_t samples = 0;
};

class ParaFISLearner {
 public:
  ParaFISLearner(std::size_t dim, std::size_t classes, LearnerParams params = {})
      : params_(params) {
    params_.validate();
    detail::require(dim >= 1 && classes >= 1, "learner: empty dimension or class set");
    state_.principal.dim = dim;
    state_.principal.classes = classes;
    state_.covered.assign(classes, false);
  }

  ParaFISLearner(LearnerParams params, LearnerState state)
      : params_(params), state_(std::move(state)) {
    params_.validate();
    detail::require(state_.anticipations.size() == state_.principal.size(),
                    "learner: anticipations out of sync with rules");
  }

  /// Test-then-train on one labelled sample. Returns the class predicted
  /// before learning; for the very first sample that is the label itself.
  std::size_t learn(const Vector& x, std::size_t y) {
    auto& sys = state_.principal;
    detail::require(static_cast<std::size_t>(x.size()) == sys.dim,
                    "learn: dimension mismatch");
    detail::require(y < sys.classes, "learn: label out of range");

    const std::size_t pred = sys.empty() ? y : predict_class(sys, x);
    const std::size_t index = state_.samples++;
    const Vector xa = augment(x);
    const Vector target = one_hot(y, sys.classes);

    if (!state_.covered[y]) {
      state_.covered[y] = true;
      PrincipalRule rule;
      rule.id = state_.next_id++;
      rule.premise = make_premise(x, params_.sigma_init);
      rule.conclusion =
          make_ddf_consequent(make_consequent(sys.dim, sys.classes, params_.omega),
                              params_.ws);
      sys.rules.push_back(std::move(rule));
      update_principal_conclusions(x, xa, target);
      state_.anticipations.push_back(spawn_anticipated(sys.rules.back(), params_));
      return pred;
    }

    const std::size_t winner = most_activated(sys, x);
    update_premise(sys.rules[winner].premise, x);
    update_principal_conclusions(x, xa, target);
    update_anticipation(winner, x, xa, target);

    const Separability sep =
        check_separability(state_.anticipations[winner], params_.ks, params_.nmin);
    if (sep.fired) {
      state_.drift_log.push_back(
          {sys.rules[winner].id, index, params_.strategy, sep.separation});
      if (params_.strategy == Strategy::naive)
        replace_naive(winner);
      else
        replace_global(winner);
    }
    return pred;
  }

  std::size_t predict(const Vector& x) const {
    return predict_class(state_.principal, x);
  }

  /// Rule i is replaced in place by its slow sub-rule, and its fast sub-rule
  /// is inserted right after it. Other rules and their anticipations are
  /// left untouched.
  void replace_naive(std::size_t i) {
    split_rule(i);
    auto& ams = state_.anticipations;
    ams[i] = spawn_anticipated(state_.principal.rules[i], params_);
    ams.insert(ams.begin() + static_cast<std::ptrdiff_t>(i) + 1,
               spawn_anticipated(state_.principal.rules[i + 1], params_));
  }

  /// As replace_naive, and every other rule's conclusion (with its window)
  /// is replaced by the one of its own slow sub-rule. All anticipated systems
  /// are re-spawned afterwards.
  void replace_global(std::size_t i) {
    auto& rules = state_.principal.rules;
    for (std::size_t j = 0; j < rules.size(); ++j)
      if (j != i)
        window_transfer(state_.anticipations[j].slow.conclusion, rules[j].conclusion);
    split_rule(i);
    state_.anticipations.clear();
    for (const auto& rule : rules)
      state_.anticipations.push_back(spawn_anticipated(rule, params_));
  }

  const PrincipalSystem& principal() const { return state_.principal; }
  const std::vector<AnticipatedSystem>& anticipations() const {
    return state_.anticipations;
  }
  const std::vector<DriftEvent>& drift_log() const { return state_.drift_log; }
  const LearnerParams& params() const { return params_; }
  const LearnerState& state() const { return state_; }
  std::size_t rule_count() const { return state_.principal.size(); }
  std::size_t samples_learned() const { return state_.samples; }

 private:
  Vector weights_for(const Vector& beta) const {
    return params_.weight_mode == WeightMode::normalized ? Vector(beta / beta.sum())
                                                         : beta;
  }

  void update_principal_conclusions(const Vector& x, const Vector& xa,
                                    const Vector& target) {
    auto& sys = state_.principal;
    const Vector w = weights_for(raw_memberships(sys, x));
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const double wi = w(static_cast<Eigen::Index>(i));
      auto& dc = sys.rules[i].conclusion;
      if (params_.forgetting == ForgettingMode::forget_ps)
        ddf_update(dc, xa, wi, target);
      else
        wrls_update(dc.consequent, xa, wi, target);
    }
  }

  // Learns S_i on x. Weights come from the virtual system where rule i is
  // replaced by its two sub-rules and all other principal rules stay.
  void update_anticipation(std::size_t i, const Vector& x, const Vector& xa,
                           const Vector& target) {
    auto& am = state_.anticipations[i];
    update_premise(am.slow.premise, x);
    update_premise(am.fast.premise, x);

    const auto& rules = state_.principal.rules;
    const std::size_t n = rules.size();
    Vector beta(static_cast<Eigen::Index>(n + 1));
    for (std::size_t j = 0; j < n; ++j)
      beta(static_cast<Eigen::Index>(j)) =
          j == i ? membership(am.slow.premise, x) : membership(rules[j], x);
    beta(static_cast<Eigen::Index>(n)) = membership(am.fast.premise, x);
    const Vector w = weights_for(beta);

    for (auto [sub, wi] : {std::pair{&am.slow, w(static_cast<Eigen::Index>(i))},
                           std::pair{&am.fast, w(static_cast<Eigen::Index>(n))}}) {
      if (params_.forgetting == ForgettingMode::none)
        wrls_update(sub->conclusion.consequent, xa, wi, target);
      else
        ddf_update(sub->conclusion, xa, wi, target);
      ++sub->samples_seen;
    }
  }

  PrincipalRule promote(const SubRule& sub) {
    PrincipalRule rule;
    rule.id = state_.next_id++;
    rule.premise = sub.premise;
    // The sub-rule only remembers about tmax samples.
    rule.premise.k = std::min(sub.premise.k, sub.premise.tmax);
    rule.premise.tmax = kNoForgetting;
    window_transfer(sub.conclusion, rule.conclusion);
    return rule;
  }

  void split_rule(std::size_t i) {
    auto& rules = state_.principal.rules;
    const AnticipatedSystem& am = state_.anticipations[i];
    PrincipalRule slow = promote(am.slow);
    PrincipalRule fast = promote(am.fast);
    rules[i] = std::move(slow);
    rules.insert(rules.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(fast));
  }

  LearnerParams params_;
  LearnerState state_;
};

}  // namespace parafis
