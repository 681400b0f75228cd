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

// JSON model snapshots. Doubles are written in shortest round-trip form, so
// a restored learner continues bit-for-bit like the original. Layout is
// documented in docs/snapshot-format.md.

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "parafis/anticipation.hpp"

namespace parafis {

inline constexpr int kSnapshotVersion = 1;

namespace serial {

using json = nlohmann::ordered_json;

/// Finite doubles as numbers; +-inf and nan as strings.
inline json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw ParseError("bad real value '" + s + "'", 0);
}

inline json count_or_null(std::size_t v) {
  return v == kNoForgetting ? json(nullptr) : json(v);
}

inline std::size_t count_or_null(const json& j) {
  return j.is_null() ? kNoForgetting : j.get<std::size_t>();
}

inline json vec(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vec(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline json mat(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (data.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError("matrix data length does not match its shape", 0);
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

inline json premise(const Premise& p) {
  return {{"mu", vec(p.mu)},
          {"cov", mat(p.cov)},
          {"cov_inv", mat(p.cov_inv)},
          {"k", p.k},
          {"tmax", count_or_null(p.tmax)}};
}

inline Premise premise(const json& j) {
  Premise p;
  p.mu = vec(j.at("mu"));
  p.cov = mat(j.at("cov"));
  p.cov_inv = mat(j.at("cov_inv"));
  p.k = j.at("k").get<std::size_t>();
  p.tmax = count_or_null(j.at("tmax"));
  return p;
}

inline json conclusion(const DDFConsequent& dc) {
  json entries = json::array();
  for (const auto& e : dc.window.entries)
    entries.push_back({{"x_aug", vec(e.x_aug)}, {"weight", e.weight}});
  return {{"pi", mat(dc.consequent.pi)},
          {"corr", mat(dc.consequent.corr)},
          {"omega", dc.consequent.omega},
          {"window", {{"capacity", dc.window.capacity}, {"entries", std::move(entries)}}},
          {"skipped_downdates", dc.skipped_downdates}};
}

inline DDFConsequent conclusion(const json& j) {
  DDFConsequent dc;
  dc.consequent.pi = mat(j.at("pi"));
  dc.consequent.corr = mat(j.at("corr"));
  dc.consequent.omega = j.at("omega").get<double>();
  const auto& w = j.at("window");
  dc.window.capacity = w.at("capacity").get<std::size_t>();
  for (const auto& e : w.at("entries"))
    dc.window.entries.push_back({vec(e.at("x_aug")), e.at("weight").get<double>()});
  dc.skipped_downdates = j.at("skipped_downdates").get<std::size_t>();
  return dc;
}

inline json subrule(const SubRule& s) {
  return {{"premise", premise(s.premise)},
          {"conclusion", conclusion(s.conclusion)},
          {"samples_seen", s.samples_seen}};
}

inline SubRule subrule(const json& j) {
  return SubRule{premise(j.at("premise")), conclusion(j.at("conclusion")),
                 j.at("samples_seen").get<std::size_t>()};
}

template <class E>
E parse_enum(const json& j, std::initializer_list<E> options) {
  const auto s = j.get<std::string>();
  for (E e : options)
    if (to_string(e) == s) return e;
  throw ParseError("unknown enum value '" + s + "'", 0);
}

inline json event(const DriftEvent& e) {
  return {{"sample_index", e.sample_index},
          {"rule_id", e.rule_id},
          {"separation", real(e.separation)},
          {"strategy", to_string(e.strategy)}};
}

inline DriftEvent event(const json& j) {
  return DriftEvent{j.at("rule_id").get<std::uint64_t>(),
                    j.at("sample_index").get<std::size_t>(),
                    parse_enum(j.at("strategy"), {Strategy::naive, Strategy::global}),
                    real(j.at("separation"))};
}

}  // namespace serial

inline nlohmann::ordered_json params_to_json(const LearnerParams& p) {
  using serial::real;
  return {{"tmax1", p.tmax1},
          {"tmax2", p.tmax2},
          {"ks", real(p.ks)},
          {"nmin", p.nmin},
          {"ws", p.ws},
          {"omega", real(p.omega)},
          {"sigma_init", real(p.sigma_init)},
          {"strategy", to_string(p.strategy)},
          {"forgetting_mode", to_string(p.forgetting)},
          {"wrls_weight", to_string(p.weight_mode)},
          {"subrule_init", to_string(p.subrule_init)}};
}

inline LearnerParams params_from_json(const nlohmann::ordered_json& j) {
  using serial::parse_enum;
  using serial::real;
  LearnerParams p;
  p.tmax1 = j.at("tmax1").get<std::size_t>();
  p.tmax2 = j.at("tmax2").get<std::size_t>();
  p.ks = real(j.at("ks"));
  p.nmin = j.at("nmin").get<std::size_t>();
  p.ws = j.at("ws").get<std::size_t>();
  p.omega = real(j.at("omega"));
  p.sigma_init = real(j.at("sigma_init"));
  p.strategy = parse_enum(j.at("strategy"), {Strategy::naive, Strategy::global});
  p.forgetting = parse_enum(j.at("forgetting_mode"),
                            {ForgettingMode::none, ForgettingMode::forget_ps,
                             ForgettingMode::forget_am});
  p.weight_mode =
      parse_enum(j.at("wrls_weight"), {WeightMode::normalized, WeightMode::raw});
  p.subrule_init =
      parse_enum(j.at("subrule_init"), {SubRuleInit::parent, SubRuleInit::zero});
  return p;
}

inline nlohmann::ordered_json snapshot(const ParaFISLearner& learner) {
  using namespace serial;
  const LearnerState& s = learner.state();
  json rules = json::array();
  for (const auto& r : s.principal.rules)
    rules.push_back({{"id", r.id},
                     {"premise", premise(r.premise)},
                     {"conclusion", conclusion(r.conclusion)}});
  json ams = json::array();
  for (const auto& am : s.anticipations)
    ams.push_back({{"parent_rule_id", am.parent_rule_id},
                   {"slow", subrule(am.slow)},
                   {"fast", subrule(am.fast)}});
  json covered = json::array();
  for (bool c : s.covered) covered.push_back(c);
  json log = json::array();
  for (const auto& e : s.drift_log) log.push_back(event(e));
  return {{"format", "parafis-snapshot"},
          {"version", kSnapshotVersion},
          {"params", params_to_json(learner.params())},
          {"dim", s.principal.dim},
          {"classes", s.principal.classes},
          {"samples", s.samples},
          {"next_id", s.next_id},
          {"covered", std::move(covered)},
          {"rules", std::move(rules)},
          {"anticipations", std::move(ams)},
          {"drift_log", std::move(log)}};
}

inline ParaFISLearner restore(const nlohmann::ordered_json& j) {
  using namespace serial;
  if (j.value("format", "") != "parafis-snapshot")
    throw ParseError("not a parafis snapshot", 0);
  if (j.at("version").get<int>() != kSnapshotVersion)
    throw ParseError("unsupported snapshot version", 0);
  LearnerState s;
  s.principal.dim = j.at("dim").get<std::size_t>();
  s.principal.classes = j.at("classes").get<std::size_t>();
  s.samples = j.at("samples").get<std::size_t>();
  s.next_id = j.at("next_id").get<std::uint64_t>();
  for (const auto& c : j.at("covered")) s.covered.push_back(c.get<bool>());
  for (const auto& r : j.at("rules"))
    s.principal.rules.push_back(PrincipalRule{r.at("id").get<std::uint64_t>(),
                                              premise(r.at("premise")),
                                              conclusion(r.at("conclusion"))});
  for (const auto& a : j.at("anticipations"))
    s.anticipations.push_back(AnticipatedSystem{
        a.at("parent_rule_id").get<std::uint64_t>(), subrule(a.at("slow")),
        subrule(a.at("fast"))});
  for (const auto& e : j.at("drift_log")) s.drift_log.push_back(event(e));
  return ParaFISLearner(params_from_json(j.at("params")), std::move(s));
}

inline void save_snapshot(const ParaFISLearner& learner, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << snapshot(learner).dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline ParaFISLearner load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return restore(nlohmann::ordered_json::parse(in));
}

}  // namespace parafis
