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

// Experiment configuration: flat `key = value` files, command-line overrides
// using the same keys, and a JSON form embedded in every results file.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "parafis/anticipation.hpp"
#include "parafis/eval.hpp"
#include "parafis/snapshot.hpp"
#include "parafis/streams.hpp"

namespace parafis {

enum class LearnerKind { parafis, baseline };

inline std::string_view to_string(LearnerKind k) {
  return k == LearnerKind::parafis ? "parafis" : "baseline";
}

struct ExperimentConfig {
  StreamSpec stream;
  LearnerParams learner;
  LearnerKind kind = LearnerKind::parafis;
  bool standardize = true;
  std::string output;  // results file; empty picks a name in the output dir
};

/// Every key accepted in config files and as `--key value` on the CLI.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "generator", "path",  "length",          "dim",  "classes",
      "trs",       "tes",   "noise",           "drift_positions",
      "drift_magnitude",    "seed",            "learner",
      "tmax1",     "tmax2", "ks",              "nmin", "ws",
      "omega",     "sigma_init",      "strategy",        "forgetting_mode",
      "wrls_weight",        "subrule_init",    "standardize", "output"};
  return keys;
}

namespace detail {

inline std::size_t parse_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(v) + "'");
  return out;
}

inline double parse_real(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) +
                      "'");
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) +
                    "'");
}

template <class E>
E parse_choice(std::string_view key, std::string_view v, std::initializer_list<E> options) {
  std::string allowed;
  for (E e : options) {
    if (to_string(e) == v) return e;
    allowed += (allowed.empty() ? "" : "|") + std::string(to_string(e));
  }
  throw ConfigError(std::string(key) + ": expected " + allowed + ", got '" +
                    std::string(v) + "'");
}

}  // namespace detail

/// Comma-separated list of non-negative integers.
inline std::vector<std::size_t> parse_count_list(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  for (auto cell : detail::split(v))
    if (!cell.empty()) out.push_back(detail::parse_count(key, cell));
  return out;
}

inline std::vector<double> parse_real_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto cell : detail::split(v))
    if (!cell.empty()) out.push_back(detail::parse_real(key, cell));
  return out;
}

inline void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  using namespace detail;
  const std::string_view v = trim(raw);
  auto& s = c.stream;
  auto& p = c.learner;
  if (key == "generator") s.generator = v;
  else if (key == "path") s.path = v;
  else if (key == "length") s.length = parse_count(key, v);
  else if (key == "dim") s.dim = parse_count(key, v);
  else if (key == "classes") s.classes = parse_count(key, v);
  else if (key == "trs") s.trs = parse_count(key, v);
  else if (key == "tes") s.tes = parse_count(key, v);
  else if (key == "noise") s.noise = parse_real(key, v);
  else if (key == "drift_positions") s.drift_positions = parse_count_list(key, v);
  else if (key == "drift_magnitude") s.drift_magnitude = parse_real(key, v);
  else if (key == "seed") s.seed = parse_count(key, v);
  else if (key == "learner")
    c.kind = parse_choice(key, v, {LearnerKind::parafis, LearnerKind::baseline});
  else if (key == "tmax1") p.tmax1 = parse_count(key, v);
  else if (key == "tmax2") p.tmax2 = parse_count(key, v);
  else if (key == "ks") p.ks = parse_real(key, v);
  else if (key == "nmin") p.nmin = parse_count(key, v);
  else if (key == "ws") p.ws = parse_count(key, v);
  else if (key == "omega") p.omega = parse_real(key, v);
  else if (key == "sigma_init") p.sigma_init = parse_real(key, v);
  else if (key == "strategy")
    p.strategy = parse_choice(key, v, {Strategy::naive, Strategy::global});
  else if (key == "forgetting_mode")
    p.forgetting = parse_choice(key, v, {ForgettingMode::none, ForgettingMode::forget_ps,
                                         ForgettingMode::forget_am});
  else if (key == "wrls_weight")
    p.weight_mode = parse_choice(key, v, {WeightMode::normalized, WeightMode::raw});
  else if (key == "subrule_init")
    p.subrule_init = parse_choice(key, v, {SubRuleInit::parent, SubRuleInit::zero});
  else if (key == "standardize") c.standardize = parse_bool(key, v);
  else if (key == "output") c.output = v;
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

/// Lines of `key = value`; '#' starts a comment.
inline void apply_config_text(ExperimentConfig& c, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(c, detail::trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  ExperimentConfig c;
  apply_config_text(c, in);
  return c;
}

inline void validate(const ExperimentConfig& c) {
  if (c.stream.generator.empty()) throw ConfigError("no stream generator configured");
  resolve(c.stream);
  try {
    c.learner.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  return {{"stream", spec_to_json(resolve(c.stream))},
          {"learner_kind", to_string(c.kind)},
          {"learner", params_to_json(c.learner)},
          {"standardize", c.standardize},
          {"output", c.output}};
}

inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig c;
  c.stream = spec_from_json(j.at("stream"));
  c.kind = detail::parse_choice("learner_kind", j.at("learner_kind").get<std::string>(),
                                {LearnerKind::parafis, LearnerKind::baseline});
  c.learner = params_from_json(j.at("learner"));
  c.standardize = j.at("standardize").get<bool>();
  c.output = j.value("output", "");
  return c;
}

/// Flat text form, loadable by load_config.
inline std::string config_to_text(const ExperimentConfig& c) {
  const auto j = config_to_json(c);
  std::ostringstream os;
  os.precision(17);
  const auto& s = j.at("stream");
  for (const auto& [k, v] : s.items()) {
    if (v.is_array()) {
      os << k << " = ";
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].dump();
      os << '\n';
    } else if (v.is_string()) {
      if (!v.get<std::string>().empty()) os << k << " = " << v.get<std::string>() << '\n';
    } else {
      os << k << " = " << v.dump() << '\n';
    }
  }
  os << "learner = " << to_string(c.kind) << '\n';
  for (const auto& [k, v] : j.at("learner").items())
    os << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  os << "standardize = " << (c.standardize ? "true" : "false") << '\n';
  if (!c.output.empty()) os << "output = " << c.output << '\n';
  return os.str();
}

/// Runs one experiment cell: generate the stream, then periodic hold-out.
inline HoldoutResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  const StreamSpec spec = resolve(c.stream);
  const Stream stream = generate(spec);
  const std::size_t trs = spec.trs, tes = spec.tes;
  if (trs == 0 || tes == 0) throw ConfigError("trs and tes must be set");
  const HoldoutOptions opts{c.standardize};
  if (c.kind == LearnerKind::baseline) {
    const EvolvingClassifier::Params bp{c.learner.sigma_init, c.learner.omega,
                                        c.learner.weight_mode};
    return periodic_holdout(
        [&](std::size_t d, std::size_t k) { return EvolvingClassifier(d, k, bp); }, stream,
        trs, tes, opts);
  }
  return periodic_holdout(
      [&](std::size_t d, std::size_t k) { return ParaFISLearner(d, k, c.learner); }, stream,
      trs, tes, opts);
}

}  // namespace parafis
