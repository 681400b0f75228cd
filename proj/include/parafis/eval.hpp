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

// Periodic hold-out evaluation and McNemar comparison of two classifiers.

#include <chrono>
#include <cmath>
#include <concepts>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parafis/anticipation.hpp"
#include "parafis/snapshot.hpp"
#include "parafis/streams.hpp"

namespace parafis {

template <class L>
concept StreamClassifier = requires(L& l, const L& cl, const Vector& x, std::size_t y) {
  l.learn(x, y);
  { cl.predict(x) } -> std::convertible_to<std::size_t>;
};

struct HoldoutOptions {
  /// z-score features with statistics of the first training chunk.
  bool standardize = true;
};

struct HoldoutResult {
  std::vector<double> per_chunk_accuracy;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t drift_events = 0;
  std::vector<DriftEvent> drift_log;
  std::size_t rule_count = 0;
  std::size_t samples_consumed = 0;
  std::vector<std::size_t> predictions;  // test samples, in stream order
  std::vector<std::size_t> truth;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

inline Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

/// Trains on each train chunk, then scores the following test chunk without
/// learning from it. The learner persists across pairs. `make` is called
/// once as make(dim, classes).
template <class Factory>
HoldoutResult periodic_holdout(Factory&& make, const Stream& stream, std::size_t trs,
                               std::size_t tes, HoldoutOptions opts = {}) {
  const Chunking chunks = chunk(stream.samples, trs, tes);
  auto learner = make(stream.dim, stream.classes);
  static_assert(StreamClassifier<decltype(learner)>);
  const Standardizer scale = opts.standardize
                                 ? Standardizer(chunks.pairs.front().train)
                                 : Standardizer();
  HoldoutResult out;
  for (const auto& pair : chunks.pairs) {
    for (const auto& s : pair.train) learner.learn(scale(s.x), s.y);
    std::size_t correct = 0;
    for (const auto& s : pair.test) {
      const std::size_t p = learner.predict(scale(s.x));
      correct += p == s.y;
      out.predictions.push_back(p);
      out.truth.push_back(s.y);
    }
    out.per_chunk_accuracy.push_back(static_cast<double>(correct) /
                                     static_cast<double>(pair.test.size()));
    out.samples_consumed += pair.train.size() + pair.test.size();
  }
  const Summary sum = summarize(out.per_chunk_accuracy);
  out.mean = sum.mean;
  out.std = sum.std;
  if constexpr (requires { learner.drift_log(); }) {
    out.drift_log = learner.drift_log();
    out.drift_events = out.drift_log.size();
  }
  if constexpr (requires { learner.rule_count(); }) out.rule_count = learner.rule_count();
  return out;
}

// ---------------------------------------------------------------------------
// McNemar

enum class Verdict { plus, approx, minus };

struct McNemarOutcome {
  std::size_t n01 = 0;  // a wrong, b right
  std::size_t n10 = 0;  // a right, b wrong
  double k = 0.0;
  Verdict verdict = Verdict::minus;
  bool low_contingency = true;  // n01 + n10 < 25
};

inline constexpr double kMcNemarPlus = 6.63;     // 99% confidence
inline constexpr double kMcNemarApprox = 2.7;    // 90% confidence
inline constexpr std::size_t kMcNemarMinContingency = 25;

inline McNemarOutcome mcnemar_from_counts(std::size_t n10, std::size_t n01) {
  McNemarOutcome out;
  out.n10 = n10;
  out.n01 = n01;
  const std::size_t total = n10 + n01;
  if (total > 0) {
    const double diff = static_cast<double>(n10) - static_cast<double>(n01);
    out.k = diff * diff / static_cast<double>(total);
  }
  out.verdict = out.k > kMcNemarPlus       ? Verdict::plus
                : out.k >= kMcNemarApprox  ? Verdict::approx
                                           : Verdict::minus;
  out.low_contingency = total < kMcNemarMinContingency;
  return out;
}

inline McNemarOutcome mcnemar(const std::vector<std::size_t>& preds_a,
                              const std::vector<std::size_t>& preds_b,
                              const std::vector<std::size_t>& truth) {
  if (preds_a.size() != truth.size() || preds_b.size() != truth.size())
    throw ContractViolation("mcnemar: prediction and truth lengths differ");
  std::size_t n10 = 0, n01 = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool a_ok = preds_a[i] == truth[i];
    const bool b_ok = preds_b[i] == truth[i];
    if (a_ok && !b_ok) ++n10;
    if (!a_ok && b_ok) ++n01;
  }
  return mcnemar_from_counts(n10, n01);
}

inline std::string verdict_symbol(Verdict v) {
  switch (v) {
    case Verdict::plus: return "+";
    case Verdict::approx: return "≈";
    case Verdict::minus: return "−";
  }
  return "?";
}

/// "+", "≈", "−", followed by " (x)" when the contingency count is low.
inline std::string format_verdict(const McNemarOutcome& m) {
  return verdict_symbol(m.verdict) + (m.low_contingency ? " (x)" : "");
}

// ---------------------------------------------------------------------------
// Results files

inline constexpr int kResultsVersion = 1;

struct ResultsFile {
  HoldoutResult result;
  nlohmann::ordered_json config;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline nlohmann::ordered_json results_to_json(const HoldoutResult& r,
                                              const nlohmann::ordered_json& config,
                                              const std::string& timestamp) {
  using serial::real;
  nlohmann::ordered_json acc = nlohmann::ordered_json::array();
  for (double a : r.per_chunk_accuracy) acc.push_back(real(a));
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& e : r.drift_log) events.push_back(serial::event(e));
  return {{"format", "parafis-results"},
          {"version", kResultsVersion},
          {"timestamp", timestamp},
          {"config", config},
          {"summary",
           {{"mean", real(r.mean)},
            {"std", real(r.std)},
            {"chunks", r.per_chunk_accuracy.size()},
            {"samples_consumed", r.samples_consumed},
            {"drift_events", r.drift_events},
            {"rule_count", r.rule_count}}},
          {"per_chunk_accuracy", std::move(acc)},
          {"drift_log", std::move(events)},
          {"predictions", r.predictions},
          {"truth", r.truth}};
}

/// Writes the results as JSON with a fixed key order. The parent directory
/// is created when missing.
inline void persist_results(const HoldoutResult& r, const nlohmann::ordered_json& config,
                            const std::string& path,
                            const std::string& timestamp = utc_timestamp()) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << results_to_json(r, config, timestamp).dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline ResultsFile load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  const auto j = nlohmann::ordered_json::parse(in);
  if (j.value("format", "") != "parafis-results")
    throw ParseError(path + ": not a parafis results file", 0);
  ResultsFile f;
  f.timestamp = j.at("timestamp").get<std::string>();
  f.config = j.at("config");
  const auto& s = j.at("summary");
  f.result.mean = serial::real(s.at("mean"));
  f.result.std = serial::real(s.at("std"));
  f.result.samples_consumed = s.at("samples_consumed").get<std::size_t>();
  f.result.drift_events = s.at("drift_events").get<std::size_t>();
  f.result.rule_count = s.at("rule_count").get<std::size_t>();
  for (const auto& a : j.at("per_chunk_accuracy"))
    f.result.per_chunk_accuracy.push_back(serial::real(a));
  for (const auto& e : j.at("drift_log")) f.result.drift_log.push_back(serial::event(e));
  f.result.predictions = j.at("predictions").get<std::vector<std::size_t>>();
  f.result.truth = j.at("truth").get<std::vector<std::size_t>>();
  return f;
}

/// Flat "chunk,accuracy" series for plotting.
inline void write_accuracy_csv(const HoldoutResult& r, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "chunk,accuracy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.per_chunk_accuracy.size(); ++i)
    out << i << ',' << r.per_chunk_accuracy[i] << '\n';
}

/// One JSON object per line: sample_index, rule_id, separation, strategy.
inline void write_drift_log(const std::vector<DriftEvent>& events, std::ostream& out) {
  for (const auto& e : events) out << serial::event(e).dump() << '\n';
}

}  // namespace parafis
