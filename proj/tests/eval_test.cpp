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

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "parafis/errors.hpp"
#include "parafis/eval.hpp"

namespace parafis {
namespace {

namespace fs = std::filesystem;

// Learns nothing; answers from a lookup table of the true labels.
struct OracleLearner {
  std::function<std::size_t(const Vector&)> label;
  void learn(const Vector&, std::size_t) {}
  std::size_t predict(const Vector& x) const { return label(x); }
};

struct ConstantLearner {
  std::size_t value = 0;
  void learn(const Vector&, std::size_t) {}
  std::size_t predict(const Vector&) const { return value; }
};

// Counts learn() calls and hashes its state before each predict().
struct CountingLearner {
  ParaFISLearner inner;
  std::size_t learned = 0;
  mutable std::vector<std::size_t> hashes;
  void learn(const Vector& x, std::size_t y) {
    ++learned;
    inner.learn(x, y);
  }
  std::size_t predict(const Vector& x) const {
    hashes.push_back(std::hash<std::string>{}(snapshot(inner).dump()));
    return inner.predict(x);
  }
};

Stream line_stream(std::size_t length = 2500, std::uint64_t seed = 1) {
  StreamSpec s;
  s.generator = "line";
  s.length = length;
  s.seed = seed;
  return generate(s);
}

TEST(Holdout, OracleScoresPerfectly) {
  const Stream s = line_stream();
  std::map<std::pair<double, double>, std::size_t> table;
  for (const auto& smp : s.samples) table[{smp.x(0), smp.x(1)}] = smp.y;
  HoldoutOptions raw;
  raw.standardize = false;
  const HoldoutResult r = periodic_holdout(
      [&](std::size_t, std::size_t) {
        return OracleLearner{[&](const Vector& x) { return table.at({x(0), x(1)}); }};
      },
      s, 200, 50, raw);
  ASSERT_EQ(r.per_chunk_accuracy.size(), 10u);
  EXPECT_EQ(r.mean, 1.0);
  EXPECT_EQ(r.std, 0.0);
  EXPECT_EQ(r.predictions, r.truth);
}

TEST(Holdout, ConstantLearnerNearHalf) {
  StreamSpec spec;
  spec.generator = "gauss";
  spec.length = 20000;
  const Stream s = generate(spec);
  const HoldoutResult r = periodic_holdout(
      [](std::size_t, std::size_t) { return ConstantLearner{0}; }, s, 100, 100);
  const double n = 10000.0;
  EXPECT_LT(std::abs(r.mean - 0.5), 3.0 * std::sqrt(0.25 / n));
  EXPECT_EQ(r.drift_events, 0u);
}

TEST(Holdout, ConsumesWholePairsAndNeverTrainsOnTests) {
  const Stream s = line_stream(2530);
  const HoldoutResult r = periodic_holdout(
      [&](std::size_t d, std::size_t c) { return CountingLearner{ParaFISLearner(d, c), 0, {}}; },
      s, 200, 50);
  EXPECT_EQ(r.samples_consumed, 10u * 250u);
  EXPECT_EQ(r.per_chunk_accuracy.size(), 10u);
  EXPECT_EQ(r.predictions.size(), 500u);

  // Run the same loop by hand to inspect the learner afterwards.
  CountingLearner l{ParaFISLearner(s.dim, s.classes), 0, {}};
  const Chunking ch = chunk(s.samples, 200, 50);
  for (const auto& pair : ch.pairs) {
    for (const auto& smp : pair.train) l.learn(smp.x, smp.y);
    for (const auto& smp : pair.test) l.predict(smp.x);
  }
  EXPECT_EQ(l.learned, 2000u);
  const auto& hashes = l.hashes;
  // Within a test chunk the state hash never changes.
  for (std::size_t c = 0; c < 10; ++c)
    for (std::size_t i = 1; i < 50; ++i)
      ASSERT_EQ(hashes[c * 50 + i], hashes[c * 50]) << "chunk " << c;
}

TEST(Holdout, ReportsLearnerDiagnostics) {
  StreamSpec spec;
  spec.generator = "gauss";
  spec.drift_magnitude = 10.0;
  const Stream s = generate(spec);
  HoldoutOptions raw;
  raw.standardize = false;
  const HoldoutResult r = periodic_holdout(
      [](std::size_t d, std::size_t c) { return ParaFISLearner(d, c); }, s, 100, 100, raw);
  EXPECT_GT(r.drift_events, 0u);
  EXPECT_EQ(r.drift_events, r.drift_log.size());
  EXPECT_EQ(r.rule_count, 2u + r.drift_events);
  EXPECT_GT(r.mean, 0.95);
  const Summary again = summarize(r.per_chunk_accuracy);
  EXPECT_EQ(again.mean, r.mean);
  EXPECT_EQ(again.std, r.std);
}

TEST(Holdout, TooShortStreamIsRejected) {
  const Stream s = line_stream(100);
  EXPECT_THROW(periodic_holdout([](std::size_t d, std::size_t c) { return ParaFISLearner(d, c); },
                                s, 200, 50),
               ConfigError);
}

TEST(Summarize, PopulationStd) {
  const Summary s = summarize({0.5, 1.0});
  EXPECT_DOUBLE_EQ(s.mean, 0.75);
  EXPECT_DOUBLE_EQ(s.std, 0.25);
  EXPECT_EQ(summarize({}).mean, 0.0);
}

TEST(McNemar, WorkedExamples) {
  McNemarOutcome m = mcnemar_from_counts(15, 5);
  EXPECT_DOUBLE_EQ(m.k, 5.0);
  EXPECT_EQ(m.verdict, Verdict::approx);
  EXPECT_TRUE(m.low_contingency);
  EXPECT_EQ(format_verdict(m), "≈ (x)");

  m = mcnemar_from_counts(30, 0);
  EXPECT_DOUBLE_EQ(m.k, 30.0);
  EXPECT_EQ(m.verdict, Verdict::plus);
  EXPECT_FALSE(m.low_contingency);
  EXPECT_EQ(format_verdict(m), "+");

  m = mcnemar_from_counts(0, 0);
  EXPECT_EQ(m.k, 0.0);
  EXPECT_EQ(m.verdict, Verdict::minus);
}

TEST(McNemar, ThresholdEdges) {
  // K = (n10 - n01)^2 / (n10 + n01)
  EXPECT_EQ(mcnemar_from_counts(14, 1).verdict, Verdict::plus);     // 11.27
  EXPECT_EQ(mcnemar_from_counts(20, 10).verdict, Verdict::approx);  // 3.33
  EXPECT_EQ(mcnemar_from_counts(20, 12).verdict, Verdict::minus);   // 2.0
  EXPECT_EQ(mcnemar_from_counts(18, 12).verdict, Verdict::minus);   // 1.2
}

TEST(McNemar, FromPredictions) {
  const std::vector<std::size_t> truth{0, 1, 1, 0, 1};
  const std::vector<std::size_t> a{0, 1, 0, 0, 0};
  const std::vector<std::size_t> b{1, 1, 1, 1, 1};
  const McNemarOutcome m = mcnemar(a, b, truth);
  EXPECT_EQ(m.n10, 2u);  // a right, b wrong: positions 0 and 3
  EXPECT_EQ(m.n01, 2u);  // a wrong, b right: positions 2 and 4
  EXPECT_EQ(mcnemar(a, a, truth).k, 0.0);
  EXPECT_EQ(mcnemar(a, a, truth).verdict, Verdict::minus);
  EXPECT_THROW(mcnemar(a, {0, 1}, truth), ContractViolation);
}

TEST(McNemar, Symmetric) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> label(0, 2), len(1, 400);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = len(rng);
    std::vector<std::size_t> a(n), b(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = label(rng);
      b[i] = label(rng);
      t[i] = label(rng);
    }
    const McNemarOutcome ab = mcnemar(a, b, t), ba = mcnemar(b, a, t);
    ASSERT_EQ(ab.k, ba.k);
    ASSERT_EQ(ab.verdict, ba.verdict);
    ASSERT_EQ(ab.n01, ba.n10);
  }
}

class ResultsFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("parafis_eval_" + std::string(
                                  ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static HoldoutResult run() {
    StreamSpec spec;
    spec.generator = "gauss";
    spec.drift_magnitude = 10.0;
    return periodic_holdout([](std::size_t d, std::size_t c) { return ParaFISLearner(d, c); },
                            generate(spec), 100, 100);
  }

  fs::path dir_;
};

TEST_F(ResultsFiles, RoundTrip) {
  const HoldoutResult r = run();
  const nlohmann::ordered_json cfg{{"generator", "gauss"}, {"ks", 0.5}};
  const std::string path = (dir_ / "a" / "b" / "run.json").string();
  persist_results(r, cfg, path);
  const ResultsFile f = load_results(path);
  EXPECT_EQ(f.config, cfg);
  EXPECT_EQ(f.result.per_chunk_accuracy, r.per_chunk_accuracy);
  EXPECT_EQ(f.result.mean, r.mean);
  EXPECT_EQ(f.result.std, r.std);
  EXPECT_EQ(f.result.predictions, r.predictions);
  EXPECT_EQ(f.result.truth, r.truth);
  EXPECT_EQ(f.result.drift_log.size(), r.drift_log.size());
  EXPECT_EQ(f.result.drift_log.front().sample_index, r.drift_log.front().sample_index);
  EXPECT_EQ(f.result.rule_count, r.rule_count);
}

TEST_F(ResultsFiles, RerunsDifferOnlyInTimestamp) {
  const auto a = (dir_ / "a.json").string(), b = (dir_ / "b.json").string();
  persist_results(run(), {{"seed", 1}}, a, "2026-01-01T00:00:00Z");
  persist_results(run(), {{"seed", 1}}, b, "2026-06-01T12:00:00Z");
  auto ja = nlohmann::ordered_json::parse(std::ifstream(a));
  auto jb = nlohmann::ordered_json::parse(std::ifstream(b));
  EXPECT_NE(ja["timestamp"], jb["timestamp"]);
  ja.erase("timestamp");
  jb.erase("timestamp");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST_F(ResultsFiles, UncreatableDirectoryIsAnError) {
  fs::create_directories(dir_);
  { std::ofstream(dir_ / "blocker") << "x"; }
  EXPECT_THROW(persist_results(run(), {}, (dir_ / "blocker" / "r.json").string()),
               std::runtime_error);
  EXPECT_THROW(load_results((dir_ / "missing.json").string()), ParseError);
}

TEST_F(ResultsFiles, AccuracyCsvAndDriftLog) {
  const HoldoutResult r = run();
  const auto path = (dir_ / "acc.csv").string();
  write_accuracy_csv(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "chunk,accuracy");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.per_chunk_accuracy.size());

  std::ostringstream log;
  write_drift_log(r.drift_log, log);
  std::istringstream lines(log.str());
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("sample_index"));
    EXPECT_TRUE(j.contains("rule_id"));
    ++n;
  }
  EXPECT_EQ(n, r.drift_log.size());
}

}  // namespace
}  // namespace parafis
