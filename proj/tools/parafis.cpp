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


// parafis: generate streams, run hold-out experiments, compare two runs with
// McNemar's test and tune ks/ws on a validation prefix.
//
// Exit codes: 0 ok, 2 configuration or usage, 3 data, 4 runtime.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parafis/config.hpp"
#include "parafis/errors.hpp"
#include "parafis/eval.hpp"
#include "parafis/streams.hpp"

namespace fs = std::filesystem;
using namespace parafis;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

std::string output_dir() {
  const char* env = std::getenv("PARAFIS_OUTPUT_DIR");
  return env && *env ? env : "results";
}

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help{
      {"generator", "sea|hyperplane|line|sin|sinh|10dplane|gauss|csv"},
      {"path", "CSV file for generator=csv"},
      {"length", "number of samples"},
      {"dim", "input dimension"},
      {"classes", "number of classes (gauss)"},
      {"trs", "train chunk size"},
      {"tes", "test chunk size"},
      {"noise", "label noise rate"},
      {"drift_positions", "comma-separated drift positions"},
      {"drift_magnitude", "per-sample hyperplane step, or gauss jump in sigmas"},
      {"seed", "generator seed"},
      {"learner", "parafis|baseline"},
      {"tmax1", "slow sub-rule memory"},
      {"tmax2", "fast sub-rule memory"},
      {"ks", "separability threshold (inf disables detection)"},
      {"nmin", "samples both sub-rules need before a split"},
      {"ws", "forgetting window size"},
      {"omega", "initial correlation scale"},
      {"sigma_init", "initial rule spread"},
      {"strategy", "naive|global"},
      {"forgetting_mode", "none|forget_ps|forget_am"},
      {"wrls_weight", "normalized|raw"},
      {"subrule_init", "parent|zero"},
      {"standardize", "z-score with first-chunk statistics (true|false)"},
      {"output", "results file"}};
  return help;
}

// A --config file plus one --<key> override per config key.
struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app, const std::string& config_flag = "--config") {
    app->add_option(config_flag, file, "key = value config file");
    for (const auto& key : config_keys())
      app->add_option("--" + key, overrides[key], key_help().at(key));
  }

  ExperimentConfig build() const {
    ExperimentConfig c = file.empty() ? ExperimentConfig{} : load_config(file);
    for (const auto& [key, value] : overrides)
      if (!value.empty()) apply_setting(c, key, value);
    validate(c);
    return c;
  }
};

std::string stem_for(const ExperimentConfig& c) {
  const StreamSpec s = resolve(c.stream);
  std::ostringstream os;
  os << s.generator << '-' << to_string(c.kind);
  if (c.kind == LearnerKind::parafis)
    os << '-' << to_string(c.learner.forgetting) << '-' << to_string(c.learner.strategy);
  os << "-s" << s.seed;
  return os.str();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::vector<std::size_t> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::vector<std::size_t> out;
  std::string tok;
  while (in >> tok) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(path + ": not a class index: '" + tok + "'", out.size() + 1);
    out.push_back(v);
  }
  return out;
}

void print_comparison(const McNemarOutcome& m, std::ostream& os) {
  os << "n01 " << m.n01 << "  n10 " << m.n10 << "  K " << fmt(m.k, 3) << "  "
     << format_verdict(m) << '\n';
}

// --- generate --------------------------------------------------------------

int cmd_generate(const ConfigOptions& opts, const std::string& out_path) {
  const ExperimentConfig c = opts.build();
  const StreamSpec spec = resolve(c.stream);
  const Stream s = generate(spec);
  const std::string path = out_path.empty()
                               ? (fs::path(output_dir()) / (spec.generator + "-s" +
                                                            std::to_string(spec.seed) + ".csv"))
                                     .string()
                               : out_path;
  write_csv(s, path);
  std::cout << "wrote " << s.size() << " samples to " << path << '\n';
  return 0;
}

// --- run -------------------------------------------------------------------

int cmd_run(const ConfigOptions& opts) {
  const ExperimentConfig c = opts.build();
  const HoldoutResult r = run_experiment(c);
  const std::string path =
      c.output.empty() ? (fs::path(output_dir()) / (stem_for(c) + ".json")).string()
                       : c.output;
  persist_results(r, config_to_json(c), path);
  const fs::path base = fs::path(path).replace_extension();
  write_accuracy_csv(r, base.string() + ".accuracy.csv");
  std::ofstream log(base.string() + ".drift.jsonl");
  write_drift_log(r.drift_log, log);

  std::cout << "accuracy " << fmt(r.mean) << " +/- " << fmt(r.std) << " over "
            << r.per_chunk_accuracy.size() << " chunks\n"
            << "drift events " << r.drift_events << "\n"
            << "rules " << r.rule_count << "\n"
            << "results " << path << '\n';
  return 0;
}

// --- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string preds_a, preds_b, truth;
  std::vector<double> sweep_ks;
};

int cmd_compare(const ConfigOptions& a_opts, const ConfigOptions& b_opts,
                const CompareArgs& args) {
  if (!args.preds_a.empty() || !args.preds_b.empty() || !args.truth.empty()) {
    if (args.preds_a.empty() || args.preds_b.empty() || args.truth.empty())
      throw ConfigError("compare: --preds-a, --preds-b and --truth go together");
    const auto a = read_labels(args.preds_a), b = read_labels(args.preds_b),
               t = read_labels(args.truth);
    if (a.size() != t.size() || b.size() != t.size())
      throw ParseError("compare: prediction files differ in length", 0);
    print_comparison(mcnemar(a, b, t), std::cout);
    return 0;
  }

  const ExperimentConfig ca = a_opts.build();
  const ExperimentConfig cb = b_opts.build();
  if (spec_to_json(resolve(ca.stream)) != spec_to_json(resolve(cb.stream)))
    throw ConfigError("compare: the two configs describe different streams");

  const HoldoutResult ra = run_experiment(ca);
  std::cout << "A " << stem_for(ca) << "  accuracy " << fmt(ra.mean) << " +/- "
            << fmt(ra.std) << '\n';
  if (args.sweep_ks.empty()) {
    const HoldoutResult rb = run_experiment(cb);
    std::cout << "B " << stem_for(cb) << "  accuracy " << fmt(rb.mean) << " +/- "
              << fmt(rb.std) << '\n';
    print_comparison(mcnemar(ra.predictions, rb.predictions, ra.truth), std::cout);
    return 0;
  }

  std::cout << "ks\taccuracy_b\tdrifts_b\tn01\tn10\tK\tverdict\n";
  for (double ks : args.sweep_ks) {
    ExperimentConfig cell = cb;
    cell.learner.ks = ks;
    validate(cell);
    const HoldoutResult rb = run_experiment(cell);
    const McNemarOutcome m = mcnemar(ra.predictions, rb.predictions, ra.truth);
    std::cout << ks << '\t' << fmt(rb.mean) << '\t' << rb.drift_events << '\t' << m.n01
              << '\t' << m.n10 << '\t' << fmt(m.k, 3) << '\t' << format_verdict(m) << '\n';
  }
  return 0;
}

// --- tune ------------------------------------------------------------------

struct TuneArgs {
  double fraction = 0.2;
  std::vector<double> ks_grid{0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::size_t> ws_grid{10, 25, 50, 100, 200};
  std::string out;
};

struct Cell {
  double ks;
  std::size_t ws;
  HoldoutResult result;
};

std::vector<Cell> evaluate_grid(const ExperimentConfig& base, const Stream& validation,
                                const std::vector<std::pair<double, std::size_t>>& grid) {
  const StreamSpec spec = resolve(base.stream);
  std::vector<std::future<Cell>> jobs;
  for (const auto& [ks, ws] : grid) {
    jobs.push_back(std::async(std::launch::async, [&, ks = ks, ws = ws] {
      LearnerParams p = base.learner;
      p.ks = ks;
      p.ws = ws;
      p.validate();
      return Cell{ks, ws,
                  periodic_holdout(
                      [&](std::size_t d, std::size_t k) { return ParaFISLearner(d, k, p); },
                      validation, spec.trs, spec.tes, HoldoutOptions{base.standardize})};
    }));
  }
  std::vector<Cell> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// Best accuracy among cells whose rule count stays within the budget; if no
// cell qualifies the budget is dropped.
const Cell& pick(const std::vector<Cell>& cells, std::size_t rule_budget) {
  const Cell* best = nullptr;
  for (bool strict : {true, false}) {
    for (const auto& cell : cells) {
      if (strict && cell.result.rule_count > rule_budget) continue;
      if (!best || cell.result.mean > best->result.mean) best = &cell;
    }
    if (best) break;
  }
  return *best;
}

int cmd_tune(const ConfigOptions& opts, const TuneArgs& args) {
  if (!(args.fraction > 0.0 && args.fraction <= 1.0))
    throw ConfigError("tune: --fraction must be in (0, 1]");
  if (args.ks_grid.empty() || args.ws_grid.empty())
    throw ConfigError("tune: empty grid");
  ExperimentConfig c = opts.build();
  if (c.kind != LearnerKind::parafis) throw ConfigError("tune: only the parafis learner has ks/ws");
  const StreamSpec spec = resolve(c.stream);
  const Stream full = generate(spec);
  Stream validation = full;
  validation.samples.resize(static_cast<std::size_t>(args.fraction * full.size()));
  const std::size_t budget = 3 * full.classes;

  std::vector<std::pair<double, std::size_t>> grid;
  for (double ks : args.ks_grid) grid.emplace_back(ks, c.learner.ws);
  const auto ks_cells = evaluate_grid(c, validation, grid);
  std::cout << "ks\tws\taccuracy\trules\tdrifts\n";
  for (const auto& cell : ks_cells)
    std::cout << cell.ks << '\t' << cell.ws << '\t' << fmt(cell.result.mean) << '\t'
              << cell.result.rule_count << '\t' << cell.result.drift_events << '\n';
  c.learner.ks = pick(ks_cells, budget).ks;

  grid.clear();
  for (std::size_t ws : args.ws_grid) grid.emplace_back(c.learner.ks, ws);
  const auto ws_cells = evaluate_grid(c, validation, grid);
  for (const auto& cell : ws_cells)
    std::cout << cell.ks << '\t' << cell.ws << '\t' << fmt(cell.result.mean) << '\t'
              << cell.result.rule_count << '\t' << cell.result.drift_events << '\n';
  c.learner.ws = pick(ws_cells, budget).ws;

  std::cout << "chosen ks " << c.learner.ks << "  ws " << c.learner.ws << '\n';
  const std::string text = config_to_text(c);
  if (args.out.empty()) {
    std::cout << '\n' << text;
  } else {
    const fs::path p(args.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
    std::cout << "wrote " << args.out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving fuzzy classifier with drift anticipation"};
  app.require_subcommand(1);

  ConfigOptions gen_opts, run_opts, cmp_a, cmp_b, tune_opts;
  std::string gen_out;
  CompareArgs cmp_args;
  TuneArgs tune_args;

  auto* gen = app.add_subcommand("generate", "write a generated stream as CSV");
  gen_opts.attach(gen);
  gen->add_option("--out", gen_out, "CSV path (default: $PARAFIS_OUTPUT_DIR)");

  auto* run = app.add_subcommand("run", "periodic hold-out on one configuration");
  run_opts.attach(run);

  auto* cmp = app.add_subcommand("compare", "McNemar test between two runs");
  cmp_a.attach(cmp, "--config-a");
  cmp->add_option("--config-b", cmp_b.file, "config file of the second run");
  cmp->add_option("--preds-a", cmp_args.preds_a, "predictions of A, one index per token");
  cmp->add_option("--preds-b", cmp_args.preds_b, "predictions of B");
  cmp->add_option("--truth", cmp_args.truth, "true labels");
  cmp->add_option("--sweep-ks", cmp_args.sweep_ks, "run B once per ks value")->delimiter(',');

  auto* tune = app.add_subcommand("tune", "pick ks then ws on a validation prefix");
  tune_opts.attach(tune);
  tune->add_option("--fraction", tune_args.fraction, "validation prefix (default 0.2)");
  tune->add_option("--ks-grid", tune_args.ks_grid, "ks values")->delimiter(',');
  tune->add_option("--ws-grid", tune_args.ws_grid, "ws values")->delimiter(',');
  tune->add_option("--out", tune_args.out, "write the tuned config here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_opts, gen_out);
    if (run->parsed()) return cmd_run(run_opts);
    if (cmp->parsed()) {
      // Overrides given to compare apply to both sides.
      cmp_b.overrides = cmp_a.overrides;
      if (cmp_b.file.empty()) cmp_b.file = cmp_a.file;
      return cmd_compare(cmp_a, cmp_b, cmp_args);
    }
    if (tune->parsed()) return cmd_tune(tune_opts, tune_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
