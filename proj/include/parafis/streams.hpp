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

// Labelled data streams: synthetic drift generators, CSV ingestion and
// export, chunking for periodic hold-out, and first-chunk standardization.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "parafis/numerics.hpp"

namespace parafis {

struct LabeledSample {
  Vector x;
  std::size_t y = 0;
  std::size_t t = 0;
};

struct Stream {
  std::vector<LabeledSample> samples;
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<std::string> label_names;  // empty: labels are their indices
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  std::size_t size() const { return samples.size(); }
};

/// Generator parameters. Zero / negative / empty fields take the
/// generator's defaults when resolved.
struct StreamSpec {
  std::string generator;  // sea hyperplane line sin sinh 10dplane gauss csv
  std::string path;       // csv only
  std::size_t length = 0;
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::size_t trs = 0;
  std::size_t tes = 0;
  double noise = -1.0;
  std::vector<std::size_t> drift_positions;
  double drift_magnitude = -1.0;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"sea",  "hyperplane", "line", "sin",
                                              "sinh", "10dplane",   "gauss", "csv"};
  return names;
}

/// Fills unset fields with the generator defaults (stream shapes follow the
/// usual benchmark layout: SEA 100k 250/250, Hyperplane 120k 1000/250,
/// line/sin/sinh 2500 200/50, 10dplane 1200 100/20).
inline StreamSpec resolve(StreamSpec s) {
  auto set = [](auto& field, auto value, auto unset) {
    if (field == unset) field = value;
  };
  const std::string& g = s.generator;
  if (g == "sea") {
    set(s.length, std::size_t{100000}, std::size_t{0});
    set(s.dim, std::size_t{3}, std::size_t{0});
    set(s.trs, std::size_t{250}, std::size_t{0});
    set(s.tes, std::size_t{250}, std::size_t{0});
    if (s.noise < 0) s.noise = 0.02;
    if (s.drift_positions.empty())
      s.drift_positions = {s.length / 4, s.length / 2, 3 * s.length / 4};
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.0;
  } else if (g == "hyperplane") {
    set(s.length, std::size_t{120000}, std::size_t{0});
    set(s.dim, std::size_t{4}, std::size_t{0});
    set(s.trs, std::size_t{1000}, std::size_t{0});
    set(s.tes, std::size_t{250}, std::size_t{0});
    if (s.noise < 0) s.noise = 0.05;
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.001;
  } else if (g == "line" || g == "sin" || g == "sinh") {
    set(s.length, std::size_t{2500}, std::size_t{0});
    set(s.dim, std::size_t{2}, std::size_t{0});
    set(s.trs, std::size_t{200}, std::size_t{0});
    set(s.tes, std::size_t{50}, std::size_t{0});
    if (s.noise < 0) s.noise = 0.0;
    if (s.drift_positions.empty()) s.drift_positions = {s.length / 2};
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.0;
  } else if (g == "10dplane") {
    set(s.length, std::size_t{1200}, std::size_t{0});
    set(s.dim, std::size_t{10}, std::size_t{0});
    set(s.trs, std::size_t{100}, std::size_t{0});
    set(s.tes, std::size_t{20}, std::size_t{0});
    if (s.noise < 0) s.noise = 0.0;
    if (s.drift_positions.empty()) s.drift_positions = {s.length / 2};
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.0;
  } else if (g == "gauss") {
    set(s.length, std::size_t{2000}, std::size_t{0});
    set(s.dim, std::size_t{2}, std::size_t{0});
    set(s.classes, std::size_t{2}, std::size_t{0});
    set(s.trs, std::size_t{100}, std::size_t{0});
    set(s.tes, std::size_t{100}, std::size_t{0});
    if (s.noise < 0) s.noise = 0.0;
    if (s.drift_positions.empty()) s.drift_positions = {s.length / 2};
    // Size of the class-mode jump, in standard deviations; 0 is stationary.
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.0;
  } else if (g == "csv") {
    if (s.path.empty()) throw ConfigError("csv stream needs a path");
    if (s.noise < 0) s.noise = 0.0;
    if (s.drift_magnitude < 0) s.drift_magnitude = 0.0;
  } else {
    throw ConfigError("unknown stream generator '" + g + "'");
  }
  if (g != "gauss" && g != "csv") s.classes = 2;
  std::sort(s.drift_positions.begin(), s.drift_positions.end());
  return s;
}

inline nlohmann::ordered_json spec_to_json(const StreamSpec& s) {
  return {{"generator", s.generator},     {"path", s.path},
          {"length", s.length},           {"dim", s.dim},
          {"classes", s.classes},         {"trs", s.trs},
          {"tes", s.tes},                 {"noise", s.noise},
          {"drift_positions", s.drift_positions},
          {"drift_magnitude", s.drift_magnitude},
          {"seed", s.seed}};
}

inline StreamSpec spec_from_json(const nlohmann::ordered_json& j) {
  StreamSpec s;
  s.generator = j.at("generator").get<std::string>();
  s.path = j.value("path", "");
  s.length = j.value("length", std::size_t{0});
  s.dim = j.value("dim", std::size_t{0});
  s.classes = j.value("classes", std::size_t{0});
  s.trs = j.value("trs", std::size_t{0});
  s.tes = j.value("tes", std::size_t{0});
  s.noise = j.value("noise", -1.0);
  s.drift_positions = j.value("drift_positions", std::vector<std::size_t>{});
  s.drift_magnitude = j.value("drift_magnitude", -1.0);
  s.seed = j.value("seed", std::uint64_t{1});
  return s;
}

// ---------------------------------------------------------------------------
// Labelling rules, exposed for direct testing.

/// SEA concept: class 1 when f1 + f2 <= theta.
inline std::size_t sea_label(double f1, double f2, double theta) {
  return f1 + f2 <= theta ? 1 : 0;
}

/// Class 1 when w.x >= b.
inline std::size_t hyperplane_label(const Vector& w, double b, const Vector& x) {
  return w.dot(x) >= b ? 1 : 0;
}

enum class BoundaryKind { line, sin, sinh };

/// 2-D boundary concepts. `concept_id` alternates 0/1 at every scheduled
/// drift; concept 1 mirrors the boundary of concept 0. Returns 1 ("above")
/// when the point lies strictly above the boundary.
inline std::size_t boundary_label(BoundaryKind kind, int concept_id, double x1,
                                  double x2) {
  double boundary = 0.0;
  switch (kind) {
    case BoundaryKind::line:
      boundary = concept_id == 0 ? x1 : 1.0 - x1;  // y = a x + b
      break;
    case BoundaryKind::sin:
      boundary = (concept_id == 0 ? 1.0 : -1.0) * std::sin(x1);
      break;
    case BoundaryKind::sinh:
      boundary = (concept_id == 0 ? 1.0 : -1.0) * std::sinh(x1) / std::sinh(2.0);
      break;
  }
  return x2 > boundary ? 1 : 0;
}

/// Line concept with explicit coefficients: class 1 when x2 > a x1 + b.
inline std::size_t line_label(double a, double b, double x1, double x2) {
  return x2 > a * x1 + b ? 1 : 0;
}

namespace detail {

inline int concept_at(std::size_t t, const std::vector<std::size_t>& positions) {
  int c = 0;
  for (std::size_t p : positions)
    if (t >= p) c ^= 1;
  return c;
}

inline std::size_t maybe_flip(std::size_t y, std::size_t classes, double noise,
                              std::mt19937_64& rng, std::size_t& flips) {
  if (noise <= 0.0) return y;
  std::bernoulli_distribution flip(noise);
  if (!flip(rng)) return y;
  ++flips;
  if (classes == 2) return 1 - y;
  std::uniform_int_distribution<std::size_t> other(0, classes - 2);
  const std::size_t z = other(rng);
  return z >= y ? z + 1 : z;
}

inline Stream make_stream(const StreamSpec& s) {
  Stream out;
  out.dim = s.dim;
  out.classes = s.classes;
  out.samples.reserve(s.length);
  return out;
}

inline void finish(Stream& out, const StreamSpec& s, std::size_t flips,
                   nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
  std::vector<std::size_t> counts(out.classes, 0);
  for (const auto& smp : out.samples) ++counts[smp.y];
  out.metadata = {{"spec", spec_to_json(s)},
                  {"samples", out.samples.size()},
                  {"class_counts", counts},
                  {"label_flips", flips},
                  {"schedule", std::move(extra)}};
}

}  // namespace detail

inline Stream gen_sea(StreamSpec spec) {
  spec.generator = "sea";
  const StreamSpec s = resolve(spec);
  if (s.dim != 3) throw ConfigError("sea: dim must be 3");
  static constexpr double kThetas[] = {8.0, 9.0, 7.0, 9.5};
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> feat(0.0, 10.0);
  Stream out = detail::make_stream(s);
  std::size_t flips = 0;
  std::vector<double> thetas;
  for (std::size_t t = 0; t < s.length; ++t) {
    std::size_t block = 0;
    for (std::size_t p : s.drift_positions)
      if (t >= p) ++block;
    const double theta = kThetas[block % 4];
    Vector x(3);
    for (int k = 0; k < 3; ++k) x(k) = feat(rng);
    const std::size_t y =
        detail::maybe_flip(sea_label(x(0), x(1), theta), 2, s.noise, rng, flips);
    out.samples.push_back({std::move(x), y, t});
  }
  for (std::size_t b = 0; b <= s.drift_positions.size(); ++b)
    thetas.push_back(kThetas[b % 4]);
  detail::finish(out, s, flips, {{"positions", s.drift_positions}, {"thetas", thetas}});
  return out;
}

/// Rotating hyperplane: x ~ U[0,1]^d, class 1 when w.x >= sum(w)/2. Every
/// weight moves by drift_magnitude per sample, reversing direction with
/// probability 0.1.
inline Stream gen_hyperplane(StreamSpec spec) {
  spec.generator = "hyperplane";
  const StreamSpec s = resolve(spec);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution reverse(0.1);
  const auto d = static_cast<Eigen::Index>(s.dim);
  Vector w(d);
  for (Eigen::Index k = 0; k < d; ++k) w(k) = unit(rng);
  const std::vector<double> initial(w.begin(), w.end());
  Vector direction = Vector::Ones(d);
  Stream out = detail::make_stream(s);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < s.length; ++t) {
    Vector x(d);
    for (Eigen::Index k = 0; k < d; ++k) x(k) = unit(rng);
    const std::size_t y = detail::maybe_flip(hyperplane_label(w, 0.5 * w.sum(), x), 2,
                                             s.noise, rng, flips);
    out.samples.push_back({std::move(x), y, t});
    if (s.drift_magnitude > 0.0) {
      for (Eigen::Index k = 0; k < d; ++k) {
        w(k) += direction(k) * s.drift_magnitude;
        if (reverse(rng)) direction(k) = -direction(k);
      }
    }
  }
  detail::finish(out, s, flips,
                 {{"drift_magnitude", s.drift_magnitude},
                  {"initial_weights", initial},
                  {"final_weights", std::vector<double>(w.begin(), w.end())}});
  return out;
}

/// 2-D streams with abrupt boundary swaps at the scheduled positions.
/// line: x in [0,1]^2, y = x  <->  y = 1 - x.
/// sin:  x1 in [0, 2pi], x2 in [-1,1], y = sin(x)  <->  y = -sin(x).
/// sinh: x1 in [-2,2], x2 in [-1,1], y = sinh(x)/sinh(2)  <->  its mirror.
inline Stream gen_boundary_swap(BoundaryKind kind, StreamSpec spec) {
  spec.generator = kind == BoundaryKind::line  ? "line"
                   : kind == BoundaryKind::sin ? "sin"
                                               : "sinh";
  const StreamSpec s = resolve(spec);
  if (s.dim != 2) throw ConfigError(spec.generator + ": dim must be 2");
  double lo = 0.0, hi = 1.0, ylo = 0.0, yhi = 1.0;
  if (kind == BoundaryKind::sin) {
    hi = 2.0 * std::numbers::pi;
    ylo = -1.0;
  } else if (kind == BoundaryKind::sinh) {
    lo = -2.0;
    hi = 2.0;
    ylo = -1.0;
  }
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> fx(lo, hi), fy(ylo, yhi);
  Stream out = detail::make_stream(s);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < s.length; ++t) {
    Vector x(2);
    x(0) = fx(rng);
    x(1) = fy(rng);
    const int concept_id = detail::concept_at(t, s.drift_positions);
    const std::size_t y = detail::maybe_flip(
        boundary_label(kind, concept_id, x(0), x(1)), 2, s.noise, rng, flips);
    out.samples.push_back({std::move(x), y, t});
  }
  detail::finish(out, s, flips, {{"positions", s.drift_positions}});
  return out;
}

/// 10-D hyperplane through the cube centre whose normal is swapped for a
/// second random normal at every scheduled position.
inline Stream gen_10dplane(StreamSpec spec) {
  spec.generator = "10dplane";
  const StreamSpec s = resolve(spec);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), coef(-1.0, 1.0);
  const auto d = static_cast<Eigen::Index>(s.dim);
  Vector normals[2] = {Vector(d), Vector(d)};
  for (auto& n : normals)
    for (Eigen::Index k = 0; k < d; ++k) n(k) = coef(rng);
  const Vector centre = Vector::Constant(d, 0.5);
  Stream out = detail::make_stream(s);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < s.length; ++t) {
    Vector x(d);
    for (Eigen::Index k = 0; k < d; ++k) x(k) = unit(rng);
    const Vector& w = normals[detail::concept_at(t, s.drift_positions)];
    const std::size_t y = detail::maybe_flip(hyperplane_label(w, w.dot(centre), x), 2,
                                             s.noise, rng, flips);
    out.samples.push_back({std::move(x), y, t});
  }
  detail::finish(out, s, flips, {{"positions", s.drift_positions}});
  return out;
}

/// Unit-variance isotropic Gaussian classes; class k is centred at
/// (6k, 0, ...). When drift_magnitude > 0 the last class jumps by that many
/// standard deviations along the second axis at the first drift position.
inline Stream gen_gauss(StreamSpec spec) {
  spec.generator = "gauss";
  const StreamSpec s = resolve(spec);
  if (s.dim < 2) throw ConfigError("gauss: dim must be >= 2");
  constexpr double kSpacing = 6.0;
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, s.classes - 1);
  const auto d = static_cast<Eigen::Index>(s.dim);
  const std::size_t jump_at =
      s.drift_magnitude > 0.0 ? s.drift_positions.front() : s.length;
  Stream out = detail::make_stream(s);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < s.length; ++t) {
    const std::size_t cls = pick(rng);
    Vector x(d);
    for (Eigen::Index k = 0; k < d; ++k) x(k) = gauss(rng);
    x(0) += kSpacing * static_cast<double>(cls);
    if (cls == s.classes - 1 && t >= jump_at) x(1) += s.drift_magnitude;
    const std::size_t y = detail::maybe_flip(cls, s.classes, s.noise, rng, flips);
    out.samples.push_back({std::move(x), y, t});
  }
  detail::finish(out, s, flips,
                 {{"jump_at", jump_at}, {"jump_sigma", s.drift_magnitude}});
  return out;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvSchema {
  /// When non-empty the label set is frozen: labels are mapped to these
  /// indices and anything else is a parse error.
  std::vector<std::string> labels;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Header row, numeric feature columns, label column last. Rows keep file
/// order. Labels get dense indices in first-appearance order unless the
/// schema freezes them.
inline Stream load_csv(std::istream& in, const CsvSchema& schema = {},
                       const std::string& source = "<stream>") {
  Stream out;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& l : schema.labels) {
    index.emplace(l, out.label_names.size());
    out.label_names.push_back(l);
  }
  const bool frozen = !schema.labels.empty();

  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line);
    if (columns == 0) {
      if (cells.size() < 2)
        throw ParseError("header needs at least one feature and a label", lineno);
      columns = cells.size();
      continue;
    }
    if (cells.size() != columns)
      throw ParseError("expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(cells.size()),
                       lineno);
    Vector x(static_cast<Eigen::Index>(columns - 1));
    for (std::size_t k = 0; k + 1 < columns; ++k) {
      const auto cell = cells[k];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() ||
          !std::isfinite(v))
        throw ParseError("non-numeric feature '" + std::string(cell) + "' in column " +
                             std::to_string(k + 1),
                         lineno);
      x(static_cast<Eigen::Index>(k)) = v;
    }
    const std::string label(cells.back());
    auto it = index.find(label);
    if (it == index.end()) {
      if (frozen) throw ParseError("unknown label '" + label + "'", lineno);
      it = index.emplace(label, out.label_names.size()).first;
      out.label_names.push_back(label);
    }
    out.samples.push_back({std::move(x), it->second, out.samples.size()});
  }
  if (columns == 0) throw ParseError(source + ": missing header row", 0);
  out.dim = columns - 1;
  out.classes = out.label_names.size();
  out.metadata = {{"source", source},
                  {"samples", out.samples.size()},
                  {"labels", out.label_names}};
  return out;
}

inline Stream load_csv(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return load_csv(in, schema, path);
}

/// Writes header f0..f{d-1},label and one row per sample. Doubles use 17
/// significant digits so a reload is exact. A metadata sidecar is written
/// next to the CSV as `<path>.meta.json`.
inline void write_csv(const Stream& s, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t k = 0; k < s.dim; ++k) out << 'f' << k << ',';
  out << "label\n";
  char buf[32];
  for (const auto& smp : s.samples) {
    for (Eigen::Index k = 0; k < smp.x.size(); ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, smp.x(k));
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    if (s.label_names.empty())
      out << smp.y << '\n';
    else
      out << s.label_names[smp.y] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  std::ofstream meta(path + ".meta.json");
  nlohmann::ordered_json m = s.metadata;
  m["dim"] = s.dim;
  m["classes"] = s.classes;
  meta << m.dump(2) << '\n';
}

/// Dispatches on spec.generator.
inline Stream generate(const StreamSpec& spec) {
  const std::string& g = spec.generator;
  if (g == "sea") return gen_sea(spec);
  if (g == "hyperplane") return gen_hyperplane(spec);
  if (g == "line") return gen_boundary_swap(BoundaryKind::line, spec);
  if (g == "sin") return gen_boundary_swap(BoundaryKind::sin, spec);
  if (g == "sinh") return gen_boundary_swap(BoundaryKind::sinh, spec);
  if (g == "10dplane") return gen_10dplane(spec);
  if (g == "gauss") return gen_gauss(spec);
  if (g == "csv") {
    Stream s = load_csv(resolve(spec).path);
    s.metadata["spec"] = spec_to_json(resolve(spec));
    return s;
  }
  throw ConfigError("unknown stream generator '" + g + "'");
}

/// Swaps labels a and b on every sample after each scheduled position
/// (toggling, so two positions give a recurrent concept).
inline void inject_class_swap(Stream& s, std::size_t a, std::size_t b,
                              const std::vector<std::size_t>& positions) {
  detail::require(a < s.classes && b < s.classes, "inject_class_swap: bad label");
  for (auto& smp : s.samples) {
    if (detail::concept_at(smp.t, positions) == 0) continue;
    if (smp.y == a)
      smp.y = b;
    else if (smp.y == b)
      smp.y = a;
  }
  s.metadata["class_swap"] = {{"a", a}, {"b", b}, {"positions", positions}};
}

// ---------------------------------------------------------------------------
// Chunking and standardization

struct ChunkPair {
  std::span<const LabeledSample> train;
  std::span<const LabeledSample> test;
};

struct Chunking {
  std::vector<ChunkPair> pairs;
  std::size_t leftover = 0;  // trailing samples that did not fill a pair
};

/// Alternating train/test blocks over a prefix of the stream.
inline Chunking chunk(std::span<const LabeledSample> samples, std::size_t trs,
                      std::size_t tes) {
  if (trs == 0 || tes == 0) throw ConfigError("chunk sizes must be >= 1");
  const std::size_t period = trs + tes;
  if (samples.size() < period)
    throw ConfigError("stream of " + std::to_string(samples.size()) +
                      " samples is shorter than one train+test pair (" +
                      std::to_string(period) + ")");
  Chunking out;
  const std::size_t n = samples.size() / period;
  for (std::size_t i = 0; i < n; ++i)
    out.pairs.push_back({samples.subspan(i * period, trs),
                         samples.subspan(i * period + trs, tes)});
  out.leftover = samples.size() - n * period;
  return out;
}

/// Per-feature z-scoring with statistics frozen at fit time.
class Standardizer {
 public:
  Standardizer() = default;

  explicit Standardizer(std::span<const LabeledSample> fit) {
    if (fit.empty()) return;
    const auto d = fit.front().x.size();
    mean_ = Vector::Zero(d);
    for (const auto& s : fit) mean_ += s.x;
    mean_ /= static_cast<double>(fit.size());
    Vector var = Vector::Zero(d);
    for (const auto& s : fit) var.array() += (s.x - mean_).array().square();
    var /= static_cast<double>(fit.size());
    scale_ = var.array().sqrt();
    for (Eigen::Index k = 0; k < d; ++k)
      if (!(scale_(k) > 1e-12)) scale_(k) = 1.0;
  }

  Vector operator()(const Vector& x) const {
    if (mean_.size() == 0) return x;
    return ((x - mean_).array() / scale_.array()).matrix();
  }

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }

 private:
  Vector mean_;
  Vector scale_;
};

}  // namespace parafis
