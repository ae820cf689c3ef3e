/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hotspot/eval.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace hotspot::eval {

namespace {

std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels) {
  require(scores.size() == labels.size(), "scores and labels differ in length");
  double sum = 0.0;
  std::size_t hits = 0;
  const auto order = ranking(scores);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits == 0) throw DataError("average precision needs at least one positive");
  return sum / static_cast<double>(hits);
}

double expected_random_ap(std::size_t n, std::size_t r) {
  require(n >= 1 && r >= 1 && r <= n, "expected AP needs 1 <= positives <= items");
  if (n == 1) return 1.0;
  double harmonic = 0.0;
  for (std::size_t k = 1; k <= n; ++k) harmonic += 1.0 / static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return (harmonic + (static_cast<double>(r) - 1.0) * (nn - harmonic) / (nn - 1.0)) / nn;
}

double lift(double psi_model, double psi_random) {
  require(psi_random > 0.0, "random reference precision must be positive");
  return psi_model / psi_random;
}

double ratio(double lift_i, double lift_j) {
  require(lift_i > 0.0, "reference lift must be positive");
  return 100.0 * (lift_j / lift_i - 1.0);
}

std::vector<PrPoint> precision_recall_curve(std::span<const double> scores,
                                            std::span<const std::uint8_t> labels) {
  require(scores.size() == labels.size(), "scores and labels differ in length");
  const auto order = ranking(scores);
  const double total = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
  if (total == 0.0) throw DataError("precision-recall curve needs at least one positive");
  std::vector<PrPoint> curve;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    hits += labels[order[k]] != 0;
    const bool last_of_value = k + 1 == order.size() || scores[order[k + 1]] != scores[order[k]];
    if (last_of_value) {
      curve.push_back({hits / total, static_cast<double>(hits) / static_cast<double>(k + 1), scores[order[k]]});
    }
  }
  return curve;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DataError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_q(std::sqrt(ne) * d)};
}

Interval confidence_interval(std::span<const double> values) {
  require(!values.empty(), "confidence interval of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, mean, mean};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

std::string to_string(Target t) { return t == Target::kBeHot ? "be-hot" : "become-hot"; }

Target parse_target(const std::string& name) {
  if (name == "be-hot") return Target::kBeHot;
  if (name == "become-hot") return Target::kBecomeHot;
  throw ConfigError("unknown target '" + name + "'");
}

ExperimentGrid ExperimentGrid::published() {
  ExperimentGrid g;
  for (std::size_t t = 52; t <= 87; ++t) g.t.push_back(t);
  g.h = {1, 2, 3, 4, 5, 7, 8, 10, 12, 14, 16, 19, 22, 26, 29};
  g.w = {1, 2, 3, 5, 7, 10, 14, 21};
  g.models = models::all_models();
  g.targets = {Target::kBeHot};
  return g;
}

void ExperimentGrid::validate() const {
  require(!t.empty() && !h.empty() && !w.empty(), "grid needs t, h and w values");
  require(!models.empty() && !targets.empty(), "grid needs models and targets");
  for (auto v : w) require(v >= 1, "windows must be at least one day");
}

std::vector<double> GridResult::lifts(Target target, models::ModelKind model,
                                      std::size_t h, std::size_t w) const {
  std::vector<double> out;
  for (const auto& c : cells) {
    if (c.target == target && c.model == model && c.h == h && c.w == w) out.push_back(c.lift);
  }
  return out;
}

namespace {

features::Encoding encoding_for(models::ModelKind k, const GridOptions& o) {
  switch (k) {
    case models::ModelKind::kTree: return o.tree_encoding;
    case models::ModelKind::kRfRaw: return features::Encoding::kRaw;
    case models::ModelKind::kRfPercentile: return features::Encoding::kPercentile;
    case models::ModelKind::kRfHandcrafted: return features::Encoding::kHandcrafted;
    default: break;
  }
  throw ConfigError("model " + models::to_string(k) + " has no feature encoding");
}

struct Task {
  Target target;
  std::size_t t, h, w;
  models::ModelKind model;
};

struct Outcome {
  std::optional<CellResult> cell;
  std::string skip_reason;
};

}  // namespace

Matrix<double> design_matrix(const features::InputTensor& x, features::Encoding enc,
                             std::size_t end_day, std::size_t w) {
  const std::size_t n = x.x.dim0();
  Matrix<double> out(n, features::feature_count(enc, w, x.x.dim2()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = features::encode(enc, features::slice_window(x, i, end_day, w), x.layout);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

models::RandomForest fit_cell_forest(const core::ScoreSet& scores, const features::InputTensor& x,
                                     Target target, std::size_t t, std::size_t h, std::size_t w,
                                     features::Encoding enc, const models::ForestConfig& cfg) {
  const bool be_hot = target == Target::kBeHot;
  if (t >= scores.y_day.cols() || (!be_hot && !scores.y_become.is_labeled(t))) {
    throw DataError("training day " + std::to_string(t) + " is unlabeled");
  }
  if (t < h + w) throw DataError("training window precedes the data");
  const auto& labels = be_hot ? scores.y_day : scores.y_become.labels;
  std::vector<std::uint8_t> y(labels.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = labels(i, t);
  const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (ones == 0 || ones == y.size()) throw DataError("single-class training set on day " + std::to_string(t));
  return models::fit_forest(design_matrix(x, enc, t - h, w), y, cfg);
}

namespace {

class GridRunner {
 public:
  GridRunner(const core::ScoreSet& scores, const features::InputTensor& x,
             const GridOptions& options)
      : s_(scores), x_(x), o_(options), n_(x.x.dim0()), m_days_(scores.y_day.cols()) {
    require(scores.y_day.rows() == n_ && x.x.dim1() == m_days_ * kHoursPerDay,
            "scores and input tensor disagree in shape");
  }

  Outcome run(const Task& k) const {
    const auto& labels = k.target == Target::kBeHot ? s_.y_day : s_.y_become.labels;
    auto labeled = [&](std::size_t day) {
      return day < m_days_ && (k.target == Target::kBeHot || s_.y_become.is_labeled(day));
    };
    if (k.t < k.h + k.w || k.t + k.h >= m_days_) return skip("window or horizon outside the data");
    if (!labeled(k.t + k.h)) return skip("evaluation day is unlabeled");

    CellResult c;
    c.t = k.t;
    c.h = k.h;
    c.w = k.w;
    c.model = k.model;
    c.target = k.target;
    c.seed = derive_seed(o_.seed, static_cast<int>(k.target), k.t, k.h, k.w, static_cast<int>(k.model));

    std::vector<std::uint8_t> truth(n_);
    for (std::size_t i = 0; i < n_; ++i) truth[i] = labels(i, k.t + k.h);
    c.evaluated = n_;
    c.positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
    if (c.positives == 0) return skip("no positives on the evaluation day");

    const auto start = std::chrono::steady_clock::now();
    std::vector<double> score(n_);
    using models::ModelKind;
    switch (k.model) {
      case ModelKind::kRandom: {
        std::mt19937_64 rng(c.seed);
        for (auto& v : score) v = models::predict_random(rng);
        break;
      }
      case ModelKind::kPersist:
        for (std::size_t i = 0; i < n_; ++i) score[i] = labels(i, k.t);
        break;
      case ModelKind::kAverage:
        for (std::size_t i = 0; i < n_; ++i) score[i] = models::predict_average(s_.s_day, i, k.t, k.w);
        break;
      case ModelKind::kTrend:
        if (k.w < 2) return skip("trend needs w >= 2");
        for (std::size_t i = 0; i < n_; ++i) score[i] = models::predict_trend(s_.s_day, i, k.t, k.w);
        break;
      default: {
        if (!labeled(k.t)) return skip("training day is unlabeled");
        const auto enc = encoding_for(k.model, o_);
        if (k.w < features::min_window(enc)) return skip("window too short for the encoding");
        std::vector<std::uint8_t> y(n_);
        for (std::size_t i = 0; i < n_; ++i) y[i] = labels(i, k.t);
        const auto ones = std::count(y.begin(), y.end(), 1);
        if (ones == 0 || static_cast<std::size_t>(ones) == n_) return skip("single-class training set");
        const auto train = design(enc, k.t - k.h, k.w);
        const auto test = design(enc, k.t, k.w);
        if (k.model == ModelKind::kTree) {
          auto cfg = models::TreeConfig::single_tree();
          cfg.seed = c.seed;
          const auto tree = models::fit_tree(train, y, {}, cfg);
          for (std::size_t i = 0; i < n_; ++i) score[i] = tree.predict(test.row(i));
        } else {
          models::ForestConfig fc;
          fc.n_trees = o_.n_trees;
          fc.tree.seed = c.seed;
          const auto forest = models::fit_forest(train, y, fc);
          for (std::size_t i = 0; i < n_; ++i) score[i] = forest.predict(test.row(i));
        }
      }
    }
    c.psi = average_precision(score, truth);
    if (o_.reference == RandomReference::kAnalytic) {
      c.psi_random = expected_random_ap(n_, c.positives);
    } else {
      std::mt19937_64 rng(derive_seed(c.seed, 0x72616e64));
      std::vector<double> r(n_);
      for (auto& v : r) v = models::predict_random(rng);
      c.psi_random = average_precision(r, truth);
    }
    c.lift = lift(c.psi, c.psi_random);
    if (o_.timing) {
      c.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return {c, ""};
  }

 private:
  static Outcome skip(std::string reason) { return {std::nullopt, std::move(reason)}; }

  Matrix<double> design(features::Encoding enc, std::size_t end_day, std::size_t w) const {
    return design_matrix(x_, enc, end_day, w);
  }

  const core::ScoreSet& s_;
  const features::InputTensor& x_;
  GridOptions o_;
  std::size_t n_;
  std::size_t m_days_;
};

}  // namespace

GridResult run_grid(const core::ScoreSet& scores, const features::InputTensor& x,
                    const ExperimentGrid& grid, const GridOptions& options) {
  grid.validate();
  std::vector<Task> tasks;
  for (auto target : grid.targets)
    for (auto t : grid.t)
      for (auto h : grid.h)
        for (auto w : grid.w)
          for (auto m : grid.models) tasks.push_back({target, t, h, w, m});

  const GridRunner runner(scores, x, options);
  std::vector<Outcome> outcomes(tasks.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t q; (q = next.fetch_add(1)) < tasks.size();) outcomes[q] = runner.run(tasks[q]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t th = 0; th < threads; ++th) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  GridResult result;
  std::map<std::tuple<int, std::size_t, std::size_t, std::size_t>, double> reference;
  for (std::size_t q = 0; q < tasks.size(); ++q) {
    if (outcomes[q].cell) {
      const auto& c = *outcomes[q].cell;
      if (c.model == options.delta_reference) {
        reference[{static_cast<int>(c.target), c.t, c.h, c.w}] = c.lift;
      }
      result.cells.push_back(c);
    } else {
      const auto& k = tasks[q];
      result.skipped.push_back({k.t, k.h, k.w, k.model, k.target, outcomes[q].skip_reason});
    }
  }
  for (auto& c : result.cells) {
    const auto it = reference.find({static_cast<int>(c.target), c.t, c.h, c.w});
    if (it != reference.end() && it->second > 0.0) c.delta_vs = ratio(it->second, c.lift);
  }
  return result;
}

StabilityReport temporal_stability(const GridResult& result) {
  std::vector<std::size_t> ts;
  for (const auto& c : result.cells) ts.push_back(c.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  StabilityReport rep;
  const std::size_t half = ts.size() / 2;
  if (half == 0) return rep;
  const std::size_t first_end = ts[half - 1];
  const std::size_t second_begin = ts[ts.size() - half];

  using Key = std::tuple<int, int, std::size_t, std::size_t>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<Key> order;
  for (const auto& c : result.cells) {
    const Key key{static_cast<int>(c.target), static_cast<int>(c.model), c.h, c.w};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    if (c.t <= first_end) it->second.first.push_back(c.psi);
    if (c.t >= second_begin) it->second.second.push_back(c.psi);
  }
  std::size_t below1 = 0, below5 = 0;
  for (const auto& key : order) {
    const auto& [a, b] = groups[key];
    if (a.empty() || b.empty()) continue;
    StabilityRow row{static_cast<Target>(std::get<0>(key)),
                     static_cast<models::ModelKind>(std::get<1>(key)),
                     std::get<2>(key), std::get<3>(key), a.size(), b.size(), ks_two_sample(a, b)};
    below1 += row.ks.p_value < 0.01;
    below5 += row.ks.p_value < 0.05;
    rep.rows.push_back(row);
  }
  if (!rep.rows.empty()) {
    rep.fraction_below_001 = static_cast<double>(below1) / rep.rows.size();
    rep.fraction_below_005 = static_cast<double>(below5) / rep.rows.size();
  }
  return rep;
}

void write_jsonl(const GridResult& result, std::ostream& out) {
  for (const auto& c : result.cells) {
    nlohmann::ordered_json j;
    j["schema_version"] = kResultsSchemaVersion;
    j["t"] = c.t;
    j["h"] = c.h;
    j["w"] = c.w;
    j["model"] = models::to_string(c.model);
    j["target"] = to_string(c.target);
    j["psi"] = c.psi;
    j["lift"] = c.lift;
    j["delta_vs"] = c.delta_vs ? nlohmann::ordered_json(*c.delta_vs) : nlohmann::ordered_json(nullptr);
    j["seed"] = c.seed;
    j["runtime_ms"] = c.runtime_ms;
    j["psi_random"] = c.psi_random;
    j["positives"] = c.positives;
    j["evaluated"] = c.evaluated;
    out << j.dump() << '\n';
  }
}

GridResult read_jsonl(std::istream& in) {
  GridResult r;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.value("schema_version", kResultsSchemaVersion) != kResultsSchemaVersion) {
        throw DataError("results line " + std::to_string(lineno) + ": unsupported schema_version");
      }
      CellResult c;
      c.t = j.at("t").get<std::size_t>();
      c.h = j.at("h").get<std::size_t>();
      c.w = j.at("w").get<std::size_t>();
      c.model = models::parse_model(j.at("model").get<std::string>());
      c.target = parse_target(j.at("target").get<std::string>());
      c.psi = j.at("psi").get<double>();
      c.lift = j.at("lift").get<double>();
      if (!j.at("delta_vs").is_null()) c.delta_vs = j.at("delta_vs").get<double>();
      c.seed = j.at("seed").get<std::uint64_t>();
      c.runtime_ms = j.at("runtime_ms").get<double>();
      c.psi_random = j.value("psi_random", 0.0);
      c.positives = j.value("positives", std::size_t{0});
      c.evaluated = j.value("evaluated", std::size_t{0});
      r.cells.push_back(c);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("results line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw DataError("results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return r;
}

}  // namespace hotspot::eval
