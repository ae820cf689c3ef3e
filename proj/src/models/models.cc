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

#include "hotspot/models.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "hotspot/binary_io.h"
#include "hotspot/core.h"

namespace hotspot::models {

namespace {

struct ModelName {
  ModelKind kind;
  const char* name;
};

constexpr ModelName kNames[] = {
    {ModelKind::kRandom, "Random"}, {ModelKind::kPersist, "Persist"},
    {ModelKind::kAverage, "Average"}, {ModelKind::kTrend, "Trend"},
    {ModelKind::kTree, "Tree"}, {ModelKind::kRfRaw, "RF-R"},
    {ModelKind::kRfPercentile, "RF-F1"}, {ModelKind::kRfHandcrafted, "RF-F2"},
};

}  // namespace

std::string to_string(ModelKind k) {
  for (const auto& n : kNames) {
    if (n.kind == k) return n.name;
  }
  return "?";
}

ModelKind parse_model(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.kind;
  }
  throw ConfigError("unknown model '" + name + "'");
}

const std::vector<ModelKind>& all_models() {
  static const std::vector<ModelKind> all = [] {
    std::vector<ModelKind> v;
    for (const auto& n : kNames) v.push_back(n.kind);
    return v;
  }();
  return all;
}

bool is_classifier(ModelKind k) {
  return k == ModelKind::kTree || k == ModelKind::kRfRaw ||
         k == ModelKind::kRfPercentile || k == ModelKind::kRfHandcrafted;
}

double predict_random(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double predict_persist(const BoolMatrix& y_day, std::size_t i, std::size_t t) {
  require(i < y_day.rows() && t < y_day.cols(), "persist index out of range");
  return y_day(i, t);
}

double predict_average(const Matrix<double>& s_day, std::size_t i, std::size_t t,
                       std::size_t w) {
  require(i < s_day.rows() && t < s_day.cols(), "average index out of range");
  return core::windowed_mean(t, w, s_day.row(i));
}

double predict_trend(const Matrix<double>& s_day, std::size_t i, std::size_t t,
                     std::size_t w) {
  require(w >= 2, "trend needs a window of at least two days");
  const std::size_t k = w / 2;
  require(t + 1 >= 2 * k, "trend window reaches before the first day");
  const auto row = s_day.row(i);
  const double slope =
      (core::windowed_mean(t, k, row) - core::windowed_mean(t - k, k, row)) /
      static_cast<double>(k);
  return predict_average(s_day, i, t, w) + slope;
}

TreeConfig TreeConfig::single_tree() { return TreeConfig{}; }

TreeConfig TreeConfig::forest_tree() {
  TreeConfig c;
  c.sqrt_features = true;
  c.min_weight_fraction = 0.0002;
  return c;
}

std::size_t TreeConfig::features_per_split(std::size_t p) const {
  const double k = sqrt_features ? std::sqrt(static_cast<double>(p))
                                 : feature_fraction * static_cast<double>(p);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(k + 1e-9)), 1, std::max<std::size_t>(p, 1));
}

void TreeConfig::validate() const {
  require(feature_fraction > 0.0 && feature_fraction <= 1.0, "feature fraction must lie in (0, 1]");
  require(min_weight_fraction > 0.0 && min_weight_fraction < 1.0,
          "minimum weight fraction must lie in (0, 1)");
}

void ForestConfig::validate() const {
  require(n_trees >= 1, "a forest needs at least one tree");
  tree.validate();
}

double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  return 1.0 - (w0 * w0 + w1 * w1) / (w * w);
}

std::vector<double> balanced_weights(const std::vector<std::uint8_t>& labels) {
  const double n = static_cast<double>(labels.size());
  const double n1 = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
  const double n0 = n - n1;
  if (n0 == 0.0 || n1 == 0.0) throw DataError("class balancing needs both classes");
  std::vector<double> w(labels.size());
  for (std::size_t s = 0; s < labels.size(); ++s) w[s] = n / (2.0 * (labels[s] ? n1 : n0));
  return w;
}

double DecisionTree::predict(std::span<const double> x) const {
  require(x.size() == n_features, "feature vector has the wrong length");
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const Node& nd = nodes[id];
    id = static_cast<std::size_t>(x[nd.feature] <= nd.threshold ? nd.left : nd.right);
  }
  return nodes[id].probability();
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    best = std::max(best, d[id]);
    if (!nodes[id].is_leaf()) {
      d[nodes[id].left] = d[id] + 1;
      d[nodes[id].right] = d[id] + 1;
    }
  }
  return best;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix<double>& x, const std::vector<std::uint8_t>& y,
              const std::vector<double>& w, const TreeConfig& cfg)
      : x_(x), y_(y), w_(w), cfg_(cfg), rng_(cfg.seed), p_(x.cols()),
        k_(cfg.features_per_split(x.cols())), order_(x.cols()) {
    std::iota(order_.begin(), order_.end(), 0);
    tree_.n_features = p_;
    tree_.importance.assign(p_, 0.0);
  }

  DecisionTree build() {
    std::vector<std::size_t> all;
    for (std::size_t s = 0; s < y_.size(); ++s) {
      if (w_[s] > 0.0) all.push_back(s);
    }
    root_weight_ = 0.0;
    for (auto s : all) root_weight_ += w_[s];
    grow(all);
    return std::move(tree_);
  }

 private:
  struct Item {
    double v;
    double w;
    std::uint8_t y;
  };

  int grow(const std::vector<std::size_t>& idx) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double w0 = 0.0, w1 = 0.0;
    for (auto s : idx) (y_[s] ? w1 : w0) += w_[s];
    tree_.nodes[id].weight0 = w0;
    tree_.nodes[id].weight1 = w1;
    const double W = w0 + w1;
    if (w0 == 0.0 || w1 == 0.0 || W < cfg_.min_weight_fraction * root_weight_ || idx.size() < 2) {
      return id;
    }

    // Fresh feature subset, examined in index order.
    for (std::size_t s = 0; s < k_; ++s) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(s, p_ - 1)(rng_);
      std::swap(order_[s], order_[r]);
    }
    std::vector<std::size_t> feats(order_.begin(), order_.begin() + k_);
    std::sort(feats.begin(), feats.end());

    const double parent_cost = W * gini(w0, w1);
    const double tol = 1e-12 * W;
    double best_cost = parent_cost - tol;
    int best_f = -1;
    double best_thr = 0.0;
    std::vector<Item> items(idx.size());
    for (std::size_t f : feats) {
      for (std::size_t q = 0; q < idx.size(); ++q) items[q] = {x_(idx[q], f), w_[idx[q]], y_[idx[q]]};
      std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
      if (items.front().v == items.back().v) continue;
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t q = 0; q + 1 < items.size(); ++q) {
        (items[q].y ? l1 : l0) += items[q].w;
        if (items[q].v == items[q + 1].v) continue;
        const double r0 = w0 - l0, r1 = w1 - l1;
        const double cost = (l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1);
        if (cost < best_cost - (best_f < 0 ? 0.0 : tol)) {
          best_cost = cost;
          best_f = static_cast<int>(f);
          double thr = 0.5 * (items[q].v + items[q + 1].v);
          if (!(thr < items[q + 1].v)) thr = items[q].v;
          best_thr = thr;
        }
      }
    }
    if (best_f < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto s : idx) (x_(s, best_f) <= best_thr ? left : right).push_back(s);
    tree_.importance[best_f] += parent_cost - best_cost;
    tree_.nodes[id].feature = best_f;
    tree_.nodes[id].threshold = best_thr;
    const int l = grow(left);
    tree_.nodes[id].left = l;
    const int r = grow(right);
    tree_.nodes[id].right = r;
    return id;
  }

  const Matrix<double>& x_;
  const std::vector<std::uint8_t>& y_;
  const std::vector<double>& w_;
  TreeConfig cfg_;
  std::mt19937_64 rng_;
  std::size_t p_;
  std::size_t k_;
  std::vector<std::size_t> order_;
  double root_weight_ = 0.0;
  DecisionTree tree_;
};

bool both_classes(const std::vector<std::uint8_t>& y) {
  const auto n1 = std::count_if(y.begin(), y.end(), [](auto v) { return v != 0; });
  return n1 > 0 && static_cast<std::size_t>(n1) < y.size();
}

}  // namespace

DecisionTree fit_tree(const Matrix<double>& x, const std::vector<std::uint8_t>& y,
                      std::vector<double> weights, const TreeConfig& cfg) {
  cfg.validate();
  if (x.rows() == 0 || x.cols() == 0) throw ConfigError("empty training set");
  require(y.size() == x.rows(), "label count does not match the feature rows");
  if (weights.empty()) weights.assign(y.size(), 1.0);
  require(weights.size() == y.size(), "weight count does not match the labels");
  if (cfg.balanced && both_classes(y)) {
    const auto bw = balanced_weights(y);
    for (std::size_t s = 0; s < y.size(); ++s) weights[s] *= bw[s];
  }
  return TreeBuilder(x, y, weights, cfg).build();
}

double RandomForest::predict(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

RandomForest fit_forest(const Matrix<double>& x, const std::vector<std::uint8_t>& y,
                        const ForestConfig& cfg) {
  cfg.validate();
  if (x.rows() == 0 || x.cols() == 0) throw ConfigError("empty training set");
  require(y.size() == x.rows(), "label count does not match the feature rows");
  // Class balancing uses the full training set; bootstrap counts multiply it.
  std::vector<double> base(y.size(), 1.0);
  if (cfg.tree.balanced && both_classes(y)) base = balanced_weights(y);

  RandomForest forest;
  forest.n_features = x.cols();
  forest.trees.resize(cfg.n_trees);
  auto fit_one = [&](std::size_t b) {
    TreeConfig tc = cfg.tree;
    tc.seed = derive_seed(cfg.tree.seed, b);
    tc.balanced = false;
    std::vector<double> w = base;
    if (cfg.bootstrap) {
      std::mt19937_64 rng(derive_seed(tc.seed, 0x626f6f74));
      std::vector<double> count(y.size(), 0.0);
      std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
      for (std::size_t s = 0; s < y.size(); ++s) count[pick(rng)] += 1.0;
      for (std::size_t s = 0; s < y.size(); ++s) w[s] *= count[s];
    }
    forest.trees[b] = fit_tree(x, y, std::move(w), tc);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.n_trees));
  if (threads == 1) {
    for (std::size_t b = 0; b < cfg.n_trees; ++b) fit_one(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b; (b = next.fetch_add(1)) < cfg.n_trees;) fit_one(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  return forest;
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0.0) {
    std::fill(v.begin(), v.end(), v.empty() ? 0.0 : 1.0 / static_cast<double>(v.size()));
  } else {
    for (double& x : v) x /= total;
  }
  return v;
}

}  // namespace

std::vector<double> feature_importance(const DecisionTree& tree) {
  return normalized(tree.importance);
}

std::vector<double> feature_importance(const RandomForest& forest) {
  std::vector<double> sum(forest.n_features, 0.0);
  for (const auto& t : forest.trees) {
    for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += t.importance[f];
  }
  return normalized(std::move(sum));
}

Matrix<double> importance_by_lag(const std::vector<double>& importance,
                                 std::size_t channels) {
  return features::unflatten_raw(importance, channels);
}

std::vector<double> importance_by_channel(const std::vector<double>& importance,
                                          std::size_t channels) {
  const auto m = importance_by_lag(importance, channels);
  std::vector<double> out(channels, 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < channels; ++c) out[c] += m(r, c);
  return out;
}

namespace {
constexpr char kMagic[] = "HSRF";
constexpr std::uint32_t kVersion = 1;
}  // namespace

// Layout (little-endian): magic "HSRF", u32 version, u64 n_features,
// u64 n_trees, then per tree: u64 node count, per node {u64 feature + 1
// (0 = leaf), f64 threshold, u64 left + 1, u64 right + 1, f64 weight0,
// f64 weight1}, then f64s importance.
void save_forest(const RandomForest& forest, std::ostream& out) {
  io::BinaryWriter w(out);
  w.header(kMagic, kVersion);
  w.u64(forest.n_features);
  w.u64(forest.trees.size());
  for (const auto& t : forest.trees) {
    w.u64(t.nodes.size());
    for (const auto& n : t.nodes) {
      w.u64(static_cast<std::uint64_t>(n.feature + 1));
      w.f64(n.threshold);
      w.u64(static_cast<std::uint64_t>(n.left + 1));
      w.u64(static_cast<std::uint64_t>(n.right + 1));
      w.f64(n.weight0);
      w.f64(n.weight1);
    }
    w.f64s(t.importance);
  }
}

RandomForest load_forest(std::istream& in) {
  io::BinaryReader r(in);
  const auto version = r.header(kMagic);
  if (version != kVersion) throw DataError("unsupported forest file version " + std::to_string(version));
  RandomForest f;
  f.n_features = r.u64();
  const std::uint64_t n_trees = r.u64();
  if (n_trees > (1u << 24)) throw DataError("corrupt forest file: tree count");
  for (std::uint64_t b = 0; b < n_trees; ++b) {
    DecisionTree t;
    t.n_features = f.n_features;
    const std::uint64_t n_nodes = r.u64();
    if (n_nodes == 0 || n_nodes > (1u << 26)) throw DataError("corrupt forest file: node count");
    t.nodes.resize(n_nodes);
    for (auto& n : t.nodes) {
      n.feature = static_cast<int>(r.u64()) - 1;
      n.threshold = r.f64();
      n.left = static_cast<int>(r.u64()) - 1;
      n.right = static_cast<int>(r.u64()) - 1;
      n.weight0 = r.f64();
      n.weight1 = r.f64();
      const bool leaf = n.feature < 0;
      if (!leaf && (static_cast<std::size_t>(n.feature) >= f.n_features || n.left <= 0 || n.right <= 0 ||
                    static_cast<std::uint64_t>(n.left) >= n_nodes ||
                    static_cast<std::uint64_t>(n.right) >= n_nodes)) {
        throw DataError("corrupt forest file: node links");
      }
    }
    t.importance = r.f64s();
    if (t.importance.size() != f.n_features) throw DataError("corrupt forest file: importance size");
    f.trees.push_back(std::move(t));
  }
  return f;
}

}  // namespace hotspot::models
