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

// Forecasting models: four baselines and CART / random-forest classifiers.

#ifndef HOTSPOT_MODELS_H_
#define HOTSPOT_MODELS_H_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "hotspot/common.h"
#include "hotspot/features.h"

namespace hotspot::models {

enum class ModelKind { kRandom, kPersist, kAverage, kTrend, kTree, kRfRaw, kRfPercentile, kRfHandcrafted };

std::string to_string(ModelKind k);  // "Random", ..., "RF-R", "RF-F1", "RF-F2"
ModelKind parse_model(const std::string& name);
const std::vector<ModelKind>& all_models();
bool is_classifier(ModelKind k);

// --- Baselines. `t` is the present day; none of them depends on the horizon.

double predict_random(std::mt19937_64& rng);
double predict_persist(const BoolMatrix& y_day, std::size_t i, std::size_t t);
// windowed_mean(t, w, S[i]).
double predict_average(const Matrix<double>& s_day, std::size_t i, std::size_t t,
                       std::size_t w);
// Average plus the slope between the two most recent half windows of
// k = floor(w / 2) days: mu(t, k) - mu(t - k, k), divided by k. Needs w >= 2
// and t >= 2k - 1.
double predict_trend(const Matrix<double>& s_day, std::size_t i, std::size_t t,
                     std::size_t w);

// --- Trees.

struct TreeConfig {
  // Features examined per split: max(1, floor(fraction * p)), or
  // max(1, floor(sqrt(p))) when sqrt_features is set.
  double feature_fraction = 0.8;
  bool sqrt_features = false;
  // Nodes lighter than this fraction of the root weight become leaves.
  double min_weight_fraction = 0.02;
  bool balanced = true;
  std::uint64_t seed = 0;

  static TreeConfig single_tree();
  static TreeConfig forest_tree();
  std::size_t features_per_split(std::size_t p) const;
  void validate() const;
};

struct Node {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double weight0 = 0.0;  // class weight totals reaching the node
  double weight1 = 0.0;

  bool is_leaf() const { return feature < 0; }
  double probability() const {
    const double w = weight0 + weight1;
    return w > 0.0 ? weight1 / w : 0.0;
  }
  friend bool operator==(const Node&, const Node&) = default;
};

struct DecisionTree {
  std::vector<Node> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;
  std::vector<double> importance;  // unnormalized weighted impurity decrease

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

// Class c gets weight N / (2 n_c), so the weights sum to N. Throws DataError
// when only one class is present.
std::vector<double> balanced_weights(const std::vector<std::uint8_t>& labels);

double gini(double w0, double w1);

// Split candidates are midpoints between consecutive distinct values. Among
// splits with equal child impurity (within 1e-12) the lower feature index,
// then the lower threshold, wins. A node is split only when that strictly
// lowers impurity. `weights` empty means unit weights (before balancing).
DecisionTree fit_tree(const Matrix<double>& x, const std::vector<std::uint8_t>& y,
                      std::vector<double> weights, const TreeConfig& cfg);

struct ForestConfig {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  TreeConfig tree = TreeConfig::forest_tree();
  std::size_t threads = 1;

  void validate() const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;

  // Mean of the tree probabilities.
  double predict(std::span<const double> x) const;
  friend bool operator==(const RandomForest&, const RandomForest&) = default;
};

// Tree b draws its bootstrap sample and split features from
// derive_seed(cfg.tree.seed, b), so results do not depend on `threads`.
RandomForest fit_forest(const Matrix<double>& x, const std::vector<std::uint8_t>& y,
                        const ForestConfig& cfg);

// Gini importance summed over all trees and normalized to sum to 1 (uniform
// if no tree has a split).
std::vector<double> feature_importance(const DecisionTree& tree);
std::vector<double> feature_importance(const RandomForest& forest);

// Raw-encoding importances as a (24 w) x channels matrix, row 0 the oldest
// hour, and summed per channel.
Matrix<double> importance_by_lag(const std::vector<double>& importance,
                                 std::size_t channels);
std::vector<double> importance_by_channel(const std::vector<double>& importance,
                                          std::size_t channels);

void save_forest(const RandomForest& forest, std::ostream& out);
RandomForest load_forest(std::istream& in);

}  // namespace hotspot::models

#endif  // HOTSPOT_MODELS_H_
