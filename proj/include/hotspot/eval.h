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

// Ranking metrics, the forecasting experiment grid and the temporal
// stability test.

#ifndef HOTSPOT_EVAL_H_
#define HOTSPOT_EVAL_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspot/core.h"
#include "hotspot/features.h"
#include "hotspot/models.h"

namespace hotspot::eval {

// Mean over the positives of the precision at their rank. Items are ranked
// by descending score; equal scores keep their input order. Throws
// DataError when there is no positive.
double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels);

// Expected average precision of a uniformly random ranking of n items with
// r positives: (H_n + (r - 1)(n - H_n) / (n - 1)) / n.
double expected_random_ap(std::size_t n, std::size_t r);

double lift(double psi_model, double psi_random);
// Percentage by which lift_j exceeds lift_i: 100 (lift_j / lift_i - 1).
double ratio(double lift_i, double lift_j);

struct PrPoint {
  double recall;
  double precision;
  double threshold;
};

// One point per distinct score, from the highest threshold down.
std::vector<PrPoint> precision_recall_curve(std::span<const double> scores,
                                            std::span<const std::uint8_t> labels);

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// D = sup |F_a - F_b|; p = Q(sqrt(n_a n_b / (n_a + n_b)) D).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Interval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// mean +- 1.96 s / sqrt(n) with the sample standard deviation s.
Interval confidence_interval(std::span<const double> values);

enum class Target { kBeHot, kBecomeHot };
std::string to_string(Target t);  // "be-hot", "become-hot"
Target parse_target(const std::string& name);

enum class RandomReference { kAnalytic, kSampled };

struct ExperimentGrid {
  std::vector<std::size_t> t;
  std::vector<std::size_t> h;
  std::vector<std::size_t> w;
  std::vector<models::ModelKind> models;
  std::vector<Target> targets;

  // t in 52..87, the published horizons and windows, all models, be-hot.
  static ExperimentGrid published();
  void validate() const;
};

struct GridOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t n_trees = 100;
  features::Encoding tree_encoding = features::Encoding::kRaw;
  RandomReference reference = RandomReference::kAnalytic;
  models::ModelKind delta_reference = models::ModelKind::kAverage;
  bool timing = false;  // record wall time; off keeps output byte-stable
};

struct CellResult {
  std::size_t t = 0, h = 0, w = 0;
  models::ModelKind model = models::ModelKind::kRandom;
  Target target = Target::kBeHot;
  double psi = 0.0;
  double psi_random = 0.0;
  double lift = 0.0;
  std::optional<double> delta_vs;  // vs GridOptions::delta_reference
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
  std::size_t positives = 0;
  std::size_t evaluated = 0;
};

struct SkippedCell {
  std::size_t t = 0, h = 0, w = 0;
  models::ModelKind model = models::ModelKind::kRandom;
  Target target = Target::kBeHot;
  std::string reason;
};

struct GridResult {
  std::vector<CellResult> cells;
  std::vector<SkippedCell> skipped;

  // Lifts across t for one (target, model, h, w); empty when absent.
  std::vector<double> lifts(Target target, models::ModelKind model, std::size_t h,
                            std::size_t w) const;
};

// Per cell: trains on the windows ending at t - h with the target labels at
// t (one instance per sector), forecasts from the windows ending at t and
// scores against the labels at t + h. Baselines read the present day t.
// Cells outside the data, without positives, or whose training labels have
// a single class are reported in `skipped`. Output order and values do not
// depend on `threads`.
GridResult run_grid(const core::ScoreSet& scores, const features::InputTensor& x,
                    const ExperimentGrid& grid, const GridOptions& options);

// One row per sector: the encoded window ending at `end_day`.
Matrix<double> design_matrix(const features::InputTensor& x, features::Encoding enc,
                             std::size_t end_day, std::size_t w);

// The forest a random forest cell trains: windows ending at t - h, target
// labels at t. Throws DataError when day t is unlabeled or single-class.
models::RandomForest fit_cell_forest(const core::ScoreSet& scores, const features::InputTensor& x,
                                     Target target, std::size_t t, std::size_t h, std::size_t w,
                                     features::Encoding enc, const models::ForestConfig& cfg);

struct StabilityRow {
  Target target;
  models::ModelKind model;
  std::size_t h = 0, w = 0;
  std::size_t n_a = 0, n_b = 0;
  KsResult ks;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double fraction_below_001 = 0.0;
  double fraction_below_005 = 0.0;
};

// Splits the distinct t values into an earlier and a later half of equal
// size (the middle value is dropped when their count is odd) and compares
// the psi distributions of every (target, model, h, w) with a KS test.
StabilityReport temporal_stability(const GridResult& result);

inline constexpr int kResultsSchemaVersion = 1;

// One JSON object per line, in cell order, each tagged with schema_version.
void write_jsonl(const GridResult& result, std::ostream& out);
GridResult read_jsonl(std::istream& in);

}  // namespace hotspot::eval

#endif  // HOTSPOT_EVAL_H_
