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

// Exploratory statistics of hot spot labels: duty cycles, run lengths,
// weekly patterns, weekly consistency and spatial correlation.

#ifndef HOTSPOT_DYNAMICS_H_
#define HOTSPOT_DYNAMICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspot/core.h"

namespace hotspot::dynamics {

// counts[v] = number of observations with value v.
struct Histogram {
  std::vector<double> counts;

  double total() const;
  std::vector<double> frequencies() const;
};

struct DutyHistograms {
  Histogram hours_per_day;    // bins 0..24, one observation per sector-day
  Histogram days_per_week;    // bins 0..7, one per sector-week
  Histogram weeks_per_sector; // bins 0..m_weeks, one per sector
};

DutyHistograms duty_histograms(const BoolMatrix& y_hour, const BoolMatrix& y_day,
                               const BoolMatrix& y_week);

// Maximal runs of hot periods, keyed by length. A run cut by the end of the
// series counts at its observed (truncated) length.
using RunLengths = std::map<std::size_t, std::size_t>;

struct RunLengthHistograms {
  RunLengths hours;
  RunLengths days;
};

RunLengths run_lengths(const BoolMatrix& labels);
RunLengthHistograms run_length_histograms(const BoolMatrix& y_hour, const BoolMatrix& y_day);

// Seven-letter pattern, Monday first: "MTWTF--".
std::string pattern_string(std::uint8_t bits);

struct PatternShare {
  std::uint8_t bits = 0;  // bit d set when weekday d (Monday = 0) is hot
  std::size_t count = 0;
  double share = 0.0;     // percent of the normalizing total
};

// Counts the pattern of every whole week (days 7j..7j+6) of every sector.
// `first_weekday` is the weekday of day 0. Patterns are ranked by count,
// ties by bit value. With `exclude_never_hot` the all-cold pattern is left
// out of both the table and the normalization.
std::vector<PatternShare> weekly_pattern_census(const BoolMatrix& y_day,
                                                std::size_t first_weekday = 0,
                                                bool exclude_never_hot = true);

// Pearson correlation; nullopt when either series is constant.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double p5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
};

Summary summarize(std::vector<double> values);

struct ConsistencyResult {
  std::vector<double> per_sector;  // NaN for excluded sectors
  std::size_t excluded_sectors = 0;
  Summary summary;                 // over the included sectors
};

// For every sector, the mean Pearson correlation between each week's 7-day
// label vector and the sector's average week. Constant weeks are skipped;
// sectors with no usable week are excluded.
ConsistencyResult weekly_consistency(const BoolMatrix& y_day);

// Bucket 0 holds distance 0 (same tower); bucket b >= 1 holds
// [edges[b - 1], edges[b]).
struct DistanceBuckets {
  std::vector<double> edges;

  // Logarithmic edges from 0.05 km to 50 km, 10 buckets.
  static DistanceBuckets logarithmic(double lo = 0.05, double hi = 50.0, std::size_t count = 10);
  std::size_t size() const { return edges.size() - 1; }  // including the 0 km bucket
  std::optional<std::size_t> bucket(double distance_km) const;
  std::string label(std::size_t b) const;
  void validate() const;
};

enum class SpatialMode { kAvgNearest, kMaxNearest, kMaxTopCorrelated };

std::string to_string(SpatialMode m);
SpatialMode parse_spatial_mode(const std::string& name);

struct SpatialConfig {
  SpatialMode mode = SpatialMode::kAvgNearest;
  std::size_t neighbors = 500;       // nearest-neighbour modes; capped at n - 1
  std::size_t top_correlated = 100;  // top-correlated mode; capped at n - 1
  DistanceBuckets buckets = DistanceBuckets::logarithmic();
  std::size_t threads = 1;
};

struct BoxStats {
  std::size_t count = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

struct SpatialResult {
  DistanceBuckets buckets;
  std::vector<std::vector<double>> per_sector;  // [bucket] -> one value per sector that has pairs there
  std::vector<BoxStats> stats;                  // per bucket
  std::size_t assigned = 0;           // pair correlations placed in a bucket
  std::size_t out_of_range = 0;       // pairs whose distance fits no bucket
  std::size_t undefined = 0;          // pairs involving a constant series
};

// Pairs each sector with its selected partners (nearest by distance, ties by
// index, or most correlated anywhere), drops the pairs whose correlation is
// undefined, buckets the rest by distance and reduces them per sector and
// bucket by mean or maximum.
SpatialResult spatial_correlation(const BoolMatrix& y_hour,
                                  const std::vector<core::Coordinates>& coords,
                                  const SpatialConfig& cfg);

}  // namespace hotspot::dynamics

#endif  // HOTSPOT_DYNAMICS_H_
