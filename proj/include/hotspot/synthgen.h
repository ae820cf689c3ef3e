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

// Seeded generator of synthetic sector telemetry.
//
// Every sector follows a latent day-level hotness sequence built from weekly
// patterns, optional persistent hotness and emerging failures. KPIs are
// expressed as multiples of their own threshold: cold hours stay below the
// threshold, hot hours push the "hot subset" of KPIs above it. Emerging
// failures are preceded by a slow, sub-threshold ramp of the interference
// KPIs.

#ifndef HOTSPOT_SYNTHGEN_H_
#define HOTSPOT_SYNTHGEN_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hotspot/common.h"
#include "hotspot/core.h"

namespace hotspot::synth {

// Seven hot/cold bits, bit 0 = Monday.
class WeeklyPattern {
 public:
  static constexpr int kCount = 128;

  constexpr WeeklyPattern() = default;
  constexpr explicit WeeklyPattern(std::uint8_t bits) : bits_(bits & 0x7f) {}

  // "MTWTF--" style, hyphen = not hot.
  static WeeklyPattern parse(const std::string& text);
  std::string to_string() const;

  bool hot(int day_of_week) const { return (bits_ >> day_of_week) & 1u; }
  std::uint8_t bits() const { return bits_; }
  bool never_hot() const { return bits_ == 0; }
  int hot_days() const;

  friend bool operator==(WeeklyPattern, WeeklyPattern) = default;
  friend auto operator<=>(WeeklyPattern, WeeklyPattern) = default;

 private:
  std::uint8_t bits_ = 0;
};

// Probability per weekly pattern.
class PatternMix {
 public:
  PatternMix() = default;
  explicit PatternMix(std::vector<std::pair<WeeklyPattern, double>> entries);

  // Top weekly patterns and their shares among non-never-hot weeks as
  // published for a national operator; the remaining share is spread
  // uniformly over the unlisted patterns.
  static PatternMix table_default(double never_hot_probability = 0.70);

  double probability(WeeklyPattern p) const { return probs_[p.bits()]; }
  const std::array<double, WeeklyPattern::kCount>& probabilities() const {
    return probs_;
  }
  void validate() const;

 private:
  std::array<double, WeeklyPattern::kCount> probs_{};
};

// Listed shares (percent of non-never-hot weeks), ranks 2 to 20.
const std::vector<std::pair<std::string, double>>& published_top_patterns();

WeeklyPattern sample_weekly_pattern(const PatternMix& mix, std::mt19937_64& rng);

enum class KpiGroup { kUsage, kCongestion, kInterference, kGeneral };
std::string to_string(KpiGroup g);
KpiGroup kpi_group(std::size_t k);

struct MissingnessConfig {
  double point_rate = 0.015;
  double row_rate = 0.01;
  // Per sector-hour probability that a multi-hour all-KPI gap starts.
  double slice_start_rate = 0.0012;
  double slice_mean_length = 12.0;
  // Sectors that also receive a long outage, enough to fail sector filtering.
  double outage_sector_fraction = 0.0;

  static MissingnessConfig none();
  // Expected missing fraction before overlaps.
  double expected_fraction() const;
  void validate() const;
};

struct GeneratorConfig {
  std::size_t n_sectors = 200;
  std::size_t m_weeks = 18;
  std::size_t l_kpis = 21;
  PatternMix weekly_pattern_mix = PatternMix::table_default();
  // Probability that a week repeats the sector's assigned pattern instead of
  // a fresh draw from the mix.
  double pattern_consistency = 0.8;
  double persistent_hot_fraction = 0.03;
  double emerging_failure_rate = 0.5;
  std::size_t emerging_min_days = 7;
  std::size_t emerging_max_days = 28;
  std::size_t precursor_days = 21;
  std::size_t sectors_per_tower = 3;
  double tower_grid_km = 1.0;
  // Probability that a sector replicates the hotness of its tower's first
  // sector.
  double tower_share = 0.5;
  std::array<double, kHoursPerDay> daily_shape = default_daily_shape();
  double noise_std = 0.05;
  MissingnessConfig missingness;
  double hot_threshold = 0.6;
  std::string start_date = "2015-11-30";
  std::vector<std::string> holidays = {"2015-12-08", "2015-12-25",
                                       "2016-01-01", "2016-01-06",
                                       "2016-03-25", "2016-03-28"};
  std::uint64_t seed = 1;

  static std::array<double, kHoursPerDay> default_daily_shape();
  void validate() const;
};

struct EmergingEvent {
  std::size_t sector = 0;
  std::size_t onset_day = 0;
  std::size_t duration_days = 0;
  friend bool operator==(const EmergingEvent&, const EmergingEvent&) = default;
};

struct GroundTruth {
  BoolMatrix latent_hotness;  // n x m_days
  std::vector<WeeklyPattern> assigned_pattern;
  std::vector<std::uint8_t> persistent;
  std::vector<EmergingEvent> emerging_events;
  std::vector<KpiGroup> kpi_groups;
};

struct GeneratedData {
  core::KpiDataset dataset;
  GroundTruth truth;
  core::ScoringConfig scoring;
  double missing_fraction = 0.0;
};

GeneratedData generate_dataset(const GeneratorConfig& cfg);

// Marks points, hour slices (i, j, :) and temporal slices (i, j:j+t, :) as
// missing. Returns the overall missing fraction.
double inject_missing(core::KpiDataset& data, const MissingnessConfig& cfg,
                      std::mt19937_64& rng);

}  // namespace hotspot::synth

#endif  // HOTSPOT_SYNTHGEN_H_
