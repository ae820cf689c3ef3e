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

// The forecasting input tensor and the three feature encodings fed to the
// classifiers. Column layouts are documented in docs/features.md.

#ifndef HOTSPOT_FEATURES_H_
#define HOTSPOT_FEATURES_H_

#include <cstddef>
#include <string>
#include <vector>

#include "hotspot/core.h"

namespace hotspot::features {

enum class ChannelKind { kKpi, kCalendar, kHourlyScore, kDailyScore, kWeeklyScore, kDailyLabel };

struct Channel {
  ChannelKind kind;
  std::size_t index;  // KPI id or calendar column; 0 otherwise
  std::string name;
};

// Maps the channel axis of the input tensor to its sources, in order:
// l KPIs, 5 calendar columns, hourly score, daily score, weekly score,
// daily label.
class FeatureLayout {
 public:
  explicit FeatureLayout(std::size_t l_kpis = 0);

  std::size_t l_kpis() const { return l_; }
  std::size_t channels() const { return channels_.size(); }
  const Channel& channel(std::size_t c) const { return channels_.at(c); }

  std::size_t calendar(core::CalendarColumn col) const { return l_ + col; }
  std::size_t hourly_score() const { return l_ + 5; }
  std::size_t daily_score() const { return l_ + 6; }
  std::size_t weekly_score() const { return l_ + 7; }
  std::size_t daily_label() const { return l_ + 8; }

 private:
  std::size_t l_;
  std::vector<Channel> channels_;
};

struct InputTensor {
  Tensor3<double> x;  // n x m_hours x (l + 9)
  FeatureLayout layout;
};

// Stacks KPIs, the calendar (repeated for every sector) and the scores and
// daily labels, each coarse series repeated over the hours of its block.
InputTensor assemble_input_tensor(const core::KpiDataset& data,
                                  const core::ScoreSet& scores);

// Hours [24 (t - w + 1), 24 (t + 1)) of sector i: the w days ending with day
// t. Requires 1 <= w <= t and t < m_days.
Matrix<double> slice_window(const InputTensor& x, std::size_t sector,
                            std::size_t end_day, std::size_t w);

// Hour-major, channel-minor flattening.
std::vector<double> raw_features(const Matrix<double>& window);
Matrix<double> unflatten_raw(const std::vector<double>& v, std::size_t channels);

inline constexpr double kPercentiles[] = {5.0, 25.0, 50.0, 75.0, 95.0};

// Linear interpolation between closest ranks: position p/100 * (n - 1) in
// the sorted values.
double percentile(std::vector<double> values, double p);

// [day][channel][percentile], 5 w C values.
std::vector<double> percentile_features(const Matrix<double>& window);

inline constexpr std::size_t kHandcraftedPerChannel = 137;

// Per-channel summary statistics and profiles (137 values per channel,
// ordered as in docs/features.md) followed by one flag that is 1 when the
// window has fewer than 7 days and the weekday blocks fell back to the mean
// day. Needs at least two days.
std::vector<double> handcrafted_features(const Matrix<double>& window,
                                         const FeatureLayout& layout);

enum class Encoding { kRaw, kPercentile, kHandcrafted };

std::string to_string(Encoding e);
Encoding parse_encoding(const std::string& name);
std::size_t feature_count(Encoding e, std::size_t w, std::size_t channels);
// Smallest window the encoding accepts.
std::size_t min_window(Encoding e);

std::vector<double> encode(Encoding e, const Matrix<double>& window,
                           const FeatureLayout& layout);

}  // namespace hotspot::features

#endif  // HOTSPOT_FEATURES_H_
