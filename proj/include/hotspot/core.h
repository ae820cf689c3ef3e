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

// Sector telemetry, hot spot scores and labels.
//
// All indices are 0-based. Hour j of the dataset belongs to day j / 24 and
// week j / 168. A score integrated over a period covers whole blocks: daily
// score d averages hours [24 d, 24 d + 24).

#ifndef HOTSPOT_CORE_H_
#define HOTSPOT_CORE_H_

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hotspot/common.h"

namespace hotspot::core {

struct Coordinates {
  double x_km = 0.0;
  double y_km = 0.0;
  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

// Calendar columns, one row per hour.
enum CalendarColumn : std::size_t {
  kHourOfDay = 0,  // [0, 23]
  kDayOfWeek = 1,  // [0, 6], Monday = 0
  kDayOfMonth = 2,  // [1, 31]
  kIsWeekend = 3,
  kIsHoliday = 4,
};
inline constexpr std::size_t kCalendarColumns = 5;

using Date = std::chrono::year_month_day;

// Parses "YYYY-MM-DD". Throws ConfigError on malformed input.
Date parse_date(const std::string& text);
std::string format_date(const Date& date);

Matrix<int> build_calendar(const Date& start, std::size_t m_hours,
                           std::span<const Date> holidays);

struct KpiDataset {
  // n_sectors x m_hours x l_kpis. Missing entries hold NaN in `kpi` and 1 in
  // `missing`.
  Tensor3<double> kpi;
  Tensor3<std::uint8_t> missing;
  std::vector<Coordinates> sector_coords;
  std::vector<int> sector_ids;
  Matrix<int> calendar;
  Date start_date;
  std::vector<Date> holidays;

  std::size_t n_sectors() const { return kpi.dim0(); }
  std::size_t m_hours() const { return kpi.dim1(); }
  std::size_t m_days() const { return kpi.dim1() / kHoursPerDay; }
  std::size_t m_weeks() const { return kpi.dim1() / kHoursPerWeek; }
  std::size_t l_kpis() const { return kpi.dim2(); }

  std::size_t missing_count() const;
  // Throws DataError if the invariants do not hold.
  void validate() const;
};

// Keeps the sectors listed in `keep`, in order.
KpiDataset select_sectors(const KpiDataset& data,
                          std::span<const std::size_t> keep);

struct ScoringConfig {
  std::vector<double> weights;
  std::vector<double> kpi_thresholds;
  double hot_threshold = 0.6;

  double weight_sum() const;
  void validate() const;
};

enum class Period { kHour, kDay, kWeek };

std::size_t period_hours(Period period);

// H(x) with H(0) = 0.
int heaviside(double x);

Matrix<double> compute_raw_scores(const KpiDataset& data,
                                  const ScoringConfig& cfg);

// Mean of z over the `window` samples ending at `end` inclusive, i.e. indices
// (end - window, end].
double windowed_mean(std::size_t end, std::size_t window,
                     std::span<const double> z);

Matrix<double> integrate_scores(const Matrix<double>& s_raw, Period period);

BoolMatrix label_hot_spots(const Matrix<double>& scores,
                           const ScoringConfig& cfg);

// Become-a-hot-spot labels at daily resolution. Day j is labeled only when a
// full week of context exists on both sides; other days are reported as
// unlabeled rather than negative.
struct BecomeLabels {
  BoolMatrix labels;  // n x m_days, zero outside the labeled range
  std::size_t first_day = 0;  // first labeled day
  std::size_t last_day = 0;   // last labeled day (inclusive)

  bool is_labeled(std::size_t day) const {
    return day >= first_day && day <= last_day && last_day >= first_day &&
           labels.cols() > 0;
  }
};

// Day j activates when the week ending at j (days j-6..j) has mean raw score
// at or below the threshold, the week starting at j+1 (days j+1..j+7) is
// above it, day j is not hot and day j+1 is. An activation is suppressed
// when the trailing weekly mean has not exceeded the threshold since the
// previous activation.
BecomeLabels label_become_hot_spot(const Matrix<double>& s_raw,
                                   const Matrix<double>& s_day,
                                   const ScoringConfig& cfg);

// Trailing weekly mean of raw scores ending at the last hour of `day`.
double trailing_week_mean(std::span<const double> s_raw_row, std::size_t day);

struct ScoreSet {
  Matrix<double> s_raw;
  Matrix<double> s_hour;
  Matrix<double> s_day;
  Matrix<double> s_week;
  BoolMatrix y_hour;
  BoolMatrix y_day;
  BoolMatrix y_week;
  BecomeLabels y_become;
};

ScoreSet compute_score_set(const KpiDataset& data, const ScoringConfig& cfg);

}  // namespace hotspot::core

#endif  // HOTSPOT_CORE_H_
