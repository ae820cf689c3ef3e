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

#include "hotspot/core.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace hotspot::core {

namespace {

int day_of_week_monday0(std::chrono::sys_days day) {
  // c_encoding: Sunday = 0.
  const unsigned c = std::chrono::weekday{day}.c_encoding();
  return static_cast<int>((c + 6) % 7);
}

}  // namespace

Date parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (text.size() != 10 ||
      std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw ConfigError("malformed date '" + text + "', expected YYYY-MM-DD");
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m},
                  std::chrono::day{d}};
  if (!date.ok()) throw ConfigError("invalid calendar date '" + text + "'");
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

Matrix<int> build_calendar(const Date& start, std::size_t m_hours,
                           std::span<const Date> holidays) {
  require(m_hours >= 1, "calendar needs at least one hour");
  require(start.ok(), "invalid calendar start date");
  std::set<std::chrono::sys_days> holiday_days;
  for (const Date& h : holidays) {
    if (!h.ok()) throw ConfigError("invalid holiday date");
    holiday_days.insert(std::chrono::sys_days{h});
  }

  Matrix<int> cal(m_hours, kCalendarColumns);
  const std::chrono::sys_days origin{start};
  for (std::size_t j = 0; j < m_hours; ++j) {
    const std::chrono::sys_days day =
        origin + std::chrono::days{static_cast<int>(j / kHoursPerDay)};
    const Date ymd{day};
    const int dow = day_of_week_monday0(day);
    cal(j, kHourOfDay) = static_cast<int>(j % kHoursPerDay);
    cal(j, kDayOfWeek) = dow;
    cal(j, kDayOfMonth) = static_cast<int>(static_cast<unsigned>(ymd.day()));
    cal(j, kIsWeekend) = dow >= 5 ? 1 : 0;
    cal(j, kIsHoliday) = holiday_days.contains(day) ? 1 : 0;
  }
  return cal;
}

std::size_t KpiDataset::missing_count() const {
  return static_cast<std::size_t>(
      std::count(missing.data().begin(), missing.data().end(), 1));
}

void KpiDataset::validate() const {
  if (missing.dim0() != kpi.dim0() || missing.dim1() != kpi.dim1() ||
      missing.dim2() != kpi.dim2()) {
    throw DataError("missing mask shape differs from KPI tensor");
  }
  if (m_hours() == 0 || m_hours() % kHoursPerWeek != 0) {
    throw DataError("m_hours must be a positive multiple of 168");
  }
  if (sector_coords.size() != n_sectors() || sector_ids.size() != n_sectors()) {
    throw DataError("sector metadata length differs from sector count");
  }
  if (calendar.rows() != m_hours() || calendar.cols() != kCalendarColumns) {
    throw DataError("calendar shape must be m_hours x 5");
  }
  for (std::size_t j = 0; j < m_hours(); ++j) {
    if (calendar(j, kHourOfDay) != static_cast<int>(j % kHoursPerDay) ||
        calendar(j, kDayOfWeek) != calendar(j % kHoursPerWeek, kDayOfWeek)) {
      throw DataError("calendar is not periodic in hour/day-of-week");
    }
  }
  for (std::size_t idx = 0; idx < kpi.size(); ++idx) {
    if (!missing.data()[idx] && !std::isfinite(kpi.data()[idx])) {
      throw DataError("non-finite KPI value outside the missing mask");
    }
  }
}

KpiDataset select_sectors(const KpiDataset& data,
                          std::span<const std::size_t> keep) {
  KpiDataset out;
  const std::size_t m = data.m_hours();
  const std::size_t l = data.l_kpis();
  out.kpi = Tensor3<double>(keep.size(), m, l);
  out.missing = Tensor3<std::uint8_t>(keep.size(), m, l);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t i = keep[r];
    std::ranges::copy(data.kpi.sector(i), out.kpi.sector(r).begin());
    std::ranges::copy(data.missing.sector(i), out.missing.sector(r).begin());
    out.sector_coords.push_back(data.sector_coords[i]);
    out.sector_ids.push_back(data.sector_ids[i]);
  }
  out.calendar = data.calendar;
  out.start_date = data.start_date;
  out.holidays = data.holidays;
  return out;
}

double ScoringConfig::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void ScoringConfig::validate() const {
  require(!weights.empty(), "scoring weights are empty");
  require(weights.size() == kpi_thresholds.size(),
          "weights and thresholds differ in length");
  bool any_positive = false;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, "weights must be non-negative");
    any_positive = any_positive || w > 0.0;
  }
  require(any_positive, "at least one weight must be positive");
  for (double e : kpi_thresholds) {
    require(std::isfinite(e), "KPI thresholds must be finite");
  }
  require(hot_threshold > 0.0 && hot_threshold < weight_sum(),
          "hot threshold must lie in (0, sum of weights)");
}

std::size_t period_hours(Period period) {
  switch (period) {
    case Period::kHour:
      return 1;
    case Period::kDay:
      return kHoursPerDay;
    case Period::kWeek:
      return kHoursPerWeek;
  }
  return 1;
}

int heaviside(double x) {
  if (!std::isfinite(x)) throw ConfigError("heaviside of non-finite value");
  return x > 0.0 ? 1 : 0;
}

Matrix<double> compute_raw_scores(const KpiDataset& data,
                                  const ScoringConfig& cfg) {
  cfg.validate();
  const std::size_t l = data.l_kpis();
  if (cfg.weights.size() != l) {
    throw ConfigError("scoring config has " +
                      std::to_string(cfg.weights.size()) +
                      " weights for " + std::to_string(l) + " KPIs");
  }
  Matrix<double> s(data.n_sectors(), data.m_hours());
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    for (std::size_t j = 0; j < data.m_hours(); ++j) {
      const auto values = data.kpi.fiber(i, j);
      const auto missing = data.missing.fiber(i, j);
      double score = 0.0;
      for (std::size_t k = 0; k < l; ++k) {
        if (missing[k]) {
          throw DataError("raw scores require imputed data (sector " +
                          std::to_string(i) + ", hour " + std::to_string(j) +
                          ")");
        }
        score += cfg.weights[k] * heaviside(values[k] - cfg.kpi_thresholds[k]);
      }
      s(i, j) = score;
    }
  }
  return s;
}

double windowed_mean(std::size_t end, std::size_t window,
                     std::span<const double> z) {
  require(window >= 1, "window length must be at least 1");
  if (end >= z.size() || end + 1 < window) {
    throw ConfigError("window (" + std::to_string(static_cast<long long>(end) -
                                                  static_cast<long long>(window)) +
                      ", " + std::to_string(end) +
                      "] is outside a series of length " +
                      std::to_string(z.size()));
  }
  double sum = 0.0;
  for (std::size_t j = end + 1 - window; j <= end; ++j) sum += z[j];
  return sum / static_cast<double>(window);
}

Matrix<double> integrate_scores(const Matrix<double>& s_raw, Period period) {
  const std::size_t delta = period_hours(period);
  if (s_raw.cols() % delta != 0) {
    throw ConfigError("series length " + std::to_string(s_raw.cols()) +
                      " is not divisible by the integration length " +
                      std::to_string(delta));
  }
  const std::size_t cols = s_raw.cols() / delta;
  Matrix<double> out(s_raw.rows(), cols);
  for (std::size_t i = 0; i < s_raw.rows(); ++i) {
    const auto row = s_raw.row(i);
    for (std::size_t j = 0; j < cols; ++j) {
      out(i, j) = windowed_mean((j + 1) * delta - 1, delta, row);
    }
  }
  return out;
}

BoolMatrix label_hot_spots(const Matrix<double>& scores,
                           const ScoringConfig& cfg) {
  BoolMatrix y(scores.rows(), scores.cols());
  for (std::size_t idx = 0; idx < scores.data().size(); ++idx) {
    y.data()[idx] = static_cast<std::uint8_t>(
        heaviside(scores.data()[idx] - cfg.hot_threshold));
  }
  return y;
}

double trailing_week_mean(std::span<const double> s_raw_row,
                          std::size_t day) {
  return windowed_mean((day + 1) * kHoursPerDay - 1, kHoursPerWeek, s_raw_row);
}

BecomeLabels label_become_hot_spot(const Matrix<double>& s_raw,
                                   const Matrix<double>& s_day,
                                   const ScoringConfig& cfg) {
  if (s_raw.cols() != s_day.cols() * kHoursPerDay ||
      s_raw.rows() != s_day.rows()) {
    throw ConfigError("raw and daily score matrices are inconsistent");
  }
  const std::size_t m_days = s_day.cols();
  BecomeLabels out;
  out.labels = BoolMatrix(s_day.rows(), m_days);
  // Needs days j-6 .. j+7.
  if (m_days < 2 * kDaysPerWeek + 1) {
    out.first_day = 1;
    out.last_day = 0;
    return out;
  }
  out.first_day = kDaysPerWeek - 1;
  out.last_day = m_days - kDaysPerWeek - 1;
  const double eps = cfg.hot_threshold;

  for (std::size_t i = 0; i < s_day.rows(); ++i) {
    const auto raw = s_raw.row(i);
    bool armed = true;
    for (std::size_t j = out.first_day; j <= out.last_day; ++j) {
      const double past = trailing_week_mean(raw, j);
      if (heaviside(past - eps) == 1) armed = true;
      const double next = trailing_week_mean(raw, j + kDaysPerWeek);
      const bool active = heaviside(past - eps) == 0 &&
                          heaviside(next - eps) == 1 &&
                          heaviside(s_day(i, j) - eps) == 0 &&
                          heaviside(s_day(i, j + 1) - eps) == 1;
      if (active && armed) {
        out.labels(i, j) = 1;
        armed = false;
      }
    }
  }
  return out;
}

ScoreSet compute_score_set(const KpiDataset& data, const ScoringConfig& cfg) {
  ScoreSet s;
  s.s_raw = compute_raw_scores(data, cfg);
  s.s_hour = integrate_scores(s.s_raw, Period::kHour);
  s.s_day = integrate_scores(s.s_raw, Period::kDay);
  s.s_week = integrate_scores(s.s_raw, Period::kWeek);
  s.y_hour = label_hot_spots(s.s_hour, cfg);
  s.y_day = label_hot_spots(s.s_day, cfg);
  s.y_week = label_hot_spots(s.s_week, cfg);
  s.y_become = label_become_hot_spot(s.s_raw, s.s_day, cfg);
  return s;
}

}  // namespace hotspot::core
