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

#include "hotspot/features.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace hotspot::features {

FeatureLayout::FeatureLayout(std::size_t l_kpis) : l_(l_kpis) {
  for (std::size_t k = 0; k < l_kpis; ++k) {
    channels_.push_back({ChannelKind::kKpi, k, "kpi_" + std::to_string(k)});
  }
  static const char* kCal[] = {"hour_of_day", "day_of_week", "day_of_month", "is_weekend", "is_holiday"};
  for (std::size_t c = 0; c < core::kCalendarColumns; ++c) {
    channels_.push_back({ChannelKind::kCalendar, c, kCal[c]});
  }
  channels_.push_back({ChannelKind::kHourlyScore, 0, "score_hour"});
  channels_.push_back({ChannelKind::kDailyScore, 0, "score_day"});
  channels_.push_back({ChannelKind::kWeeklyScore, 0, "score_week"});
  channels_.push_back({ChannelKind::kDailyLabel, 0, "label_day"});
}

InputTensor assemble_input_tensor(const core::KpiDataset& data,
                                  const core::ScoreSet& scores) {
  const std::size_t n = data.n_sectors(), m = data.m_hours(), l = data.l_kpis();
  auto shape_ok = [&](const auto& mat, std::size_t cols) {
    return mat.rows() == n && mat.cols() == cols;
  };
  if (!shape_ok(scores.s_hour, m) || !shape_ok(scores.s_day, m / kHoursPerDay) ||
      !shape_ok(scores.s_week, m / kHoursPerWeek) || !shape_ok(scores.y_day, m / kHoursPerDay)) {
    throw ConfigError("score resolution does not match the dataset");
  }
  if (data.calendar.rows() != m) throw ConfigError("calendar length does not match the dataset");
  InputTensor out{Tensor3<double>(n, m, l + 9), FeatureLayout(l)};
  const auto& lay = out.layout;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto f = out.x.fiber(i, j);
      const auto src = data.kpi.fiber(i, j);
      std::copy(src.begin(), src.end(), f.begin());
      for (std::size_t c = 0; c < core::kCalendarColumns; ++c) {
        f[l + c] = data.calendar(j, c);
      }
      f[lay.hourly_score()] = scores.s_hour(i, j);
      f[lay.daily_score()] = scores.s_day(i, j / kHoursPerDay);
      // Trailing hours of an incomplete week have no weekly score.
      const std::size_t wk = j / kHoursPerWeek;
      f[lay.weekly_score()] = wk < scores.s_week.cols() ? scores.s_week(i, wk) : 0.0;
      f[lay.daily_label()] = scores.y_day(i, j / kHoursPerDay);
    }
  }
  return out;
}

Matrix<double> slice_window(const InputTensor& x, std::size_t sector,
                            std::size_t end_day, std::size_t w) {
  const std::size_t m_days = x.x.dim1() / kHoursPerDay;
  if (sector >= x.x.dim0() || w < 1 || end_day < w || end_day >= m_days) {
    throw ConfigError("window of " + std::to_string(w) + " days ending at day " +
                      std::to_string(end_day) + " is out of range");
  }
  const std::size_t C = x.x.dim2();
  const std::size_t first = (end_day + 1 - w) * kHoursPerDay;
  Matrix<double> out(w * kHoursPerDay, C);
  const auto src = x.x.sector(sector).subspan(first * C, w * kHoursPerDay * C);
  std::copy(src.begin(), src.end(), out.data().begin());
  return out;
}

std::vector<double> raw_features(const Matrix<double>& window) { return window.data(); }

Matrix<double> unflatten_raw(const std::vector<double>& v, std::size_t channels) {
  require(channels > 0 && v.size() % channels == 0, "vector length is not a multiple of the channel count");
  Matrix<double> m(v.size() / channels, channels);
  m.data() = v;
  return m;
}

double percentile(std::vector<double> values, double p) {
  require(!values.empty(), "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

void require_whole_days(const Matrix<double>& window, std::size_t min_days) {
  require(window.rows() % kHoursPerDay == 0 && window.rows() >= min_days * kHoursPerDay,
          "window must cover at least " + std::to_string(min_days) + " whole day(s)");
}

}  // namespace

std::vector<double> percentile_features(const Matrix<double>& window) {
  require_whole_days(window, 1);
  const std::size_t days = window.rows() / kHoursPerDay, C = window.cols();
  std::vector<double> out;
  out.reserve(days * C * 5);
  std::vector<double> day(kHoursPerDay);
  for (std::size_t d = 0; d < days; ++d) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t h = 0; h < kHoursPerDay; ++h) day[h] = window(d * kHoursPerDay + h, c);
      std::sort(day.begin(), day.end());
      for (double p : kPercentiles) {
        const double pos = p / 100.0 * (kHoursPerDay - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, kHoursPerDay - 1);
        out.push_back(day[lo] + (pos - lo) * (day[hi] - day[lo]));
      }
    }
  }
  return out;
}

namespace {

struct Stats {
  double mean = 0, sd = 0, min = 0, max = 0;
};

// Population statistics of rows [r0, r1) of one column.
Stats column_stats(const Matrix<double>& w, std::size_t c, std::size_t r0, std::size_t r1) {
  Stats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -s.min;
  double sum = 0.0;
  for (std::size_t r = r0; r < r1; ++r) {
    sum += w(r, c);
    s.min = std::min(s.min, w(r, c));
    s.max = std::max(s.max, w(r, c));
  }
  const double n = static_cast<double>(r1 - r0);
  s.mean = sum / n;
  double ss = 0.0;
  for (std::size_t r = r0; r < r1; ++r) ss += (w(r, c) - s.mean) * (w(r, c) - s.mean);
  s.sd = std::sqrt(ss / n);
  return s;
}

void push(std::vector<double>& out, const Stats& s) {
  out.insert(out.end(), {s.mean, s.sd, s.min, s.max});
}

}  // namespace

std::vector<double> handcrafted_features(const Matrix<double>& window,
                                         const FeatureLayout& layout) {
  require_whole_days(window, 2);
  const std::size_t days = window.rows() / kHoursPerDay, C = window.cols();
  require(C == layout.channels(), "window channels do not match the layout");
  const std::size_t dow_col = layout.calendar(core::kDayOfWeek);
  const std::size_t we_col = layout.calendar(core::kIsWeekend);
  const std::size_t rows = window.rows();
  const std::size_t split = (days / 2) * kHoursPerDay;  // recent half gets the extra day
  const bool fallback = days < kDaysPerWeek;

  std::vector<int> weekday(days);
  for (std::size_t d = 0; d < days; ++d) {
    weekday[d] = std::clamp(static_cast<int>(window(d * kHoursPerDay, dow_col)), 0, 6);
  }

  std::vector<double> out;
  out.reserve(C * kHandcraftedPerChannel + 1);
  std::vector<double> day_mean(days);
  for (std::size_t c = 0; c < C; ++c) {
    const Stats whole = column_stats(window, c, 0, rows);
    const Stats first = column_stats(window, c, 0, split);
    const Stats second = column_stats(window, c, split, rows);
    push(out, whole);
    push(out, first);
    push(out, second);
    push(out, {second.mean - first.mean, second.sd - first.sd, second.min - first.min,
               second.max - first.max});

    // Average day profile.
    std::array<double, kHoursPerDay> prof{};
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      for (std::size_t d = 0; d < days; ++d) prof[h] += window(d * kHoursPerDay + h, c);
      prof[h] /= static_cast<double>(days);
    }
    out.insert(out.end(), prof.begin(), prof.end());

    // Average week profile over weekdays (Monday first) of day means.
    for (std::size_t d = 0; d < days; ++d) day_mean[d] = column_stats(window, c, d * kHoursPerDay, (d + 1) * kHoursPerDay).mean;
    const double all_days = whole.mean;
    std::array<double, 7> wk_sum{}, wk_min, wk_max;
    std::array<int, 7> wk_n{};
    wk_min.fill(std::numeric_limits<double>::infinity());
    wk_max.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t d = 0; d < days; ++d) {
      const int k = weekday[d];
      wk_sum[k] += day_mean[d];
      ++wk_n[k];
      wk_min[k] = std::min(wk_min[k], day_mean[d]);
      wk_max[k] = std::max(wk_max[k], day_mean[d]);
    }
    const double dmin = *std::min_element(day_mean.begin(), day_mean.end());
    const double dmax = *std::max_element(day_mean.begin(), day_mean.end());
    for (int k = 0; k < 7; ++k) out.push_back(wk_n[k] ? wk_sum[k] / wk_n[k] : all_days);

    // Profile differences: weekday minus weekend, and diurnal peak minus trough.
    double wd = 0.0, we = 0.0;
    std::size_t nwd = 0, nwe = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (window(r, we_col) > 0.5) {
        we += window(r, c);
        ++nwe;
      } else {
        wd += window(r, c);
        ++nwd;
      }
    }
    out.push_back(nwd && nwe ? wd / nwd - we / nwe : 0.0);
    out.push_back(*std::max_element(prof.begin(), prof.end()) - *std::min_element(prof.begin(), prof.end()));

    // Extreme day profile: per-hour minimum, then maximum, across days.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        double v = window(h, c);
        for (std::size_t d = 1; d < days; ++d) {
          const double x = window(d * kHoursPerDay + h, c);
          v = pass == 0 ? std::min(v, x) : std::max(v, x);
        }
        out.push_back(v);
      }
    }
    // Extreme week profile: per-weekday minimum, then maximum, of day means.
    for (int k = 0; k < 7; ++k) out.push_back(wk_n[k] ? wk_min[k] : dmin);
    for (int k = 0; k < 7; ++k) out.push_back(wk_n[k] ? wk_max[k] : dmax);

    // Last day.
    for (std::size_t r = rows - kHoursPerDay; r < rows; ++r) out.push_back(window(r, c));
    const Stats last = column_stats(window, c, rows - kHoursPerDay, rows);
    out.push_back(last.mean);
    out.push_back(last.sd);
  }
  out.push_back(fallback ? 1.0 : 0.0);
  return out;
}

std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::kRaw: return "raw";
    case Encoding::kPercentile: return "percentile";
    case Encoding::kHandcrafted: return "handcrafted";
  }
  return "?";
}

Encoding parse_encoding(const std::string& name) {
  if (name == "raw") return Encoding::kRaw;
  if (name == "percentile") return Encoding::kPercentile;
  if (name == "handcrafted") return Encoding::kHandcrafted;
  throw ConfigError("unknown feature encoding '" + name + "'");
}

std::size_t feature_count(Encoding e, std::size_t w, std::size_t channels) {
  switch (e) {
    case Encoding::kRaw: return kHoursPerDay * w * channels;
    case Encoding::kPercentile: return 5 * w * channels;
    case Encoding::kHandcrafted: return kHandcraftedPerChannel * channels + 1;
  }
  return 0;
}

std::size_t min_window(Encoding e) { return e == Encoding::kHandcrafted ? 2 : 1; }

std::vector<double> encode(Encoding e, const Matrix<double>& window,
                           const FeatureLayout& layout) {
  switch (e) {
    case Encoding::kRaw: return raw_features(window);
    case Encoding::kPercentile: return percentile_features(window);
    case Encoding::kHandcrafted: return handcrafted_features(window, layout);
  }
  throw ConfigError("unknown feature encoding");
}

}  // namespace hotspot::features
