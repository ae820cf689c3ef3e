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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace hotspot::core {
namespace {

using testing::daily_constant_scores;
using testing::make_dataset;

ScoringConfig two_kpi_config() {
  ScoringConfig cfg;
  cfg.weights = {1.0, 2.0};
  cfg.kpi_thresholds = {0.5, 0.5};
  cfg.hot_threshold = 0.6;
  return cfg;
}

TEST(Heaviside, Examples) {
  EXPECT_EQ(heaviside(0.2), 1);
  EXPECT_EQ(heaviside(-0.2), 0);
  EXPECT_EQ(heaviside(0.0), 0);
  EXPECT_THROW(heaviside(std::numeric_limits<double>::quiet_NaN()), ConfigError);
  EXPECT_THROW(heaviside(std::numeric_limits<double>::infinity()), ConfigError);
}

TEST(RawScores, HandEvaluatedRows) {
  auto ds = make_dataset(1, 168, 2);
  ds.kpi(0, 0, 0) = 0.7;
  ds.kpi(0, 0, 1) = 0.3;
  const auto s = compute_raw_scores(ds, two_kpi_config());
  EXPECT_DOUBLE_EQ(s(0, 0), 1.0);
  // Everything else is below both thresholds.
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);

  auto ds3 = make_dataset(1, 168, 3, 5.0);
  ScoringConfig cfg3;
  cfg3.weights = {1.0, 2.0, 4.0};
  cfg3.kpi_thresholds = {1.0, 1.0, 1.0};
  cfg3.hot_threshold = 0.6;
  EXPECT_DOUBLE_EQ(compute_raw_scores(ds3, cfg3)(0, 17), 7.0);

  cfg3.weights = {1.0, 1.0, 1.0};
  auto cold = make_dataset(1, 168, 3, 0.0);
  EXPECT_DOUBLE_EQ(compute_raw_scores(cold, cfg3)(0, 3), 0.0);
}

TEST(RawScores, RejectsShapeMismatchAndMissing) {
  auto ds = make_dataset(1, 168, 3);
  EXPECT_THROW(compute_raw_scores(ds, two_kpi_config()), ConfigError);
  auto ds2 = make_dataset(1, 168, 2);
  ds2.missing(0, 5, 1) = 1;
  EXPECT_THROW(compute_raw_scores(ds2, two_kpi_config()), DataError);
}

TEST(ScoringConfig, Invariants) {
  ScoringConfig cfg = two_kpi_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.hot_threshold = 3.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.hot_threshold = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = two_kpi_config();
  cfg.weights = {0.0, 0.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.weights = {-1.0, 2.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(WindowedMean, Examples) {
  const std::vector<double> z = {1, 2, 3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(windowed_mean(5, 3, z), 5.0);
  EXPECT_DOUBLE_EQ(windowed_mean(3, 1, z), 4.0);
  const std::vector<double> c(10, 2.5);
  for (std::size_t x = 0; x < 10; ++x) {
    for (std::size_t y = 1; y <= x + 1; ++y) EXPECT_DOUBLE_EQ(windowed_mean(x, y, c), 2.5);
  }
  EXPECT_THROW(windowed_mean(1, 3, z), ConfigError);
  EXPECT_THROW(windowed_mean(6, 1, z), ConfigError);
  EXPECT_THROW(windowed_mean(3, 0, z), ConfigError);
}

TEST(IntegrateScores, Examples) {
  Matrix<double> s(2, 48);
  std::mt19937_64 rng(3);
  for (auto& v : s.data()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  EXPECT_EQ(integrate_scores(s, Period::kHour), s);

  Matrix<double> twos(1, 24, 2.0);
  const auto d = integrate_scores(twos, Period::kDay);
  ASSERT_EQ(d.cols(), 1u);
  EXPECT_DOUBLE_EQ(d(0, 0), 2.0);

  Matrix<double> ramp(1, 24, 0.0);
  ramp(0, 23) = 24.0;
  EXPECT_DOUBLE_EQ(integrate_scores(ramp, Period::kDay)(0, 0), 1.0);

  EXPECT_THROW(integrate_scores(Matrix<double>(1, 30), Period::kDay), ConfigError);
}

TEST(LabelHotSpots, Examples) {
  ScoringConfig cfg = two_kpi_config();
  Matrix<double> s(1, 3);
  s(0, 0) = 0.8;
  s(0, 1) = 0.6;
  s(0, 2) = 0.59;
  const auto y = label_hot_spots(s, cfg);
  EXPECT_EQ(y(0, 0), 1);
  EXPECT_EQ(y(0, 1), 0);
  EXPECT_EQ(y(0, 2), 0);
  EXPECT_EQ(label_hot_spots(s, cfg), y);
}

TEST(BecomeLabel, StepSectorActivatesOnceAtTheStep) {
  ScoringConfig cfg = two_kpi_config();
  std::vector<double> daily(28, 0.0);
  for (std::size_t d = 14; d < 28; ++d) daily[d] = cfg.hot_threshold + 1.0;
  const auto raw = daily_constant_scores(daily);
  const auto day = integrate_scores(raw, Period::kDay);
  const auto y = label_become_hot_spot(raw, day, cfg);
  EXPECT_EQ(y.first_day, 6u);
  EXPECT_EQ(y.last_day, 20u);
  int activations = 0;
  for (std::size_t d = 0; d < 28; ++d) activations += y.labels(0, d);
  EXPECT_EQ(activations, 1);
  // Day 13 is the last cold day; day 14 the first hot one.
  EXPECT_EQ(y.labels(0, 13), 1);
}

TEST(BecomeLabel, ConstantSectorsNeverActivate) {
  ScoringConfig cfg = two_kpi_config();
  for (double level : {0.0, 2.5}) {
    const auto raw = daily_constant_scores(std::vector<double>(42, level));
    const auto y = label_become_hot_spot(raw, integrate_scores(raw, Period::kDay), cfg);
    for (auto v : y.labels.data()) EXPECT_EQ(v, 0);
  }
}

TEST(BecomeLabel, ShortSeriesHasNoLabeledDays) {
  ScoringConfig cfg = two_kpi_config();
  const auto raw = daily_constant_scores(std::vector<double>(14, 0.0));
  const auto y = label_become_hot_spot(raw, integrate_scores(raw, Period::kDay), cfg);
  for (std::size_t d = 0; d < 14; ++d) EXPECT_FALSE(y.is_labeled(d));
}

TEST(BecomeLabel, CloseActivationsAreDiscarded) {
  ScoringConfig cfg = two_kpi_config();
  const double hot = 0.8;
  // Cold week, two hot days, one cold day, then hot: the second transition
  // happens while the trailing week never exceeded the threshold.
  std::vector<double> daily(35, 0.0);
  for (std::size_t d = 8; d < 10; ++d) daily[d] = hot;
  for (std::size_t d = 11; d < 35; ++d) daily[d] = hot;
  const auto raw = daily_constant_scores(daily);
  const auto day = integrate_scores(raw, Period::kDay);
  const auto y = label_become_hot_spot(raw, day, cfg);
  // Unsuppressed conditions at day 10 hold as well.
  EXPECT_LE(trailing_week_mean(raw.row(0), 10), cfg.hot_threshold);
  EXPECT_GT(trailing_week_mean(raw.row(0), 17), cfg.hot_threshold);
  EXPECT_EQ(y.labels(0, 7), 1);
  EXPECT_EQ(y.labels(0, 10), 0);
}

TEST(Calendar, Examples) {
  const Date monday = parse_date("2015-11-30");
  const std::vector<Date> holidays = {monday};
  const auto cal = build_calendar(monday, 336, holidays);
  EXPECT_EQ(cal(0, kHourOfDay), 0);
  EXPECT_EQ(cal(0, kDayOfWeek), 0);
  EXPECT_EQ(cal(0, kDayOfMonth), 30);
  EXPECT_EQ(cal(0, kIsWeekend), 0);
  EXPECT_EQ(cal(24 * 5, kIsWeekend), 1);
  EXPECT_EQ(cal(24 * 5, kDayOfWeek), 5);
  for (std::size_t j = 0; j < 24; ++j) EXPECT_EQ(cal(j, kIsHoliday), 1);
  EXPECT_EQ(cal(24, kIsHoliday), 0);
  EXPECT_EQ(cal(24, kDayOfMonth), 1);  // December 1st
  for (std::size_t j = 0; j < 336; ++j) {
    EXPECT_EQ(cal(j, kHourOfDay), static_cast<int>(j % 24));
    EXPECT_EQ(cal(j, kDayOfWeek), cal(j % 168, kDayOfWeek));
  }
  EXPECT_THROW(parse_date("2015-13-01"), ConfigError);
  EXPECT_THROW(parse_date("2015/11/30"), ConfigError);
  EXPECT_THROW(parse_date("2015-02-30"), ConfigError);
  EXPECT_EQ(format_date(parse_date("2016-04-03")), "2016-04-03");
}

TEST(Dataset, ValidateCatchesBrokenInvariants) {
  auto ds = make_dataset(2, 168, 2);
  EXPECT_NO_THROW(ds.validate());
  ds.kpi(1, 3, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ds.validate(), DataError);
  ds.missing(1, 3, 1) = 1;
  EXPECT_NO_THROW(ds.validate());
  auto short_ds = make_dataset(1, 100, 2);
  EXPECT_THROW(short_ds.validate(), DataError);
}

// Properties over random data.
class ScoreProperties : public ::testing::TestWithParam<int> {};

TEST_P(ScoreProperties, MonotoneInKpis) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoringConfig cfg;
  for (int k = 0; k < 5; ++k) {
    cfg.weights.push_back(u(rng));
    cfg.kpi_thresholds.push_back(u(rng));
  }
  cfg.hot_threshold = 0.1;
  auto ds = make_dataset(1, 168, 5);
  for (auto& v : ds.kpi.data()) v = u(rng);
  const auto before = compute_raw_scores(ds, cfg);
  for (int trial = 0; trial < 50; ++trial) {
    auto bumped = ds;
    const std::size_t j = rng() % 168;
    const std::size_t k = rng() % 5;
    bumped.kpi(0, j, k) += u(rng);
    const auto after = compute_raw_scores(bumped, cfg);
    EXPECT_GE(after(0, j), before(0, j));
  }
}

TEST_P(ScoreProperties, WeekEqualsMeanOfDaysAndLabelsAgree) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix<double> raw(3, 336);
  for (auto& v : raw.data()) v = u(rng) < 0.3 ? u(rng) * 3.0 : 0.0;
  const auto day = integrate_scores(raw, Period::kDay);
  const auto week = integrate_scores(raw, Period::kWeek);
  ScoringConfig cfg;
  cfg.weights = {3.0};
  cfg.kpi_thresholds = {0.0};
  cfg.hot_threshold = 0.3;
  const auto y = label_hot_spots(day, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t w = 0; w < 2; ++w) {
      double sum = 0.0;
      for (std::size_t d = 0; d < 7; ++d) sum += day(i, w * 7 + d);
      EXPECT_NEAR(week(i, w), sum / 7.0, 1e-12);
    }
    for (std::size_t d = 0; d < 14; ++d) {
      double sum = 0.0;
      for (std::size_t h = 0; h < 24; ++h) sum += raw(i, d * 24 + h);
      EXPECT_NEAR(day(i, d), sum / 24.0, 1e-12);
      EXPECT_EQ(y(i, d), sum / 24.0 > cfg.hot_threshold ? 1 : 0);
    }
  }
}

TEST_P(ScoreProperties, BecomeActivationsAreSeparatedByAHotWeek) {
  std::mt19937_64 rng(GetParam());
  ScoringConfig cfg;
  cfg.weights = {1.0};
  cfg.kpi_thresholds = {0.0};
  cfg.hot_threshold = 0.6;
  // Sticky random daily regimes generate many transitions.
  std::vector<double> daily(126);
  bool hot = false;
  for (auto& d : daily) {
    if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.25) hot = !hot;
    d = hot ? 0.8 : 0.05;
  }
  const auto raw = daily_constant_scores(daily);
  const auto s_day = integrate_scores(raw, Period::kDay);
  const auto y = label_become_hot_spot(raw, s_day, cfg);
  std::vector<std::size_t> act;
  for (std::size_t d = 0; d < 126; ++d) {
    if (y.labels(0, d)) {
      ASSERT_TRUE(y.is_labeled(d));
      EXPECT_LE(s_day(0, d), cfg.hot_threshold);
      EXPECT_GT(s_day(0, d + 1), cfg.hot_threshold);
      act.push_back(d);
    }
  }
  for (std::size_t a = 1; a < act.size(); ++a) {
    bool above_then_below = false;
    bool seen_above = false;
    for (std::size_t e = act[a - 1] + 1; e <= act[a]; ++e) {
      const double m = trailing_week_mean(raw.row(0), e);
      if (m > cfg.hot_threshold) seen_above = true;
      if (seen_above && m <= cfg.hot_threshold) above_then_below = true;
    }
    EXPECT_TRUE(above_then_below) << "activations at " << act[a - 1] << " and " << act[a];
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ScoreProperties, ::testing::Range(1, 9));

}  // namespace
}  // namespace hotspot::core
