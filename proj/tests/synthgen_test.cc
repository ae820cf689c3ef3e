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

#include "hotspot/synthgen.h"

#include <cmath>
#include <cstring>
#include <map>

#include <gtest/gtest.h>

#include "hotspot/core.h"

namespace hotspot::synth {
namespace {

GeneratorConfig small_config() {
  GeneratorConfig cfg;
  cfg.n_sectors = 60;
  cfg.m_weeks = 6;
  cfg.l_kpis = 8;
  cfg.seed = 42;
  return cfg;
}

TEST(WeeklyPattern, ParseAndFormat) {
  const auto p = WeeklyPattern::parse("MTWTF--");
  EXPECT_EQ(p.bits(), 0x1f);
  EXPECT_EQ(p.to_string(), "MTWTF--");
  EXPECT_EQ(p.hot_days(), 5);
  EXPECT_TRUE(WeeklyPattern::parse("-------").never_hot());
  EXPECT_THROW(WeeklyPattern::parse("MTWTFS"), ConfigError);
  EXPECT_THROW(WeeklyPattern::parse("XTWTF--"), ConfigError);
  for (int b = 0; b < 128; ++b) {
    const WeeklyPattern q(static_cast<std::uint8_t>(b));
    EXPECT_EQ(WeeklyPattern::parse(q.to_string()), q);
  }
}

TEST(PatternMix, DefaultSumsToOneAndCoversAllPatterns) {
  const auto mix = PatternMix::table_default();
  double total = 0.0;
  int positive = 0;
  for (double p : mix.probabilities()) {
    total += p;
    positive += p > 0.0;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(positive, 128);
  EXPECT_NEAR(mix.probability(WeeklyPattern(0)), 0.70, 1e-12);
  EXPECT_THROW(PatternMix({{WeeklyPattern(3), 0.5}}), ConfigError);
}

TEST(SampleWeeklyPattern, DegenerateMix) {
  const PatternMix mix({{WeeklyPattern::parse("MTWTF--"), 1.0}});
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_weekly_pattern(mix, rng).to_string(), "MTWTF--");
  }
}

TEST(SampleWeeklyPattern, DefaultMixMatchesPublishedShares) {
  const auto mix = PatternMix::table_default();
  std::mt19937_64 rng(7);
  std::map<std::string, int> counts;
  int hot_draws = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto p = sample_weekly_pattern(mix, rng);
    if (p.never_hot()) continue;
    ++hot_draws;
    ++counts[p.to_string()];
  }
  EXPECT_NEAR(100.0 * counts["MTWTFSS"] / hot_draws, 14.4, 1.0);
  EXPECT_NEAR(100.0 * counts["----F--"] / hot_draws, 5.4, 1.0);
}

TEST(Generator, NoiselessRoundTripRecoversLatentHotness) {
  auto cfg = small_config();
  cfg.noise_std = 0.0;
  cfg.missingness = MissingnessConfig::none();
  const auto g = generate_dataset(cfg);
  EXPECT_EQ(g.missing_fraction, 0.0);
  const auto scores = core::compute_score_set(g.dataset, g.scoring);
  EXPECT_EQ(scores.y_day, g.truth.latent_hotness);
}

TEST(Generator, DefaultNoiseRecoversAtLeast95Percent) {
  auto cfg = small_config();
  cfg.missingness = MissingnessConfig::none();
  const auto g = generate_dataset(cfg);
  const auto scores = core::compute_score_set(g.dataset, g.scoring);
  std::size_t agree = 0;
  for (std::size_t idx = 0; idx < scores.y_day.data().size(); ++idx) {
    agree += scores.y_day.data()[idx] == g.truth.latent_hotness.data()[idx];
  }
  EXPECT_GE(static_cast<double>(agree) / scores.y_day.data().size(), 0.95);
}

TEST(Generator, ExactPersistentCount) {
  GeneratorConfig cfg;
  cfg.n_sectors = 1000;
  cfg.l_kpis = 4;
  cfg.persistent_hot_fraction = 0.05;
  cfg.missingness = MissingnessConfig::none();
  cfg.noise_std = 0.0;
  const auto g = generate_dataset(cfg);
  int all_hot = 0;
  for (std::size_t i = 0; i < cfg.n_sectors; ++i) {
    bool hot = true;
    for (auto v : g.truth.latent_hotness.row(i)) hot = hot && v;
    all_hot += hot;
  }
  EXPECT_EQ(all_hot, 50);
}

TEST(Generator, SameSeedIsBitIdentical) {
  const auto a = generate_dataset(small_config());
  const auto b = generate_dataset(small_config());
  ASSERT_EQ(a.dataset.kpi.size(), b.dataset.kpi.size());
  EXPECT_EQ(0, std::memcmp(a.dataset.kpi.data().data(), b.dataset.kpi.data().data(),
                           a.dataset.kpi.size() * sizeof(double)));
  EXPECT_EQ(a.dataset.missing, b.dataset.missing);
  EXPECT_EQ(a.truth.emerging_events, b.truth.emerging_events);
  auto other = small_config();
  other.seed = 43;
  const auto c = generate_dataset(other);
  EXPECT_NE(0, std::memcmp(a.dataset.kpi.data().data(), c.dataset.kpi.data().data(),
                           a.dataset.kpi.size() * sizeof(double)));
}

TEST(Generator, EmergingEventsHaveColdLeadAndHotTail) {
  auto cfg = small_config();
  cfg.m_weeks = 18;
  cfg.emerging_failure_rate = 1.5;
  cfg.noise_std = 0.0;
  cfg.missingness = MissingnessConfig::none();
  const auto g = generate_dataset(cfg);
  ASSERT_FALSE(g.truth.emerging_events.empty());
  const auto scores = core::compute_score_set(g.dataset, g.scoring);
  const auto& y = scores.y_become;
  for (const auto& e : g.truth.emerging_events) {
    ASSERT_GE(e.onset_day, 7u);
    ASSERT_GE(e.duration_days, 7u);
    for (std::size_t d = e.onset_day - 7; d < e.onset_day; ++d) {
      EXPECT_EQ(g.truth.latent_hotness(e.sector, d), 0);
    }
    for (std::size_t d = e.onset_day; d < e.onset_day + 7; ++d) {
      EXPECT_EQ(g.truth.latent_hotness(e.sector, d), 1);
    }
    // Exactly one activation within one day of onset.
    int hits = 0;
    for (std::size_t d = e.onset_day - 1; d <= e.onset_day + 1 && d < y.labels.cols(); ++d) {
      if (y.is_labeled(d)) hits += y.labels(e.sector, d);
    }
    if (y.is_labeled(e.onset_day - 1)) EXPECT_EQ(hits, 1) << "sector " << e.sector;
  }
}

TEST(Generator, TowersShareCoordinates) {
  const auto g = generate_dataset(small_config());
  for (std::size_t i = 0; i + 2 < 60; i += 3) {
    EXPECT_EQ(g.dataset.sector_coords[i], g.dataset.sector_coords[i + 1]);
    EXPECT_EQ(g.dataset.sector_coords[i], g.dataset.sector_coords[i + 2]);
    if (i >= 3) EXPECT_NE(g.dataset.sector_coords[i], g.dataset.sector_coords[i - 3]);
  }
}

TEST(Generator, RejectsInvalidConfig) {
  auto cfg = small_config();
  cfg.persistent_hot_fraction = 1.5;
  EXPECT_THROW(generate_dataset(cfg), ConfigError);
  cfg = small_config();
  cfg.l_kpis = 2;
  EXPECT_THROW(generate_dataset(cfg), ConfigError);
  cfg = small_config();
  cfg.missingness.point_rate = 0.7;
  cfg.missingness.row_rate = 0.5;
  EXPECT_THROW(generate_dataset(cfg), ConfigError);
}

class InjectMissingTest : public ::testing::Test {
 protected:
  core::KpiDataset clean() {
    auto cfg = small_config();
    cfg.missingness = MissingnessConfig::none();
    return generate_dataset(cfg).dataset;
  }
};

TEST_F(InjectMissingTest, ZeroRatesAreANoOp) {
  auto ds = clean();
  const auto before = ds.kpi;
  std::mt19937_64 rng(1);
  EXPECT_EQ(inject_missing(ds, MissingnessConfig::none(), rng), 0.0);
  EXPECT_EQ(ds.kpi, before);
}

TEST_F(InjectMissingTest, PointRateMatchesEmpiricalFraction) {
  auto ds = clean();
  auto m = MissingnessConfig::none();
  m.point_rate = 0.04;
  std::mt19937_64 rng(2);
  const double frac = inject_missing(ds, m, rng);
  EXPECT_NEAR(frac, 0.04, 0.002);
  for (std::size_t idx = 0; idx < ds.kpi.size(); ++idx) {
    EXPECT_EQ(ds.missing.data()[idx] == 1, std::isnan(ds.kpi.data()[idx]));
  }
}

TEST_F(InjectMissingTest, TemporalSlicesProduceMultiHourGaps) {
  auto ds = clean();
  auto m = MissingnessConfig::none();
  m.slice_start_rate = 0.002;
  std::mt19937_64 rng(3);
  inject_missing(ds, m, rng);
  std::size_t longest = 0;
  for (std::size_t i = 0; i < ds.n_sectors(); ++i) {
    std::size_t run = 0;
    for (std::size_t j = 0; j < ds.m_hours(); ++j) {
      bool all = true;
      for (auto v : ds.missing.fiber(i, j)) all = all && v;
      run = all ? run + 1 : 0;
      longest = std::max(longest, run);
    }
  }
  EXPECT_GE(longest, 2u);
}

TEST_F(InjectMissingTest, RequiresCleanMask) {
  auto ds = clean();
  ds.missing(0, 0, 0) = 1;
  std::mt19937_64 rng(4);
  EXPECT_THROW(inject_missing(ds, MissingnessConfig{}, rng), DataError);
}

TEST(Generator, DefaultMissingnessNearFourPercent) {
  auto cfg = small_config();
  const auto g = generate_dataset(cfg);
  EXPECT_NEAR(g.missing_fraction, 0.04, 0.01);
}

}  // namespace
}  // namespace hotspot::synth
