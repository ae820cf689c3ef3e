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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hotspot::synth {

namespace {

constexpr const char* kDayLetters = "MTWTFSS";

// Normalized KPI levels; 1.0 is the KPI threshold.
constexpr double kHotFloor = 1.15;
constexpr double kHotSpan = 0.35;
constexpr double kColdLevelMin = 0.25;
constexpr double kColdLevelMax = 0.75;
constexpr double kPrecursorPeak = 0.85;
// First hour of the day at which a hot day exceeds thresholds.
constexpr std::size_t kFirstActiveHour = 4;
// Target daily score of a hot day. A 6-day hot week then stays above and a
// 5-day week below a 0.6 weekly threshold.
constexpr double kHotDayScore = 0.77;

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

WeeklyPattern WeeklyPattern::parse(const std::string& text) {
  if (text.size() != 7) throw ConfigError("weekly pattern must have 7 days: '" + text + "'");
  std::uint8_t bits = 0;
  for (int d = 0; d < 7; ++d) {
    if (text[d] == kDayLetters[d]) {
      bits |= static_cast<std::uint8_t>(1u << d);
    } else if (text[d] != '-') {
      throw ConfigError("malformed weekly pattern '" + text + "'");
    }
  }
  return WeeklyPattern(bits);
}

std::string WeeklyPattern::to_string() const {
  std::string s(7, '-');
  for (int d = 0; d < 7; ++d) {
    if (hot(d)) s[d] = kDayLetters[d];
  }
  return s;
}

int WeeklyPattern::hot_days() const { return std::popcount(bits_); }

const std::vector<std::pair<std::string, double>>& published_top_patterns() {
  static const std::vector<std::pair<std::string, double>> kTop = {
      {"MTWTFSS", 14.4}, {"MTWTF--", 8.5}, {"MTWTFS-", 7.2}, {"----F--", 5.4},
      {"-----S-", 4.7},  {"M------", 4.1}, {"-T-----", 4.1}, {"---T---", 3.9},
      {"------S", 3.5},  {"--W----", 3.2}, {"-TWTF--", 2.4}, {"MTWT---", 2.3},
      {"---TF--", 1.7},  {"MT-----", 1.6}, {"----FS-", 1.5}, {"MTW----", 1.4},
      {"--WTF--", 1.4},  {"--WT---", 1.3}, {"-----SS", 1.3}};
  return kTop;
}

PatternMix::PatternMix(std::vector<std::pair<WeeklyPattern, double>> entries) {
  require(!entries.empty(), "pattern mix is empty");
  for (const auto& [pattern, p] : entries) probs_[pattern.bits()] += p;
  validate();
}

PatternMix PatternMix::table_default(double never_hot_probability) {
  require(never_hot_probability >= 0.0 && never_hot_probability < 1.0,
          "never-hot probability must lie in [0, 1)");
  const auto& top = published_top_patterns();
  std::array<bool, WeeklyPattern::kCount> listed{};
  double listed_share = 0.0;
  std::vector<std::pair<WeeklyPattern, double>> entries;
  for (const auto& [text, pct] : top) {
    const WeeklyPattern p = WeeklyPattern::parse(text);
    listed[p.bits()] = true;
    listed_share += pct / 100.0;
    entries.emplace_back(p, (1.0 - never_hot_probability) * pct / 100.0);
  }
  const int unlisted = WeeklyPattern::kCount - 1 - static_cast<int>(top.size());
  const double each = (1.0 - never_hot_probability) * (1.0 - listed_share) / unlisted;
  for (int bits = 1; bits < WeeklyPattern::kCount; ++bits) {
    if (!listed[bits]) entries.emplace_back(WeeklyPattern(static_cast<std::uint8_t>(bits)), each);
  }
  if (never_hot_probability > 0.0) entries.emplace_back(WeeklyPattern(0), never_hot_probability);
  return PatternMix(std::move(entries));
}

void PatternMix::validate() const {
  double total = 0.0;
  for (double p : probs_) {
    require(std::isfinite(p) && p >= 0.0, "pattern probabilities must be non-negative");
    total += p;
  }
  require(total > 0.0, "pattern mix is empty");
  require(std::abs(total - 1.0) <= 1e-9, "pattern mix probabilities must sum to 1");
}

WeeklyPattern sample_weekly_pattern(const PatternMix& mix, std::mt19937_64& rng) {
  const auto& probs = mix.probabilities();
  const double u = uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (int bits = 0; bits < WeeklyPattern::kCount; ++bits) {
    if (probs[bits] <= 0.0) continue;
    last_positive = bits;
    acc += probs[bits];
    if (u < acc) return WeeklyPattern(static_cast<std::uint8_t>(bits));
  }
  if (acc <= 0.0) throw ConfigError("pattern mix is empty");
  return WeeklyPattern(static_cast<std::uint8_t>(last_positive));
}

std::string to_string(KpiGroup g) {
  switch (g) {
    case KpiGroup::kUsage:
      return "usage";
    case KpiGroup::kCongestion:
      return "congestion";
    case KpiGroup::kInterference:
      return "interference";
    case KpiGroup::kGeneral:
      return "general";
  }
  return "general";
}

KpiGroup kpi_group(std::size_t k) {
  switch (k % 4) {
    case 0:
      return KpiGroup::kUsage;
    case 1:
      return KpiGroup::kCongestion;
    case 2:
      return KpiGroup::kInterference;
    default:
      return KpiGroup::kGeneral;
  }
}

MissingnessConfig MissingnessConfig::none() {
  MissingnessConfig m;
  m.point_rate = 0.0;
  m.row_rate = 0.0;
  m.slice_start_rate = 0.0;
  m.outage_sector_fraction = 0.0;
  return m;
}

double MissingnessConfig::expected_fraction() const {
  return point_rate + row_rate + slice_start_rate * slice_mean_length;
}

void MissingnessConfig::validate() const {
  for (double r : {point_rate, row_rate, slice_start_rate, outage_sector_fraction}) {
    require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "missingness rates must lie in [0, 1]");
  }
  require(slice_mean_length >= 2.0, "temporal slices must last at least 2 hours on average");
  require(expected_fraction() <= 1.0, "missingness rates would exceed 100% missing");
}

std::array<double, kHoursPerDay> GeneratorConfig::default_daily_shape() {
  std::array<double, kHoursPerDay> shape{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double z = (static_cast<double>(h) - 16.5) / 4.0;
    shape[h] = 0.35 + 0.65 * std::exp(-0.5 * z * z);
  }
  return shape;
}

void GeneratorConfig::validate() const {
  require(n_sectors >= 1, "n_sectors must be positive");
  require(m_weeks >= 1, "m_weeks must be positive");
  require(l_kpis >= 4, "the generator needs at least 4 KPIs (one per group)");
  weekly_pattern_mix.validate();
  for (double r : {pattern_consistency, persistent_hot_fraction, tower_share}) {
    require(r >= 0.0 && r <= 1.0, "rates must lie in [0, 1]");
  }
  require(emerging_failure_rate >= 0.0, "emerging failure rate must be non-negative");
  require(emerging_min_days >= kDaysPerWeek && emerging_min_days <= emerging_max_days,
          "emerging failures must last at least 7 days");
  require(sectors_per_tower >= 1, "sectors_per_tower must be positive");
  require(tower_grid_km > 0.0, "tower grid spacing must be positive");
  for (double v : daily_shape) {
    require(v >= 0.0 && v <= 1.0, "daily shape values must lie in [0, 1]");
  }
  require(noise_std >= 0.0 && noise_std <= 1.0, "noise_std must lie in [0, 1]");
  missingness.validate();
  require(hot_threshold > 0.0 && hot_threshold < 1.0, "hot threshold must lie in (0, 1)");
  (void)core::parse_date(start_date);
  for (const auto& h : holidays) (void)core::parse_date(h);
}

double inject_missing(core::KpiDataset& data, const MissingnessConfig& cfg,
                      std::mt19937_64& rng) {
  cfg.validate();
  if (data.missing_count() != 0) {
    throw DataError("inject_missing expects an all-false mask");
  }
  const std::size_t n = data.n_sectors();
  const std::size_t m = data.m_hours();
  const std::size_t l = data.l_kpis();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto mark = [&](std::size_t i, std::size_t j, std::size_t k) {
    data.missing(i, j, k) = 1;
    data.kpi(i, j, k) = nan;
  };

  std::bernoulli_distribution point(cfg.point_rate);
  std::bernoulli_distribution row(cfg.row_rate);
  std::bernoulli_distribution slice(cfg.slice_start_rate);
  std::geometric_distribution<int> extra_length(
      1.0 / std::max(1.0, cfg.slice_mean_length - 1.0));
  std::bernoulli_distribution outage(cfg.outage_sector_fraction);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (cfg.point_rate > 0.0) {
        for (std::size_t k = 0; k < l; ++k) {
          if (point(rng)) mark(i, j, k);
        }
      }
      if (cfg.row_rate > 0.0 && row(rng)) {
        for (std::size_t k = 0; k < l; ++k) mark(i, j, k);
      }
      if (cfg.slice_start_rate > 0.0 && slice(rng)) {
        const std::size_t len = 2 + static_cast<std::size_t>(extra_length(rng));
        for (std::size_t t = j; t < std::min(m, j + len); ++t) {
          for (std::size_t k = 0; k < l; ++k) mark(i, t, k);
        }
      }
    }
    if (cfg.outage_sector_fraction > 0.0 && outage(rng)) {
      const std::size_t len = std::min<std::size_t>(
          m, std::uniform_int_distribution<std::size_t>(100, kHoursPerWeek)(rng));
      const std::size_t start =
          std::uniform_int_distribution<std::size_t>(0, m - len)(rng);
      for (std::size_t t = start; t < start + len; ++t) {
        for (std::size_t k = 0; k < l; ++k) mark(i, t, k);
      }
    }
  }
  return static_cast<double>(data.missing_count()) / static_cast<double>(data.kpi.size());
}

namespace {

struct SectorPlan {
  std::vector<std::uint8_t> hot_days;
  std::vector<EmergingEvent> events;
  WeeklyPattern assigned;
  bool persistent = false;
};

// Places up to `count` events on an existing latent sequence. Each event
// keeps 7 cold days before onset and at least 7 hot days after it.
void place_events(SectorPlan& plan, std::size_t sector, std::size_t count,
                  const GeneratorConfig& cfg, std::mt19937_64& rng) {
  const std::size_t m_days = plan.hot_days.size();
  if (m_days < 2 * kDaysPerWeek + 1) return;
  // Days already claimed by an event (including its cold lead-in).
  std::vector<std::uint8_t> claimed(m_days, 0);
  std::uniform_int_distribution<std::size_t> onset_dist(kDaysPerWeek,
                                                        m_days - kDaysPerWeek);
  std::uniform_int_distribution<std::size_t> duration_dist(cfg.emerging_min_days,
                                                           cfg.emerging_max_days);
  for (std::size_t e = 0; e < count; ++e) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      const std::size_t onset = onset_dist(rng);
      const std::size_t duration = duration_dist(rng);
      const std::size_t end = std::min(m_days, onset + duration);
      // Leave one extra free week after the event so the next one re-arms.
      const std::size_t guard_end = std::min(m_days, end + kDaysPerWeek);
      bool free = true;
      for (std::size_t d = onset - kDaysPerWeek; d < guard_end; ++d) {
        if (claimed[d]) free = false;
      }
      if (!free) continue;
      for (std::size_t d = onset - kDaysPerWeek; d < guard_end; ++d) claimed[d] = 1;
      for (std::size_t d = onset - kDaysPerWeek; d < onset; ++d) plan.hot_days[d] = 0;
      for (std::size_t d = onset; d < end; ++d) plan.hot_days[d] = 1;
      plan.events.push_back({sector, onset, end - onset});
      break;
    }
  }
  std::ranges::sort(plan.events, {}, &EmergingEvent::onset_day);
}

}  // namespace

GeneratedData generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.n_sectors;
  const std::size_t m_days = cfg.m_weeks * kDaysPerWeek;
  const std::size_t m_hours = m_days * kHoursPerDay;
  const std::size_t l = cfg.l_kpis;

  GeneratedData out;
  core::KpiDataset& ds = out.dataset;
  GroundTruth& truth = out.truth;

  // Calendar.
  ds.start_date = core::parse_date(cfg.start_date);
  for (const auto& h : cfg.holidays) ds.holidays.push_back(core::parse_date(h));
  ds.calendar = core::build_calendar(ds.start_date, m_hours, ds.holidays);
  const int start_dow = ds.calendar(0, core::kDayOfWeek);

  // KPI groups, thresholds and weights. The hot subset carries just enough
  // weight for a hot day to reach kHotDayScore.
  truth.kpi_groups.resize(l);
  std::size_t general_count = 0;
  for (std::size_t k = 0; k < l; ++k) {
    truth.kpi_groups[k] = kpi_group(k);
    if (truth.kpi_groups[k] == KpiGroup::kGeneral) ++general_count;
  }
  const double active_fraction =
      static_cast<double>(kHoursPerDay - kFirstActiveHour) / kHoursPerDay;
  const double hot_weight = kHotDayScore / active_fraction;
  std::vector<double> raw_weight(l);
  for (std::size_t k = 0; k < l; ++k) {
    raw_weight[k] = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
  }
  double hot_raw = 0.0;
  double general_raw = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    (truth.kpi_groups[k] == KpiGroup::kGeneral ? general_raw : hot_raw) += raw_weight[k];
  }
  out.scoring.weights.resize(l);
  out.scoring.kpi_thresholds.resize(l);
  std::vector<double> scale(l);
  for (std::size_t k = 0; k < l; ++k) {
    const bool general = truth.kpi_groups[k] == KpiGroup::kGeneral;
    out.scoring.weights[k] = general ? (1.0 - hot_weight) * raw_weight[k] / general_raw
                                     : hot_weight * raw_weight[k] / hot_raw;
    // Arbitrary per-KPI units, log-uniform over [0.1, 100].
    scale[k] = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 2.0)(rng));
    out.scoring.kpi_thresholds[k] = scale[k];
  }
  out.scoring.hot_threshold = cfg.hot_threshold;
  (void)general_count;

  // Towers on a jittered square grid.
  const std::size_t towers = (n + cfg.sectors_per_tower - 1) / cfg.sectors_per_tower;
  const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(towers))));
  std::vector<core::Coordinates> tower_xy(towers);
  std::uniform_real_distribution<double> jitter(-0.4 * cfg.tower_grid_km, 0.4 * cfg.tower_grid_km);
  for (std::size_t t = 0; t < towers; ++t) {
    tower_xy[t].x_km = static_cast<double>(t % side) * cfg.tower_grid_km + jitter(rng);
    tower_xy[t].y_km = static_cast<double>(t / side) * cfg.tower_grid_km + jitter(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ds.sector_coords.push_back(tower_xy[i / cfg.sectors_per_tower]);
    ds.sector_ids.push_back(static_cast<int>(i));
  }

  // Persistent sectors: an exact count.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_persistent =
      static_cast<std::size_t>(std::llround(cfg.persistent_hot_fraction * static_cast<double>(n)));
  truth.persistent.assign(n, 0);
  for (std::size_t r = 0; r < n_persistent; ++r) truth.persistent[order[r]] = 1;

  // Latent day-level hotness.
  truth.latent_hotness = BoolMatrix(n, m_days);
  truth.assigned_pattern.resize(n);
  std::vector<SectorPlan> plans(n);
  std::poisson_distribution<int> event_count(std::max(cfg.emerging_failure_rate, 1e-300));
  std::bernoulli_distribution copy_leader(cfg.tower_share);
  std::bernoulli_distribution keep_assigned(cfg.pattern_consistency);
  for (std::size_t i = 0; i < n; ++i) {
    SectorPlan& plan = plans[i];
    plan.hot_days.assign(m_days, 0);
    const std::size_t leader = (i / cfg.sectors_per_tower) * cfg.sectors_per_tower;
    if (truth.persistent[i]) {
      plan.persistent = true;
      plan.assigned = WeeklyPattern(0x7f);
      std::ranges::fill(plan.hot_days, 1);
    } else if (leader != i && !truth.persistent[leader] && copy_leader(rng)) {
      plan.assigned = plans[leader].assigned;
      plan.hot_days = plans[leader].hot_days;
      for (EmergingEvent e : plans[leader].events) {
        e.sector = i;
        plan.events.push_back(e);
      }
    } else {
      plan.assigned = sample_weekly_pattern(cfg.weekly_pattern_mix, rng);
      for (int attempt = 0;; ++attempt) {
        for (std::size_t w = 0; w < cfg.m_weeks; ++w) {
          const WeeklyPattern week = keep_assigned(rng)
                                         ? plan.assigned
                                         : sample_weekly_pattern(cfg.weekly_pattern_mix, rng);
          for (std::size_t d = 0; d < kDaysPerWeek; ++d) {
            const int dow = static_cast<int>((start_dow + d) % kDaysPerWeek);
            plan.hot_days[w * kDaysPerWeek + d] = week.hot(dow) ? 1 : 0;
          }
        }
        const std::size_t count =
            cfg.emerging_failure_rate > 0.0 ? static_cast<std::size_t>(event_count(rng)) : 0;
        place_events(plan, i, count, cfg, rng);
        // Only the persistent sectors may be hot on every day.
        const bool all_hot = std::ranges::all_of(plan.hot_days, [](auto v) { return v == 1; });
        if (!all_hot || attempt > 100) break;
        plan.events.clear();
      }
    }
    truth.assigned_pattern[i] = plan.assigned;
    for (std::size_t d = 0; d < m_days; ++d) truth.latent_hotness(i, d) = plan.hot_days[d];
    for (const auto& e : plan.events) truth.emerging_events.push_back(e);
  }

  // KPI values.
  ds.kpi = Tensor3<double>(n, m_hours, l);
  ds.missing = Tensor3<std::uint8_t>(n, m_hours, l);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> level_dist(kColdLevelMin, kColdLevelMax);
  std::vector<double> level(l);
  std::vector<double> precursor(m_days);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < l; ++k) level[k] = level_dist(rng);
    std::ranges::fill(precursor, 0.0);
    for (const auto& e : plans[i].events) {
      for (std::size_t back = 1; back <= cfg.precursor_days && back <= e.onset_day; ++back) {
        const double ramp = static_cast<double>(cfg.precursor_days - back + 1) /
                            static_cast<double>(cfg.precursor_days);
        auto& p = precursor[e.onset_day - back];
        p = std::max(p, ramp);
      }
    }
    for (std::size_t j = 0; j < m_hours; ++j) {
      const std::size_t day = j / kHoursPerDay;
      const std::size_t hour = j % kHoursPerDay;
      const double shape = cfg.daily_shape[hour];
      const bool hot = plans[i].hot_days[day] && hour >= kFirstActiveHour;
      for (std::size_t k = 0; k < l; ++k) {
        const KpiGroup g = truth.kpi_groups[k];
        double u;
        if (hot && g != KpiGroup::kGeneral) {
          u = kHotFloor + kHotSpan * shape;
        } else {
          u = level[k] * shape;
          if (g == KpiGroup::kInterference && precursor[day] > 0.0) {
            u += precursor[day] * (kPrecursorPeak - u);
          }
        }
        if (cfg.noise_std > 0.0) u += cfg.noise_std * noise(rng);
        ds.kpi(i, j, k) = scale[k] * u;
      }
    }
  }

  std::mt19937_64 missing_rng(derive_seed(cfg.seed, 0x6d697373));
  out.missing_fraction = inject_missing(ds, cfg.missingness, missing_rng);
  return out;
}

}  // namespace hotspot::synth
