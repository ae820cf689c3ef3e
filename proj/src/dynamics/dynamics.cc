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

#include "hotspot/dynamics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace hotspot::dynamics {

double Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

std::vector<double> Histogram::frequencies() const {
  const double t = total();
  std::vector<double> f(counts.size(), 0.0);
  if (t > 0.0) {
    for (std::size_t b = 0; b < counts.size(); ++b) f[b] = counts[b] / t;
  }
  return f;
}

namespace {

// Sums of `block` consecutive labels, one per whole block.
Histogram block_histogram(const BoolMatrix& y, std::size_t block) {
  Histogram h;
  h.counts.assign(block + 1, 0.0);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t b = 0; (b + 1) * block <= y.cols(); ++b) {
      std::size_t s = 0;
      for (std::size_t j = b * block; j < (b + 1) * block; ++j) s += y(i, j) != 0;
      h.counts[s] += 1.0;
    }
  }
  return h;
}

}  // namespace

DutyHistograms duty_histograms(const BoolMatrix& y_hour, const BoolMatrix& y_day,
                               const BoolMatrix& y_week) {
  require(y_hour.rows() == y_day.rows() && y_day.rows() == y_week.rows(),
          "label matrices differ in sector count");
  DutyHistograms d;
  d.hours_per_day = block_histogram(y_hour, kHoursPerDay);
  d.days_per_week = block_histogram(y_day, kDaysPerWeek);
  d.weeks_per_sector = block_histogram(y_week, y_week.cols());
  return d;
}

RunLengths run_lengths(const BoolMatrix& labels) {
  RunLengths r;
  for (std::size_t i = 0; i < labels.rows(); ++i) {
    std::size_t run = 0;
    for (std::size_t j = 0; j <= labels.cols(); ++j) {
      if (j < labels.cols() && labels(i, j)) {
        ++run;
      } else if (run > 0) {
        ++r[run];
        run = 0;
      }
    }
  }
  return r;
}

RunLengthHistograms run_length_histograms(const BoolMatrix& y_hour, const BoolMatrix& y_day) {
  return {run_lengths(y_hour), run_lengths(y_day)};
}

std::string pattern_string(std::uint8_t bits) {
  static const char kLetters[] = "MTWTFSS";
  std::string s(7, '-');
  for (int d = 0; d < 7; ++d) {
    if (bits & (1u << d)) s[d] = kLetters[d];
  }
  return s;
}

std::vector<PatternShare> weekly_pattern_census(const BoolMatrix& y_day,
                                                std::size_t first_weekday,
                                                bool exclude_never_hot) {
  require(first_weekday < 7, "weekday must lie in [0, 6]");
  std::vector<std::size_t> counts(128, 0);
  for (std::size_t i = 0; i < y_day.rows(); ++i) {
    for (std::size_t w = 0; (w + 1) * kDaysPerWeek <= y_day.cols(); ++w) {
      std::uint8_t bits = 0;
      for (std::size_t d = 0; d < kDaysPerWeek; ++d) {
        if (y_day(i, w * kDaysPerWeek + d)) bits |= static_cast<std::uint8_t>(1u << ((d + first_weekday) % 7));
      }
      ++counts[bits];
    }
  }
  std::vector<PatternShare> out;
  std::size_t total = 0;
  for (unsigned b = 0; b < 128; ++b) {
    if (exclude_never_hot && b == 0) continue;
    total += counts[b];
    if (counts[b] > 0) out.push_back({static_cast<std::uint8_t>(b), counts[b], 0.0});
  }
  for (auto& p : out) p.share = total ? 100.0 * static_cast<double>(p.count) / static_cast<double>(total) : 0.0;
  std::stable_sort(out.begin(), out.end(), [](const PatternShare& a, const PatternShare& b) {
    return a.count > b.count;
  });
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && !a.empty(), "pearson needs equal, non-empty series");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

double sorted_percentile(const std::vector<double>& v, double p) {
  const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  s.p5 = sorted_percentile(values, 5);
  s.p25 = sorted_percentile(values, 25);
  s.p50 = sorted_percentile(values, 50);
  s.p75 = sorted_percentile(values, 75);
  s.p95 = sorted_percentile(values, 95);
  return s;
}

ConsistencyResult weekly_consistency(const BoolMatrix& y_day) {
  ConsistencyResult r;
  const std::size_t weeks = y_day.cols() / kDaysPerWeek;
  std::vector<double> included;
  for (std::size_t i = 0; i < y_day.rows(); ++i) {
    std::vector<double> avg(kDaysPerWeek, 0.0);
    for (std::size_t w = 0; w < weeks; ++w)
      for (std::size_t d = 0; d < kDaysPerWeek; ++d) avg[d] += y_day(i, w * kDaysPerWeek + d);
    for (auto& v : avg) v /= static_cast<double>(std::max<std::size_t>(weeks, 1));
    double sum = 0.0;
    std::size_t used = 0;
    std::vector<double> week(kDaysPerWeek);
    for (std::size_t w = 0; w < weeks; ++w) {
      for (std::size_t d = 0; d < kDaysPerWeek; ++d) week[d] = y_day(i, w * kDaysPerWeek + d);
      if (const auto c = pearson(week, avg)) {
        sum += *c;
        ++used;
      }
    }
    if (used == 0) {
      r.per_sector.push_back(std::numeric_limits<double>::quiet_NaN());
      ++r.excluded_sectors;
    } else {
      r.per_sector.push_back(sum / static_cast<double>(used));
      included.push_back(r.per_sector.back());
    }
  }
  r.summary = summarize(std::move(included));
  return r;
}

DistanceBuckets DistanceBuckets::logarithmic(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi > lo && count >= 1, "invalid logarithmic bucket range");
  DistanceBuckets b;
  b.edges.push_back(0.0);
  for (std::size_t k = 0; k <= count; ++k) {
    b.edges.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(count)));
  }
  return b;
}

void DistanceBuckets::validate() const {
  require(edges.size() >= 2 && edges[0] == 0.0, "distance buckets need the 0 km bucket first");
  for (std::size_t k = 1; k + 1 < edges.size(); ++k) {
    require(edges[k] < edges[k + 1], "bucket edges must be strictly increasing");
  }
  require(edges[1] > 0.0, "first range edge must be positive");
}

std::optional<std::size_t> DistanceBuckets::bucket(double d) const {
  if (d <= 1e-9) return 0;
  // edges[0] is the 0 km marker; ranges are [edges[k], edges[k+1]) for k >= 1.
  for (std::size_t k = 1; k + 1 < edges.size(); ++k) {
    if (d >= edges[k] && d < edges[k + 1]) return k;
  }
  return std::nullopt;
}

std::string DistanceBuckets::label(std::size_t b) const {
  if (b == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g-%.3g", edges[b], edges[b + 1]);
  return buf;
}

std::string to_string(SpatialMode m) {
  switch (m) {
    case SpatialMode::kAvgNearest: return "avg-nearest";
    case SpatialMode::kMaxNearest: return "max-nearest";
    case SpatialMode::kMaxTopCorrelated: return "max-top-correlated";
  }
  return "?";
}

SpatialMode parse_spatial_mode(const std::string& name) {
  for (auto m : {SpatialMode::kAvgNearest, SpatialMode::kMaxNearest, SpatialMode::kMaxTopCorrelated}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown spatial mode '" + name + "'");
}

namespace {

BoxStats box(std::vector<double> v) {
  BoxStats b;
  b.count = v.size();
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  b.min = v.front();
  b.max = v.back();
  b.q1 = sorted_percentile(v, 25);
  b.median = sorted_percentile(v, 50);
  b.q3 = sorted_percentile(v, 75);
  b.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  return b;
}

}  // namespace

SpatialResult spatial_correlation(const BoolMatrix& y_hour,
                                  const std::vector<core::Coordinates>& coords,
                                  const SpatialConfig& cfg) {
  cfg.buckets.validate();
  const std::size_t n = y_hour.rows(), m = y_hour.cols();
  if (n < 2) throw DataError("spatial correlation needs at least two sectors");
  require(coords.size() == n, "one coordinate per sector is required");

  // Centred, unit-norm series make each correlation a dot product.
  std::vector<std::vector<double>> z(n, std::vector<double>(m));
  std::vector<std::uint8_t> constant(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += y_hour(i, j);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      z[i][j] = y_hour(i, j) - mean;
      ss += z[i][j] * z[i][j];
    }
    if (ss <= 0.0) {
      constant[i] = 1;
    } else {
      for (auto& v : z[i]) v /= std::sqrt(ss);
    }
  }
  auto corr = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += z[a][j] * z[b][j];
    return std::clamp(s, -1.0, 1.0);
  };
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::hypot(coords[a].x_km - coords[b].x_km, coords[a].y_km - coords[b].y_km);
  };

  const std::size_t B = cfg.buckets.size();
  const bool nearest = cfg.mode != SpatialMode::kMaxTopCorrelated;
  const std::size_t k = std::min(nearest ? cfg.neighbors : cfg.top_correlated, n - 1);
  const bool use_max = cfg.mode != SpatialMode::kAvgNearest;

  struct SectorOut {
    std::vector<double> value;  // per bucket, NaN when empty
    std::size_t assigned = 0, out_of_range = 0, undefined = 0;
  };
  std::vector<SectorOut> per(n);

  auto work = [&](std::size_t i) {
    SectorOut& o = per[i];
    o.value.assign(B, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::vector<std::pair<std::size_t, double>> partners;  // (sector, corr)
    if (nearest) {
      std::vector<double> d(n);
      for (auto j : others) d[j] = dist(i, j);
      std::stable_sort(others.begin(), others.end(), [&](auto a, auto b) { return d[a] < d[b]; });
      for (std::size_t q = 0; q < k; ++q) {
        const auto j = others[q];
        if (constant[i] || constant[j]) {
          ++o.undefined;
        } else {
          partners.push_back({j, corr(i, j)});
        }
      }
    } else {
      if (constant[i]) {
        o.undefined += k;
      } else {
        std::vector<std::pair<std::size_t, double>> all;
        for (auto j : others) {
          if (constant[j]) continue;
          all.push_back({j, corr(i, j)});
        }
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        if (all.size() > k) all.resize(k);
        o.undefined += k - all.size();
        partners = std::move(all);
      }
    }
    std::vector<double> sum(B, 0.0);
    std::vector<std::size_t> cnt(B, 0);
    for (const auto& [j, c] : partners) {
      const auto b = cfg.buckets.bucket(dist(i, j));
      if (!b) {
        ++o.out_of_range;
        continue;
      }
      ++o.assigned;
      if (use_max) {
        sum[*b] = cnt[*b] ? std::max(sum[*b], c) : c;
      } else {
        sum[*b] += c;
      }
      ++cnt[*b];
    }
    for (std::size_t b = 0; b < B; ++b) {
      if (cnt[b]) o.value[b] = use_max ? sum[b] : sum[b] / static_cast<double>(cnt[b]);
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  SpatialResult r;
  r.buckets = cfg.buckets;
  r.per_sector.assign(B, {});
  for (const auto& o : per) {
    r.assigned += o.assigned;
    r.out_of_range += o.out_of_range;
    r.undefined += o.undefined;
    for (std::size_t b = 0; b < B; ++b) {
      if (!std::isnan(o.value[b])) r.per_sector[b].push_back(o.value[b]);
    }
  }
  for (std::size_t b = 0; b < B; ++b) r.stats.push_back(box(r.per_sector[b]));
  return r;
}

}  // namespace hotspot::dynamics
