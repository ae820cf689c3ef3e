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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hotspot/features.h"
#include "hotspot/pipeline.h"
#include "hotspot/svg.h"

namespace hotspot::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string schema_line() { return "# schema_version=" + std::to_string(kSchemaVersion) + "\n"; }

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fixed-precision, locale-free number for human tables.
std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string bits_string(const BoolMatrix& m, std::size_t i) {
  std::string s(m.cols(), '0');
  for (std::size_t j = 0; j < m.cols(); ++j) s[j] = m(i, j) ? '1' : '0';
  return s;
}

}  // namespace

std::string cmd_generate(const PipelineConfig& cfg, const Layout& layout) {
  auto g = cfg.generator;
  g.seed = cfg.stage_seed("generate");
  const auto out = synth::generate_dataset(g);
  write_dataset(layout.dataset, out.dataset, out.scoring);

  ordered_json t;
  t["schema_version"] = kSchemaVersion;
  t["seed"] = g.seed;
  t["missing_fraction"] = out.missing_fraction;
  std::vector<std::string> hot, pattern;
  for (std::size_t i = 0; i < out.truth.latent_hotness.rows(); ++i) {
    hot.push_back(bits_string(out.truth.latent_hotness, i));
    pattern.push_back(out.truth.assigned_pattern[i].to_string());
  }
  t["latent_hotness"] = hot;
  t["assigned_pattern"] = pattern;
  t["persistent"] = out.truth.persistent;
  ordered_json ev = ordered_json::array();
  for (const auto& e : out.truth.emerging_events) {
    ev.push_back({{"sector", e.sector}, {"onset_day", e.onset_day}, {"duration_days", e.duration_days}});
  }
  t["emerging_events"] = ev;
  std::vector<std::string> groups;
  for (auto k : out.truth.kpi_groups) groups.push_back(synth::to_string(k));
  t["kpi_groups"] = groups;
  write_file(layout.truth, t.dump() + "\n");

  return "generated " + std::to_string(g.n_sectors) + " sectors x " + std::to_string(g.m_weeks) + " weeks x " +
         std::to_string(g.l_kpis) + " KPIs, " + fixed(100.0 * out.missing_fraction, 2) + "% missing -> " +
         layout.dataset.string();
}

std::string cmd_impute(const PipelineConfig& cfg, const Layout& layout) {
  const auto stored = read_dataset(layout.dataset);
  const auto filtered = impute::filter_sectors(stored.data);
  if (filtered.kept.empty()) throw DataError("every sector failed the missing-data filter");
  fs::create_directories(layout.imputed);

  core::KpiDataset done;
  const std::uint64_t seed = cfg.stage_seed("impute");
  std::string method;
  if (cfg.impute_method == ImputeMethod::kAutoencoder) {
    method = "autoencoder";
    auto spec = cfg.autoencoder;
    spec.input_width = impute::AutoencoderSpec::for_kpis(filtered.data.l_kpis()).input_width;
    std::vector<double> trace;
    const auto model = impute::fit_imputation_model(filtered.data, spec, seed, &trace);
    done = impute::impute_missing(filtered.data, model, cfg.threads);
    impute::save_model(model, (layout.imputed / "autoencoder.bin").string());
    std::string csv = schema_line() + "batch,loss\n";
    for (std::size_t b = 0; b < trace.size(); ++b) csv += std::to_string(b) + "," + format_double(trace[b]) + "\n";
    write_file(layout.imputed / "loss_trace.csv", csv);
  } else {
    method = "carry-forward";
    done = impute::carry_forward_impute(filtered.data);
  }
  write_dataset(layout.imputed, done, stored.scoring);

  ordered_json f;
  f["schema_version"] = kSchemaVersion;
  f["method"] = method;
  f["seed"] = seed;
  f["missing_entries"] = filtered.data.missing_count();
  std::vector<int> kept, dropped;
  for (auto i : filtered.kept) kept.push_back(stored.data.sector_ids[i]);
  for (auto i : filtered.discarded) dropped.push_back(stored.data.sector_ids[i]);
  f["kept"] = kept;
  f["discarded"] = dropped;
  write_file(layout.imputed / "filter.json", f.dump(2) + "\n");
  return "imputed " + std::to_string(filtered.data.missing_count()) + " entries with " + method + "; kept " +
         std::to_string(kept.size()) + ", discarded " + std::to_string(dropped.size()) + " sectors -> " +
         layout.imputed.string();
}

namespace {

void write_histogram(const fs::path& dir, const std::string& stem, const std::string& title,
                     const std::string& x_label, const dynamics::Histogram& h, std::string& csv) {
  const auto freq = h.frequencies();
  std::vector<std::string> cats;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    cats.push_back(std::to_string(b));
    csv += stem + "," + std::to_string(b) + "," + format_double(h.counts[b]) + "," + format_double(freq[b]) + "\n";
  }
  write_file(dir / (stem + ".svg"), svg::bar_chart({title, x_label, "frequency"}, cats, freq));
}

void write_runs(const fs::path& dir, const std::string& stem, const std::string& title, const std::string& x_label,
                const dynamics::RunLengths& runs, std::string& csv) {
  double total = 0.0;
  for (const auto& [len, c] : runs) total += static_cast<double>(c);
  std::vector<std::string> cats;
  std::vector<double> freq;
  for (const auto& [len, c] : runs) {
    const double f = total > 0 ? static_cast<double>(c) / total : 0.0;
    cats.push_back(std::to_string(len));
    freq.push_back(f);
    csv += stem + "," + std::to_string(len) + "," + std::to_string(c) + "," + format_double(f) + "\n";
  }
  write_file(dir / (stem + ".svg"), svg::bar_chart({title, x_label, "frequency"}, cats, freq));
}

ordered_json summary_json(const dynamics::Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"p5", s.p5}, {"p25", s.p25},
          {"p50", s.p50}, {"p75", s.p75}, {"p95", s.p95}};
}

}  // namespace

std::string cmd_analyze(const PipelineConfig& cfg, const Layout& layout) {
  const auto stored = read_dataset(layout.imputed);
  const auto& data = stored.data;
  const auto scores = core::compute_score_set(data, stored.scoring);
  const fs::path dir = layout.analysis;
  fs::create_directories(dir);
  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["n_sectors"] = data.n_sectors();
  summary["m_days"] = data.m_days();

  const auto duty = dynamics::duty_histograms(scores.y_hour, scores.y_day, scores.y_week);
  std::string csv = schema_line() + "histogram,bin,count,frequency\n";
  write_histogram(dir, "duty_hours_per_day", "Hot hours per sector-day", "hours", duty.hours_per_day, csv);
  write_histogram(dir, "duty_days_per_week", "Hot days per sector-week", "days", duty.days_per_week, csv);
  write_histogram(dir, "duty_weeks_per_sector", "Hot weeks per sector", "weeks", duty.weeks_per_sector, csv);
  write_file(dir / "duty.csv", csv);

  const auto runs = dynamics::run_length_histograms(scores.y_hour, scores.y_day);
  csv = schema_line() + "series,length,count,frequency\n";
  write_runs(dir, "runs_hours", "Consecutive hot hours", "hours", runs.hours, csv);
  write_runs(dir, "runs_days", "Consecutive hot days", "days", runs.days, csv);
  write_file(dir / "run_lengths.csv", csv);

  const std::size_t first_weekday = data.calendar(0, core::kDayOfWeek);
  const auto census = dynamics::weekly_pattern_census(scores.y_day, first_weekday, cfg.analyze.exclude_never_hot);
  csv = schema_line() + "rank,pattern,count,share\n";
  std::vector<std::string> cats;
  std::vector<double> shares;
  for (std::size_t r = 0; r < census.size(); ++r) {
    csv += std::to_string(r + 1) + "," + dynamics::pattern_string(census[r].bits) + "," +
           std::to_string(census[r].count) + "," + format_double(census[r].share) + "\n";
    if (r < cfg.analyze.top_patterns) {
      cats.push_back(dynamics::pattern_string(census[r].bits));
      shares.push_back(census[r].share);
    }
  }
  write_file(dir / "weekly_patterns.csv", csv);
  write_file(dir / "weekly_patterns.svg", svg::bar_chart({"Top weekly hot spot patterns", "pattern", "share (%)"}, cats, shares));

  const auto cons = dynamics::weekly_consistency(scores.y_day);
  csv = schema_line() + "sector_id,correlation\n";
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    csv += std::to_string(data.sector_ids[i]) + "," +
           (std::isnan(cons.per_sector[i]) ? std::string() : format_double(cons.per_sector[i])) + "\n";
  }
  write_file(dir / "weekly_consistency.csv", csv);
  summary["weekly_consistency"] = summary_json(cons.summary);
  summary["weekly_consistency"]["excluded_sectors"] = cons.excluded_sectors;

  ordered_json spatial = ordered_json::object();
  if (data.n_sectors() >= 2) {
    for (auto mode : cfg.analyze.modes) {
      dynamics::SpatialConfig sc;
      sc.mode = mode;
      sc.neighbors = cfg.analyze.neighbors;
      sc.top_correlated = cfg.analyze.top_correlated;
      sc.threads = cfg.threads;
      const auto r = dynamics::spatial_correlation(scores.y_hour, data.sector_coords, sc);
      const std::string name = dynamics::to_string(mode);
      csv = schema_line() + "bucket,distance_km,count,min,q1,median,q3,max,mean\n";
      std::vector<std::string> labels;
      for (std::size_t b = 0; b < r.stats.size(); ++b) {
        const auto& s = r.stats[b];
        labels.push_back(r.buckets.label(b));
        csv += std::to_string(b) + "," + labels.back() + "," + std::to_string(s.count) + "," + format_double(s.min) +
               "," + format_double(s.q1) + "," + format_double(s.median) + "," + format_double(s.q3) + "," +
               format_double(s.max) + "," + format_double(s.mean) + "\n";
      }
      write_file(dir / ("spatial_" + name + ".csv"), csv);
      write_file(dir / ("spatial_" + name + ".svg"),
                 svg::box_chart({"Hourly label correlation by distance (" + name + ")", "distance (km)", "correlation"},
                                labels, r.stats));
      spatial[name] = {{"assigned", r.assigned}, {"out_of_range", r.out_of_range}, {"undefined", r.undefined}};
    }
  }
  summary["spatial"] = spatial;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return "analyzed " + std::to_string(data.n_sectors()) + " sectors; " + std::to_string(census.size()) +
         " weekly patterns; median weekly consistency " + fixed(cons.summary.p50, 3) + " -> " + dir.string();
}

std::string cmd_forecast(const PipelineConfig& cfg, const Layout& layout) {
  const auto stored = read_dataset(layout.imputed);
  const auto scores = core::compute_score_set(stored.data, stored.scoring);
  const auto x = features::assemble_input_tensor(stored.data, scores);
  auto options = cfg.grid_options;
  options.seed = cfg.stage_seed("forecast");
  options.threads = cfg.threads;
  options.timing = cfg.timing;
  const auto result = eval::run_grid(scores, x, cfg.grid, options);

  fs::create_directories(layout.results.parent_path());
  {
    std::ofstream out(layout.results, std::ios::binary);
    if (!out) throw DataError("cannot write " + layout.results.string());
    eval::write_jsonl(result, out);
  }
  std::string skipped;
  for (const auto& s : result.skipped) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["t"] = s.t;
    j["h"] = s.h;
    j["w"] = s.w;
    j["model"] = models::to_string(s.model);
    j["target"] = eval::to_string(s.target);
    j["reason"] = s.reason;
    skipped += j.dump() + "\n";
  }
  write_file(layout.forecast / "skipped.jsonl", skipped);

  // Gini importance of one raw-encoding forest per target.
  ordered_json imp;
  imp["schema_version"] = kSchemaVersion;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < x.layout.channels(); ++c) names.push_back(x.layout.channel(c).name);
  imp["channels"] = names;
  imp["entries"] = ordered_json::array();
  if (cfg.importance.enabled && !cfg.grid.t.empty()) {
    for (auto target : cfg.grid.targets) {
      const std::size_t t = cfg.importance.t.value_or(*std::max_element(cfg.grid.t.begin(), cfg.grid.t.end()));
      ordered_json e;
      e["target"] = eval::to_string(target);
      e["t"] = t;
      e["h"] = cfg.importance.h;
      e["w"] = cfg.importance.w;
      e["n_trees"] = cfg.importance.n_trees;
      models::ForestConfig fc;
      fc.n_trees = cfg.importance.n_trees;
      fc.threads = cfg.threads;
      fc.tree.seed = derive_seed(options.seed, 0x696d70, static_cast<int>(target));
      try {
        const auto forest = eval::fit_cell_forest(scores, x, target, t, cfg.importance.h, cfg.importance.w,
                                                  features::Encoding::kRaw, fc);
        const auto fi = models::feature_importance(forest);
        e["by_channel"] = models::importance_by_channel(fi, x.layout.channels());
        const auto lag = models::importance_by_lag(fi, x.layout.channels());
        ordered_json rows = ordered_json::array();
        for (std::size_t r = 0; r < lag.rows(); ++r) {
          rows.push_back(std::vector<double>(lag.row(r).begin(), lag.row(r).end()));
        }
        e["by_lag"] = rows;
      } catch (const DataError& err) {
        e["error"] = err.what();
      }
      imp["entries"].push_back(e);
    }
  }
  write_file(layout.forecast / "importance.json", imp.dump() + "\n");

  ordered_json m;
  m["schema_version"] = kSchemaVersion;
  m["seed"] = options.seed;
  m["n_sectors"] = stored.data.n_sectors();
  m["m_days"] = stored.data.m_days();
  m["cells"] = result.cells.size();
  m["skipped"] = result.skipped.size();
  m["timing"] = cfg.timing;
  write_file(layout.forecast / "manifest.json", m.dump(2) + "\n");
  return "forecast " + std::to_string(result.cells.size()) + " cells (" + std::to_string(result.skipped.size()) +
         " skipped) -> " + layout.results.string();
}

namespace {

struct Key {
  eval::Target target;
  models::ModelKind model;
  std::size_t axis;  // h or w
  auto operator<=>(const Key&) const = default;
};

std::string interval_table(const std::string& axis, const std::map<Key, std::vector<double>>& groups) {
  std::string csv = schema_line() + "target,model," + axis + ",n,mean,lower,upper\n";
  for (const auto& [k, v] : groups) {
    const auto ci = eval::confidence_interval(v);
    csv += eval::to_string(k.target) + "," + models::to_string(k.model) + "," + std::to_string(k.axis) + "," +
           std::to_string(v.size()) + "," + format_double(ci.mean) + "," + format_double(ci.lower) + "," +
           format_double(ci.upper) + "\n";
  }
  return csv;
}

std::string interval_svg(const std::string& title, const std::string& axis, eval::Target target,
                         const std::map<Key, std::vector<double>>& groups) {
  std::vector<double> xs;
  std::map<models::ModelKind, std::map<std::size_t, eval::Interval>> by_model;
  for (const auto& [k, v] : groups) {
    if (k.target != target) continue;
    by_model[k.model][k.axis] = eval::confidence_interval(v);
    if (std::find(xs.begin(), xs.end(), static_cast<double>(k.axis)) == xs.end()) xs.push_back(static_cast<double>(k.axis));
  }
  std::sort(xs.begin(), xs.end());
  std::vector<svg::Series> series;
  for (const auto& [model, points] : by_model) {
    svg::Series s{models::to_string(model), {}, {}, {}};
    for (double x : xs) {
      const auto it = points.find(static_cast<std::size_t>(x));
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.y.push_back(it == points.end() ? nan : it->second.mean);
      s.lower.push_back(it == points.end() ? nan : it->second.lower);
      s.upper.push_back(it == points.end() ? nan : it->second.upper);
    }
    series.push_back(std::move(s));
  }
  return svg::line_chart({title + " (" + eval::to_string(target) + ")", axis, "lift"}, xs, series);
}

}  // namespace

std::string cmd_report(const PipelineConfig& cfg, const Layout& layout) {
  (void)cfg;
  if (!fs::exists(layout.results)) throw DataError("no forecast results at " + layout.results.string());
  std::ifstream in(layout.results, std::ios::binary);
  const auto result = eval::read_jsonl(in);
  if (result.cells.empty()) throw DataError("forecast results are empty");
  const fs::path dir = layout.report;
  fs::create_directories(dir);

  std::map<Key, std::vector<double>> lift_h, lift_w, delta_h, delta_w;
  std::vector<eval::Target> targets;
  for (const auto& c : result.cells) {
    lift_h[{c.target, c.model, c.h}].push_back(c.lift);
    lift_w[{c.target, c.model, c.w}].push_back(c.lift);
    if (c.delta_vs && std::isfinite(*c.delta_vs)) {
      delta_h[{c.target, c.model, c.h}].push_back(*c.delta_vs);
      delta_w[{c.target, c.model, c.w}].push_back(*c.delta_vs);
    }
    if (std::find(targets.begin(), targets.end(), c.target) == targets.end()) targets.push_back(c.target);
  }
  std::sort(targets.begin(), targets.end());
  write_file(dir / "lift_by_h.csv", interval_table("h", lift_h));
  write_file(dir / "lift_by_w.csv", interval_table("w", lift_w));
  write_file(dir / "delta_by_h.csv", interval_table("h", delta_h));
  write_file(dir / "delta_by_w.csv", interval_table("w", delta_w));
  for (auto t : targets) {
    const std::string tn = eval::to_string(t);
    write_file(dir / ("lift_by_h_" + tn + ".svg"), interval_svg("Average lift by horizon", "h (days)", t, lift_h));
    write_file(dir / ("lift_by_w_" + tn + ".svg"), interval_svg("Average lift by history window", "w (days)", t, lift_w));
  }

  const auto stab = eval::temporal_stability(result);
  std::string csv = schema_line() + "target,model,h,w,n_a,n_b,d,p_value\n";
  for (const auto& r : stab.rows) {
    csv += eval::to_string(r.target) + "," + models::to_string(r.model) + "," + std::to_string(r.h) + "," +
           std::to_string(r.w) + "," + std::to_string(r.n_a) + "," + std::to_string(r.n_b) + "," +
           format_double(r.ks.d) + "," + format_double(r.ks.p_value) + "\n";
  }
  write_file(dir / "stability.csv", csv);

  // Importance matrices, when the forecast stage produced them.
  std::size_t importance_tables = 0;
  const fs::path imp_path = layout.results.parent_path() / "importance.json";
  if (fs::exists(imp_path)) {
    try {
      const auto j = nlohmann::json::parse(read_file(imp_path));
      const auto names = j.at("channels").get<std::vector<std::string>>();
      std::string ch = schema_line() + "target,channel,importance\n";
      for (const auto& e : j.at("entries")) {
        if (!e.contains("by_lag")) continue;
        const std::string tn = e.at("target").get<std::string>();
        const auto by_channel = e.at("by_channel").get<std::vector<double>>();
        for (std::size_t c = 0; c < names.size(); ++c) ch += tn + "," + names[c] + "," + format_double(by_channel.at(c)) + "\n";
        const auto rows = e.at("by_lag").get<std::vector<std::vector<double>>>();
        Matrix<double> m(rows.size(), names.size());
        std::string table = schema_line() + "hour_offset";
        for (const auto& n : names) table += "," + n;
        table += "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
          // Offset of the hour relative to the end of the window: -1 is the newest.
          table += std::to_string(static_cast<long>(r) - static_cast<long>(rows.size()));
          for (std::size_t c = 0; c < names.size(); ++c) {
            m(r, c) = rows[r].at(c);
            table += "," + format_double(m(r, c));
          }
          table += "\n";
        }
        write_file(dir / ("importance_" + tn + ".csv"), table);
        write_file(dir / ("importance_" + tn + ".svg"),
                   svg::heatmap({"RF-R Gini importance by hour and channel (" + tn + ")", "channel", "hour in window (oldest at top)"},
                                m, names));
        ++importance_tables;
      }
      write_file(dir / "importance_by_channel.csv", ch);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(imp_path.string() + ": " + e.what());
    }
  }

  ordered_json s;
  s["schema_version"] = kSchemaVersion;
  s["cells"] = result.cells.size();
  s["stability"] = {{"combinations", stab.rows.size()},
                    {"fraction_p_below_0.01", stab.fraction_below_001},
                    {"fraction_p_below_0.05", stab.fraction_below_005}};
  s["importance_tables"] = importance_tables;
  write_file(dir / "summary.json", s.dump(2) + "\n");

  // Human-readable lift table per target: models as rows, horizons as columns.
  std::string md = "<!-- schema_version=" + std::to_string(kSchemaVersion) + " -->\n# Forecast report\n\n";
  for (auto t : targets) {
    std::vector<std::size_t> hs;
    std::vector<models::ModelKind> ms;
    for (const auto& [k, v] : lift_h) {
      if (k.target != t) continue;
      if (std::find(hs.begin(), hs.end(), k.axis) == hs.end()) hs.push_back(k.axis);
      if (std::find(ms.begin(), ms.end(), k.model) == ms.end()) ms.push_back(k.model);
    }
    std::sort(hs.begin(), hs.end());
    std::sort(ms.begin(), ms.end());
    md += "## Lift by horizon, " + eval::to_string(t) + " (mean [95% CI])\n\n| model |";
    for (auto h : hs) md += " h=" + std::to_string(h) + " |";
    md += "\n|---|";
    for (std::size_t k = 0; k < hs.size(); ++k) md += "---|";
    md += "\n";
    for (auto m : ms) {
      md += "| " + models::to_string(m) + " |";
      for (auto h : hs) {
        const auto it = lift_h.find({t, m, h});
        if (it == lift_h.end()) {
          md += " - |";
          continue;
        }
        const auto ci = eval::confidence_interval(it->second);
        md += " " + fixed(ci.mean, 2) + " [" + fixed(ci.lower, 2) + ", " + fixed(ci.upper, 2) + "] |";
      }
      md += "\n";
    }
    md += "\n";
  }
  md += "Temporal stability: " + std::to_string(stab.rows.size()) + " combinations, " +
        fixed(100.0 * stab.fraction_below_005, 1) + "% with p < 0.05, " + fixed(100.0 * stab.fraction_below_001, 1) +
        "% with p < 0.01.\n";
  write_file(dir / "report.md", md);
  return "report over " + std::to_string(result.cells.size()) + " cells -> " + dir.string();
}

}  // namespace hotspot::pipeline
