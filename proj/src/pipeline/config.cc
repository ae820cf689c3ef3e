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

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hotspot/pipeline.h"

namespace hotspot::pipeline {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed` so typos surface instead of being ignored.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::vector<std::size_t> read_days(const json& j, const std::string& where) {
  if (j.is_array()) return j.get<std::vector<std::size_t>>();
  check_keys(j, where, {"from", "to"});
  const auto a = j.at("from").get<std::size_t>(), b = j.at("to").get<std::size_t>();
  if (b < a) throw ConfigError(where + ": 'to' precedes 'from'");
  std::vector<std::size_t> v;
  for (std::size_t d = a; d <= b; ++d) v.push_back(d);
  return v;
}

void parse_generator(const json& j, PipelineConfig& c) {
  check_keys(j, "generator",
             {"n_sectors", "m_weeks", "l_kpis", "seed", "pattern_consistency", "persistent_hot_fraction",
              "emerging_failure_rate", "emerging_min_days", "emerging_max_days", "precursor_days",
              "sectors_per_tower", "tower_grid_km", "tower_share", "noise_std", "hot_threshold", "start_date",
              "holidays", "missingness"});
  auto& g = c.generator;
  read(j, "n_sectors", g.n_sectors);
  read(j, "m_weeks", g.m_weeks);
  read(j, "l_kpis", g.l_kpis);
  read(j, "seed", c.generator_seed);
  read(j, "pattern_consistency", g.pattern_consistency);
  read(j, "persistent_hot_fraction", g.persistent_hot_fraction);
  read(j, "emerging_failure_rate", g.emerging_failure_rate);
  read(j, "emerging_min_days", g.emerging_min_days);
  read(j, "emerging_max_days", g.emerging_max_days);
  read(j, "precursor_days", g.precursor_days);
  read(j, "sectors_per_tower", g.sectors_per_tower);
  read(j, "tower_grid_km", g.tower_grid_km);
  read(j, "tower_share", g.tower_share);
  read(j, "noise_std", g.noise_std);
  read(j, "hot_threshold", g.hot_threshold);
  read(j, "start_date", g.start_date);
  read(j, "holidays", g.holidays);
  if (j.contains("missingness")) {
    const auto& m = j.at("missingness");
    check_keys(m, "generator.missingness",
               {"point_rate", "row_rate", "slice_start_rate", "slice_mean_length", "outage_sector_fraction"});
    read(m, "point_rate", g.missingness.point_rate);
    read(m, "row_rate", g.missingness.row_rate);
    read(m, "slice_start_rate", g.missingness.slice_start_rate);
    read(m, "slice_mean_length", g.missingness.slice_mean_length);
    read(m, "outage_sector_fraction", g.missingness.outage_sector_fraction);
  }
}

ImputeMethod parse_method(const std::string& s) {
  if (s == "autoencoder") return ImputeMethod::kAutoencoder;
  if (s == "carry-forward") return ImputeMethod::kCarryForward;
  throw ConfigError("unknown imputation method '" + s + "'");
}

void parse_impute(const json& j, PipelineConfig& c) {
  check_keys(j, "impute", {"method", "seed", "encoder_layers", "batch_size", "epochs", "learning_rate",
                           "rmsprop_smoothing", "rmsprop_epsilon", "corruption_fraction", "initial_slope"});
  if (j.contains("method")) c.impute_method = parse_method(j.at("method").get<std::string>());
  read(j, "seed", c.impute_seed);
  auto& a = c.autoencoder;
  read(j, "encoder_layers", a.encoder_layers);
  read(j, "batch_size", a.batch_size);
  read(j, "epochs", a.epochs);
  read(j, "learning_rate", a.learning_rate);
  read(j, "rmsprop_smoothing", a.rmsprop_smoothing);
  read(j, "rmsprop_epsilon", a.rmsprop_epsilon);
  read(j, "corruption_fraction", a.corruption_fraction);
  read(j, "initial_slope", a.initial_slope);
}

void parse_forecast(const json& j, PipelineConfig& c) {
  check_keys(j, "forecast", {"seed", "t", "h", "w", "models", "targets", "n_trees", "tree_encoding",
                             "reference", "delta_reference", "importance"});
  read(j, "seed", c.forecast_seed);
  if (j.contains("t")) c.grid.t = read_days(j.at("t"), "forecast.t");
  if (j.contains("h")) c.grid.h = read_days(j.at("h"), "forecast.h");
  if (j.contains("w")) c.grid.w = read_days(j.at("w"), "forecast.w");
  if (j.contains("models")) {
    c.grid.models.clear();
    for (const auto& m : j.at("models")) c.grid.models.push_back(models::parse_model(m.get<std::string>()));
  }
  if (j.contains("targets")) {
    c.grid.targets.clear();
    for (const auto& t : j.at("targets")) c.grid.targets.push_back(eval::parse_target(t.get<std::string>()));
  }
  auto& o = c.grid_options;
  read(j, "n_trees", o.n_trees);
  if (j.contains("tree_encoding")) o.tree_encoding = features::parse_encoding(j.at("tree_encoding").get<std::string>());
  if (j.contains("reference")) {
    const auto r = j.at("reference").get<std::string>();
    if (r == "analytic") o.reference = eval::RandomReference::kAnalytic;
    else if (r == "sampled") o.reference = eval::RandomReference::kSampled;
    else throw ConfigError("unknown random reference '" + r + "'");
  }
  if (j.contains("delta_reference")) o.delta_reference = models::parse_model(j.at("delta_reference").get<std::string>());
  if (j.contains("importance")) {
    const auto& m = j.at("importance");
    check_keys(m, "forecast.importance", {"enabled", "t", "h", "w", "n_trees"});
    read(m, "enabled", c.importance.enabled);
    read(m, "t", c.importance.t);
    read(m, "h", c.importance.h);
    read(m, "w", c.importance.w);
    read(m, "n_trees", c.importance.n_trees);
  }
}

void parse_analyze(const json& j, PipelineConfig& c) {
  check_keys(j, "analyze", {"modes", "neighbors", "top_correlated", "exclude_never_hot", "top_patterns"});
  auto& a = c.analyze;
  if (j.contains("modes")) {
    a.modes.clear();
    for (const auto& m : j.at("modes")) a.modes.push_back(dynamics::parse_spatial_mode(m.get<std::string>()));
  }
  read(j, "neighbors", a.neighbors);
  read(j, "top_correlated", a.top_correlated);
  read(j, "exclude_never_hot", a.exclude_never_hot);
  read(j, "top_patterns", a.top_patterns);
}

}  // namespace

std::uint64_t PipelineConfig::stage_seed(const std::string& stage) const {
  const std::optional<std::uint64_t>* explicit_seed = nullptr;
  if (stage == "generate") explicit_seed = &generator_seed;
  else if (stage == "impute") explicit_seed = &impute_seed;
  else if (stage == "forecast") explicit_seed = &forecast_seed;
  else throw ConfigError("unknown stage '" + stage + "'");
  if (explicit_seed->has_value()) return **explicit_seed;
  std::uint64_t tag = 0;
  for (char ch : stage) tag = tag * 131 + static_cast<unsigned char>(ch);
  return derive_seed(seed, tag);
}

void PipelineConfig::validate() const {
  require(threads >= 1, "threads must be at least 1");
  generator.validate();
  auto a = autoencoder;
  a.input_width = 1;
  a.validate();
  grid.validate();
  require(grid_options.n_trees >= 1, "n_trees must be at least 1");
  require(importance.w >= 1 && importance.n_trees >= 1, "importance needs w >= 1 and n_trees >= 1");
  require(analyze.neighbors >= 1 && analyze.top_correlated >= 1, "neighbor counts must be positive");
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.generator.n_sectors = 200;
  c.generator.m_weeks = 18;
  c.generator.l_kpis = 8;
  c.grid.t = {77, 84, 91, 98};
  c.grid.h = {1, 7, 14};
  c.grid.w = {7, 14};
  c.grid.models = models::all_models();
  c.grid.targets = {eval::Target::kBeHot, eval::Target::kBecomeHot};
  c.grid_options.n_trees = 50;
  c.analyze.neighbors = 100;
  c.analyze.top_correlated = 20;
  return c;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c = default_config();
  try {
    const auto j = json::parse(text);
    check_keys(j, "config", {"schema_version", "seed", "threads", "out_dir", "timing", "paths", "generator",
                             "impute", "forecast", "analyze"});
    if (!j.contains("schema_version")) throw ConfigError("config lacks schema_version");
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ConfigError("unsupported config schema_version " + j.at("schema_version").dump());
    }
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    read(j, "out_dir", c.out_dir);
    read(j, "timing", c.timing);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      check_keys(p, "paths", {"dataset", "imputed", "results"});
      read(p, "dataset", c.dataset_path);
      read(p, "imputed", c.imputed_path);
      read(p, "results", c.results_path);
    }
    if (j.contains("generator")) parse_generator(j.at("generator"), c);
    if (j.contains("impute")) parse_impute(j.at("impute"), c);
    if (j.contains("forecast")) parse_forecast(j.at("forecast"), c);
    if (j.contains("analyze")) parse_analyze(j.at("analyze"), c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["timing"] = c.timing;
  const auto& g = c.generator;
  j["generator"] = {{"n_sectors", g.n_sectors}, {"m_weeks", g.m_weeks}, {"l_kpis", g.l_kpis},
                    {"seed", c.stage_seed("generate")}, {"pattern_consistency", g.pattern_consistency},
                    {"persistent_hot_fraction", g.persistent_hot_fraction},
                    {"emerging_failure_rate", g.emerging_failure_rate}, {"tower_share", g.tower_share},
                    {"noise_std", g.noise_std}, {"hot_threshold", g.hot_threshold},
                    {"start_date", g.start_date}, {"holidays", g.holidays}};
  j["impute"] = {{"method", c.impute_method == ImputeMethod::kAutoencoder ? "autoencoder" : "carry-forward"},
                 {"seed", c.stage_seed("impute")}, {"encoder_layers", c.autoencoder.encoder_layers},
                 {"batch_size", c.autoencoder.batch_size}, {"epochs", c.autoencoder.epochs},
                 {"learning_rate", c.autoencoder.learning_rate}};
  std::vector<std::string> ms, ts;
  for (auto m : c.grid.models) ms.push_back(models::to_string(m));
  for (auto t : c.grid.targets) ts.push_back(eval::to_string(t));
  j["forecast"] = {{"seed", c.stage_seed("forecast")}, {"t", c.grid.t}, {"h", c.grid.h}, {"w", c.grid.w},
                   {"models", ms}, {"targets", ts}, {"n_trees", c.grid_options.n_trees},
                   {"tree_encoding", features::to_string(c.grid_options.tree_encoding)}};
  return j.dump(2) + "\n";
}

Layout resolve_layout(const PipelineConfig& cfg, const std::string& out_override) {
  Layout l;
  if (!out_override.empty()) {
    l.root = out_override;
  } else if (!cfg.out_dir.empty()) {
    l.root = cfg.out_dir;
  } else if (const char* home = std::getenv("HOTSPOT_HOME"); home && *home) {
    l.root = home;
  } else {
    l.root = "hotspot-out";
  }
  l.dataset = cfg.dataset_path.empty() ? l.root / "dataset" : std::filesystem::path(cfg.dataset_path);
  l.truth = l.root / "truth.json";
  l.imputed = cfg.imputed_path.empty() ? l.root / "imputed" : std::filesystem::path(cfg.imputed_path);
  l.analysis = l.root / "analysis";
  l.forecast = l.root / "forecast";
  l.report = l.root / "report";
  l.results = cfg.results_path.empty() ? l.forecast / "results.jsonl" : std::filesystem::path(cfg.results_path);
  return l;
}

}  // namespace hotspot::pipeline
