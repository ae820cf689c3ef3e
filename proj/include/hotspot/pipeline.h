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

// End-to-end pipeline behind the command-line tool: configuration, file
// formats and the generate / impute / analyze / forecast / report stages.
//
// Output layout under the output root:
//   dataset/    dataset.json, sectors.csv, telemetry.csv   (generate)
//   truth.json                                             (generate)
//   imputed/    same format plus filter.json, loss_trace.csv, autoencoder.bin
//   analysis/   dynamics tables (.csv) and plots (.svg)
//   forecast/   results.jsonl, skipped.jsonl, importance.json, manifest.json
//   report/     lift and delta tables, importance matrices, stability summary

#ifndef HOTSPOT_PIPELINE_H_
#define HOTSPOT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hotspot/core.h"
#include "hotspot/dynamics.h"
#include "hotspot/eval.h"
#include "hotspot/impute.h"
#include "hotspot/synthgen.h"

namespace hotspot::pipeline {

inline constexpr int kSchemaVersion = 1;

enum class ImputeMethod { kAutoencoder, kCarryForward };

struct ImportanceSettings {
  bool enabled = true;
  std::optional<std::size_t> t;  // default: the last grid t
  std::size_t h = 1;
  std::size_t w = 7;
  std::size_t n_trees = 100;
};

struct AnalyzeSettings {
  std::vector<dynamics::SpatialMode> modes = {dynamics::SpatialMode::kAvgNearest,
                                              dynamics::SpatialMode::kMaxNearest,
                                              dynamics::SpatialMode::kMaxTopCorrelated};
  std::size_t neighbors = 500;
  std::size_t top_correlated = 100;
  bool exclude_never_hot = true;
  std::size_t top_patterns = 20;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool timing = false;
  std::string out_dir;  // empty: HOTSPOT_HOME, else ./hotspot-out

  // Optional input overrides; empty means the default location under the
  // output root.
  std::string dataset_path;
  std::string imputed_path;
  std::string results_path;

  synth::GeneratorConfig generator;
  std::optional<std::uint64_t> generator_seed;

  ImputeMethod impute_method = ImputeMethod::kAutoencoder;
  impute::AutoencoderSpec autoencoder;
  std::optional<std::uint64_t> impute_seed;

  eval::ExperimentGrid grid;
  eval::GridOptions grid_options;  // seed and threads are filled per run
  std::optional<std::uint64_t> forecast_seed;
  ImportanceSettings importance;

  AnalyzeSettings analyze;

  // Per-stage seeds: the explicit value when given, else derived from `seed`.
  std::uint64_t stage_seed(const std::string& stage) const;
  void validate() const;
};

// A small default grid sized for desk runs.
PipelineConfig default_config();

// Parses a JSON configuration. Unknown keys and a schema_version other than
// kSchemaVersion raise ConfigError.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);

struct Layout {
  std::filesystem::path root;
  std::filesystem::path dataset, truth, imputed, analysis, forecast, report;
  std::filesystem::path results;  // forecast/results.jsonl unless overridden
};

// Resolves the output root (`out_override`, then the config, then
// HOTSPOT_HOME, then ./hotspot-out) and the stage directories.
Layout resolve_layout(const PipelineConfig& cfg, const std::string& out_override = "");

// Dataset directory: dataset.json (shape, dates, scoring), sectors.csv
// (sector_id,x_km,y_km) and telemetry.csv (sector_id,hour_index,kpi_id,value).
// An empty value field, or a row absent altogether, is a missing value.
struct StoredDataset {
  core::KpiDataset data;
  core::ScoringConfig scoring;
};
void write_dataset(const std::filesystem::path& dir, const core::KpiDataset& data,
                   const core::ScoringConfig& scoring);
StoredDataset read_dataset(const std::filesystem::path& dir);

void write_telemetry_csv(std::ostream& out, const core::KpiDataset& data);
// Fills `data.kpi` and `data.missing`, which must already be shaped, with
// rows matched through `data.sector_ids`. Every cell not listed stays missing.
void read_telemetry_csv(std::istream& in, core::KpiDataset& data);

// Shortest round-trip decimal form; identical across runs and platforms.
std::string format_double(double v);

// Stage entry points. Each writes only into its own directory and returns a
// one-line human summary.
std::string cmd_generate(const PipelineConfig& cfg, const Layout& layout);
std::string cmd_impute(const PipelineConfig& cfg, const Layout& layout);
std::string cmd_analyze(const PipelineConfig& cfg, const Layout& layout);
std::string cmd_forecast(const PipelineConfig& cfg, const Layout& layout);
std::string cmd_report(const PipelineConfig& cfg, const Layout& layout);

}  // namespace hotspot::pipeline

#endif  // HOTSPOT_PIPELINE_H_
