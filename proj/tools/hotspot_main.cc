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

// hotspot: command-line front end of the pipeline.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 data error
// (missing or malformed inputs), 1 anything unexpected.

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hotspot/common.h"
#include "hotspot/pipeline.h"

namespace {

using hotspot::pipeline::Layout;
using hotspot::pipeline::PipelineConfig;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed; replaces every per-stage seed of the config");
  cmd->add_option("--out", f.out, "output root (default: config out_dir, $HOTSPOT_HOME, ./hotspot-out)");
  cmd->add_option("--threads", f.threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
}

PipelineConfig resolve(const CommonFlags& f) {
  PipelineConfig cfg = f.config.empty() ? hotspot::pipeline::default_config() : hotspot::pipeline::load_config(f.config);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.generator_seed.reset();
    cfg.impute_seed.reset();
    cfg.forecast_seed.reset();
  }
  if (f.threads) cfg.threads = *f.threads;
  if (f.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hot spot forecasting pipeline on sector telemetry"};
  app.require_subcommand(1);
  CommonFlags flags;

  using Stage = std::function<std::string(const PipelineConfig&, const Layout&)>;
  std::vector<std::pair<CLI::App*, std::vector<Stage>>> commands;
  auto add = [&](const char* name, const char* help, std::vector<Stage> stages) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    commands.emplace_back(cmd, std::move(stages));
    return cmd;
  };
  namespace p = hotspot::pipeline;
  add("generate", "write a synthetic dataset and its ground truth", {p::cmd_generate});
  add("impute", "filter sectors and fill missing values", {p::cmd_impute});
  add("analyze", "hot spot dynamics tables and plots", {p::cmd_analyze});
  add("forecast", "run the forecasting grid for every configured target", {p::cmd_forecast})
      ->add_flag("--timing", flags.timing, "record per-cell wall time (outputs are then not reproducible)");
  add("report", "lift and delta tables, importance matrices, stability summary", {p::cmd_report});
  add("run", "generate, impute, analyze, forecast and report in sequence",
      {p::cmd_generate, p::cmd_impute, p::cmd_analyze, p::cmd_forecast, p::cmd_report});
  auto* show = app.add_subcommand("config", "print the effective configuration as JSON");
  add_common(show, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig cfg = resolve(flags);
    if (show->parsed()) {
      std::cout << p::config_to_json(cfg);
      return 0;
    }
    const Layout layout = p::resolve_layout(cfg, flags.out);
    for (auto& [cmd, stages] : commands) {
      if (!cmd->parsed()) continue;
      for (const auto& stage : stages) std::cout << stage(cfg, layout) << '\n';
    }
    return 0;
  } catch (const hotspot::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const hotspot::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
