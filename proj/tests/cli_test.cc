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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "hotspot/pipeline.h"
#include "hotspot/svg.h"
#include "test_util.h"

namespace hotspot::pipeline {
namespace {

namespace fs = std::filesystem;

const std::string kBinary = HOTSPOT_BINARY;
const std::string kFixture = HOTSPOT_FIXTURE_DIR "/tiny.json";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hotspot_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const int rc = std::system((kBinary + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> v;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) v.push_back(l);
  }
  return v;
}

TEST(Cli, RerunsAreByteIdenticalAcrossThreadCounts) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("run --config " + kFixture + " --out " + a.string() + " --threads 1"), 0);
  ASSERT_EQ(run("run --config " + kFixture + " --out " + b.string() + " --threads 3"), 0);
  const auto ta = tree_contents(a), tb = tree_contents(b);
  ASSERT_GT(ta.size(), 30u);
  ASSERT_EQ(ta.size(), tb.size());
  for (const auto& [name, content] : ta) {
    ASSERT_TRUE(tb.count(name)) << name;
    EXPECT_TRUE(content == tb.at(name)) << name << " differs";
  }
  // Stage-by-stage rerun into the first root reproduces the same bytes.
  for (const char* stage : {"generate", "impute", "analyze", "forecast", "report"}) {
    ASSERT_EQ(run(std::string(stage) + " --config " + kFixture + " --out " + a.string() + " --threads 2"), 0) << stage;
  }
  EXPECT_EQ(tree_contents(a), tb);
}

TEST(Cli, SeedChangesTheDataset) {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(run("generate --config " + kFixture + " --out " + a.string()), 0);
  ASSERT_EQ(run("generate --config " + kFixture + " --out " + b.string() + " --seed 99"), 0);
  EXPECT_NE(slurp(a / "dataset" / "telemetry.csv"), slurp(b / "dataset" / "telemetry.csv"));
}

TEST(Cli, ForecastEmitsOneRecordPerValidCell) {
  const auto root = scratch("cells");
  for (const char* stage : {"generate", "impute", "forecast"}) {
    ASSERT_EQ(run(std::string(stage) + " --config " + kFixture + " --out " + root.string()), 0) << stage;
  }
  const auto cfg = load_config(kFixture);
  const auto results = lines(root / "forecast" / "results.jsonl");
  const auto skipped = lines(root / "forecast" / "skipped.jsonl");
  const std::size_t models = cfg.grid.models.size(), targets = cfg.grid.targets.size();
  EXPECT_EQ(results.size() + skipped.size(),
            targets * models * cfg.grid.t.size() * cfg.grid.h.size() * cfg.grid.w.size());

  // Grid cells whose window and horizon fit inside the 35 days.
  const std::size_t m_days = cfg.generator.m_weeks * 7;
  std::size_t fit = 0;
  for (auto t : cfg.grid.t)
    for (auto h : cfg.grid.h)
      for (auto w : cfg.grid.w) fit += t >= h + w && t + h < m_days;
  std::size_t outside = 0;
  std::set<std::string> reasons;
  for (const auto& l : skipped) {
    const auto j = nlohmann::json::parse(l);
    EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
    outside += j.at("reason") == "window or horizon outside the data";
    reasons.insert(j.at("reason").get<std::string>());
  }
  EXPECT_EQ(outside, targets * models * (cfg.grid.t.size() * cfg.grid.h.size() * cfg.grid.w.size() - fit));

  std::size_t persist_be_hot = 0;
  for (const auto& l : results) {
    const auto j = nlohmann::json::parse(l);
    const std::size_t t = j.at("t"), h = j.at("h"), w = j.at("w");
    EXPECT_TRUE(t >= h + w && t + h < m_days);
    persist_be_hot += j.at("model") == "Persist" && j.at("target") == "be-hot";
  }
  // The fixture has hot sectors on every evaluation day.
  EXPECT_EQ(persist_be_hot, fit);
}

TEST(Cli, ExitCodes) {
  const auto root = scratch("codes");
  fs::create_directories(root);
  EXPECT_EQ(run("report --out " + root.string()), 3);         // no results yet
  EXPECT_EQ(run("forecast --out " + root.string()), 3);       // no imputed dataset
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("generate --threads 0 --out " + root.string()), 2);
  std::ofstream(root / "bad.json") << R"({"schema_version": 1, "sed": 3})";
  EXPECT_EQ(run("generate --config " + (root / "bad.json").string() + " --out " + root.string()), 2);
  std::ofstream(root / "v2.json") << R"({"schema_version": 2})";
  EXPECT_EQ(run("generate --config " + (root / "v2.json").string() + " --out " + root.string()), 2);
  EXPECT_EQ(run("config --config " + kFixture), 0);
}

TEST(Config, ParsesRangesAndRejectsUnknownKeys) {
  const auto c = parse_config(R"({"schema_version": 1, "forecast": {"t": {"from": 3, "to": 5}, "h": [1]}})");
  EXPECT_EQ(c.grid.t, (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(c.grid.h, (std::vector<std::size_t>{1}));
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "forecast": {"hh": [1]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seed": 1})"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "impute": {"method": "magic"}})"), ConfigError);
}

TEST(Config, StageSeedsAreExplicitOrDerived) {
  auto c = parse_config(R"({"schema_version": 1, "seed": 5, "impute": {"seed": 42}})");
  EXPECT_EQ(c.stage_seed("impute"), 42u);
  EXPECT_NE(c.stage_seed("generate"), c.stage_seed("forecast"));
  const auto again = parse_config(R"({"schema_version": 1, "seed": 5})");
  EXPECT_EQ(c.stage_seed("generate"), again.stage_seed("generate"));
  EXPECT_THROW(c.stage_seed("nope"), ConfigError);
}

TEST(Layout, OutputRootPrecedence) {
  PipelineConfig c;
  ::setenv("HOTSPOT_HOME", "/tmp/hh", 1);
  EXPECT_EQ(resolve_layout(c).root, fs::path("/tmp/hh"));
  c.out_dir = "/tmp/cfg";
  EXPECT_EQ(resolve_layout(c).root, fs::path("/tmp/cfg"));
  EXPECT_EQ(resolve_layout(c, "/tmp/flag").forecast, fs::path("/tmp/flag/forecast"));
  ::unsetenv("HOTSPOT_HOME");
  c.out_dir.clear();
  EXPECT_EQ(resolve_layout(c).root, fs::path("hotspot-out"));
}

TEST(Telemetry, RoundTripKeepsValuesAndMissingness) {
  auto ds = testing::make_dataset(3, 48, 2, 1.0);
  ds.sector_ids = {10, 20, 30};
  ds.kpi(1, 5, 1) = 0.1 + 0.2;  // not exactly representable in short decimal
  ds.kpi(2, 7, 0) = std::numeric_limits<double>::quiet_NaN();
  ds.missing(2, 7, 0) = 1;
  std::stringstream buf;
  write_telemetry_csv(buf, ds);
  EXPECT_EQ(buf.str().rfind("# schema_version=1\nsector_id,hour_index,kpi_id,value\n", 0), 0u);
  auto back = testing::make_dataset(3, 48, 2);
  back.sector_ids = ds.sector_ids;
  read_telemetry_csv(buf, back);
  EXPECT_EQ(back.missing, ds.missing);
  EXPECT_EQ(back.kpi(1, 5, 1), 0.1 + 0.2);
  EXPECT_TRUE(std::isnan(back.kpi(2, 7, 0)));
}

TEST(Telemetry, AbsentRowsAreMissingAndErrorsAreDataErrors) {
  auto ds = testing::make_dataset(1, 24, 1);
  ds.sector_ids = {4};
  std::stringstream ok("sector_id,hour_index,kpi_id,value\n4,3,0,2.5\n4,4,0,\n");
  read_telemetry_csv(ok, ds);
  EXPECT_EQ(ds.kpi(0, 3, 0), 2.5);
  EXPECT_EQ(ds.missing(0, 3, 0), 0);
  EXPECT_EQ(ds.missing(0, 4, 0), 1);
  EXPECT_EQ(ds.missing(0, 0, 0), 1);
  for (const char* bad : {"sector,hour,kpi,value\n", "sector_id,hour_index,kpi_id,value\n4,3,0,x\n",
                          "sector_id,hour_index,kpi_id,value\n5,3,0,1\n",
                          "sector_id,hour_index,kpi_id,value\n4,24,0,1\n",
                          "sector_id,hour_index,kpi_id,value\n4,1,0,1\n4,1,0,2\n",
                          "# schema_version=9\nsector_id,hour_index,kpi_id,value\n"}) {
    std::stringstream in(bad);
    EXPECT_THROW(read_telemetry_csv(in, ds), DataError) << bad;
  }
}

TEST(Dataset, DirectoryRoundTrip) {
  const auto dir = scratch("dataset");
  auto ds = testing::make_dataset(2, 168, 3, 0.5);
  ds.sector_coords[1] = {1.25, -3.5};
  core::ScoringConfig sc{{1, 2, 3}, {0.5, 0.6, 0.7}, 0.55};
  write_dataset(dir, ds, sc);
  const auto back = read_dataset(dir);
  EXPECT_EQ(back.data.kpi, ds.kpi);
  EXPECT_EQ(back.data.sector_coords, ds.sector_coords);
  EXPECT_EQ(back.data.calendar, ds.calendar);
  EXPECT_EQ(back.scoring.weights, sc.weights);
  EXPECT_EQ(back.scoring.hot_threshold, 0.55);
  EXPECT_THROW(read_dataset(dir / "nowhere"), DataError);
}

TEST(Svg, EmbeddedTableIsCommentSafe) {
  EXPECT_EQ(svg::comment_safe("MTWTF--,3\n-------,1\n-0.5"), "MTWTF..,3\n.......,1\n-0.5");
  const auto s = svg::bar_chart({"t", "x", "y"}, {"MTWTF--", "-----S-"}, {2.0, 1.0});
  const auto open = s.find("<!--"), close = s.find("-->");
  ASSERT_NE(open, std::string::npos);
  EXPECT_EQ(s.substr(open + 4, close - open - 4).find("--"), std::string::npos);
  EXPECT_NE(s.find("MTWTF..,2"), std::string::npos);
  EXPECT_NE(s.find("schema_version=1"), std::string::npos);
}

}  // namespace
}  // namespace hotspot::pipeline
