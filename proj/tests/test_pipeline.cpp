// Copyright 2026 The Taxoforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "support/scripted_chat.hpp"
#include "taxoforge/csv.hpp"
#include "taxoforge/pipeline.hpp"

namespace tf = taxoforge;
namespace fs = std::filesystem;
using testing_support::code_of;
using testing_support::ScriptedChat;
using testing_support::TempDir;

namespace {

void script(ScriptedChat& chat) {
  chat.replies = {
      {"machine learning", "artificial intelligence, computer science"},
      {"neural network", "machine learning"},
      {"compiler", "programming languages"},
      {"programming languages", "computer science"},
      {"genomics", "bioinformatics"},
      {"bioinformatics", "computational biology, genomics"},
      {"semi-supervised learning", "machine learning"},
      {"quantum computing", "computer science, physics"},
  };
  chat.judge_reply = "1 (Subdomain Relationship)";
}

nlohmann::json base_config(const fs::path& root) {
  const fs::path data = testing_support::data_dir();
  return {
      {"seed", (data / "seed.csv").string()},
      {"cache_dir", (root / "cache").string()},
      {"run_dir", (root / "run").string()},
      {"workers", 2},
      {"providers", {{{"id", "hash"}, {"file", (data / "embeddings.csv").string()}}}},
      {"cso", {{"dump", (data / "cso.csv").string()}, {"thresholds", {0.5, 0.8}}, {"providers", {"hash"}}}},
      {"wikidata",
       {{"take_all", {false}}, {"type_threshold", {0}}, {"max_depth", {1, 3}}, {"base_url", "http://127.0.0.1:9/"}}},
      {"llm", {{"models", {"scripted"}}, {"prompt_modes", {"NT", "WT"}}, {"run_id", "fixture"}}},
      {"ensemble", {{"mode", "cascade"}, {"order", {"cso", "wikidata", "llm"}}}},
      {"complete", {{"model", "scripted"}}},
      {"eval", {{"annotations", (root / "annotations.csv").string()}, {"judge", {{"rater", "GPT"}}}}},
  };
}

/// A workspace with a private copy of the Wikidata cache and an annotation file.
struct Workspace {
  TempDir dir;
  explicit Workspace(const std::string& name) : dir(name) {
    fs::create_directories(dir.path / "cache");
    fs::copy(testing_support::data_dir() / "cache" / "wikidata", dir.path / "cache" / "wikidata",
             fs::copy_options::recursive);
    std::ofstream(dir.path / "annotations.csv") << "child,parent,rater,value\n"
                                                   "neural network,machine learning,A,1\n"
                                                   "neural network,machine learning,B,1\n"
                                                   "compiler,computer science,A,0\n"
                                                   "compiler,computer science,B,1\n"
                                                   "genomics,bioinformatics,A,1\n"
                                                   "genomics,bioinformatics,B,1\n";
  }
  tf::RunConfig config(const nlohmann::json& doc) const { return tf::parse_run_config(doc.dump(), dir.path); }
  tf::RunConfig config() const { return config(base_config(dir.path)); }
};

std::map<std::string, std::string> artifacts(const fs::path& run) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(run))
    if (e.is_regular_file()) out[fs::relative(e.path(), run).generic_string()] = tf::read_file(e.path());
  return out;
}

tf::ErrorCode config_error(const nlohmann::json& doc) {
  return code_of([&] { tf::parse_run_config(doc.dump(), "/tmp"); }).value_or(tf::ErrorCode::kInvalidArgument);
}

std::string config_message(const nlohmann::json& doc) {
  try {
    tf::parse_run_config(doc.dump(), "/tmp", "run.json");
  } catch (const tf::Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(RunConfig, ParsesGridAndResolvesPaths) {
  Workspace ws("tf_pipeline_cfg");
  const auto cfg = ws.config(nlohmann::json{{"seed", "seed.csv"}, {"stages", {"metrics", "build"}}});
  EXPECT_EQ(cfg.seed, ws.dir.path / "seed.csv");
  EXPECT_EQ(cfg.cache_dir, ws.dir.path / "cache");
  EXPECT_EQ(cfg.stages, (std::vector<std::string>{"build", "metrics"}));

  const auto full = ws.config();
  const auto raw = tf::build_points(full);
  std::vector<std::string> ids;
  for (const auto& p : raw) ids.push_back(p.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"cso-hash-0.50", "cso-hash-0.80", "wd-TAF-TT0-MD1", "wd-TAF-TT0-MD3",
                                           "llm-scripted-NT", "llm-scripted-WT"}));
  EXPECT_EQ(tf::cleaned_points(full).size(), raw.size() * 4);
  EXPECT_EQ(tf::cleaned_points(full).front().id, "cso-hash-0.50-C1A1");
}

TEST(RunConfig, ErrorsNameTheKey) {
  const nlohmann::json seed{{"seed", "s.csv"}};
  auto with = [&](const char* key, nlohmann::json value) {
    auto doc = seed;
    doc[key] = std::move(value);
    return doc;
  };
  EXPECT_EQ(config_error(nlohmann::json::object()), tf::ErrorCode::kConfigError);
  EXPECT_NE(config_message(with("colour", 1)).find("'colour'"), std::string::npos);
  EXPECT_NE(config_message(with("workers", 0)).find("'workers'"), std::string::npos);
  EXPECT_NE(config_message(with("workers", "four")).find("'workers'"), std::string::npos);
  EXPECT_NE(config_message(with("cso", {{"dump", "c.csv"}, {"providers", {"nope"}}})).find("'cso.providers'"),
            std::string::npos);
  EXPECT_NE(config_message(with("cso", {{"dump", "c.csv"}, {"thresholds", {1.5}}})).find("'cso.thresholds'"),
            std::string::npos);
  EXPECT_NE(config_message(with("cso", {{"dump", "c.csv"}, {"thresholds", nlohmann::json::array()}}))
                .find("'cso.thresholds'"),
            std::string::npos);
  EXPECT_NE(config_message(with("wikidata", {{"max_depth", {0}}})).find("'wikidata'"), std::string::npos);
  EXPECT_NE(config_message(with("llm", {{"prompt_modes", {"XY"}}})).find("'llm.prompt_modes'"), std::string::npos);
  EXPECT_NE(config_message(with("llm", {{"run_id", "../x"}})).find("'llm.run_id'"), std::string::npos);
  EXPECT_NE(config_message(with("ensemble", {{"mode", "vote"}})).find("'ensemble.mode'"), std::string::npos);
  EXPECT_NE(config_message(with("ensemble", {{"order", {"dbpedia"}}})).find("'ensemble.order'"), std::string::npos);
  EXPECT_NE(config_message(with("stages", {"bake"})).find("'stages'"), std::string::npos);
  EXPECT_NE(config_message(with("providers", {{{"id", "a"}}})).find("'providers[0]'"), std::string::npos);
  EXPECT_NE(config_message(with("providers", {{{"id", "a"}, {"url", "u"}}, {{"id", "a"}, {"url", "u"}}}))
                .find("duplicate"),
            std::string::npos);
  EXPECT_EQ(code_of([] { tf::parse_run_config("{not json", "/tmp"); }), tf::ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { tf::load_run_config("/nonexistent/run.json"); }), tf::ErrorCode::kConfigError);
}

TEST(RunConfig, StageLists) {
  EXPECT_EQ(tf::parse_stages("export, build"), (std::vector<std::string>{"build", "export"}));
  EXPECT_EQ(code_of([] { tf::parse_stages("build,train"); }), tf::ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { tf::parse_stages(" , "); }), tf::ErrorCode::kConfigError);
}

TEST(Preflight, ReportsMissingRecordings) {
  Workspace ws("tf_pipeline_preflight");
  auto cfg = ws.config();
  const auto missing = tf::offline_preflight(cfg);
  ASSERT_FALSE(missing.empty());
  for (const auto& m : missing) EXPECT_EQ(m.rfind("llm recording fixture/", 0), 0u) << m;

  cfg.seed = ws.dir.path / "absent.csv";
  EXPECT_EQ(tf::offline_preflight(cfg), (std::vector<std::string>{"seed " + cfg.seed.string()}));

  cfg = ws.config();
  cfg.offline = true;
  EXPECT_EQ(code_of([&] { tf::run_pipeline(cfg); }), tf::ErrorCode::kConfigError);
  EXPECT_FALSE(fs::exists(ws.dir.path / "run"));
}

TEST(Pipeline, OnlineThenOfflineReplayIsIdentical) {
  Workspace ws("tf_pipeline_replay");
  ScriptedChat chat;
  script(chat);
  std::vector<std::string> log;
  tf::RunOptions online;
  online.chat_client = &chat;
  online.log = [&](std::string_view line) { log.emplace_back(line); };
  const auto summary = tf::run_pipeline(ws.config(), online);
  EXPECT_EQ(summary.stages, tf::kStageOrder);
  EXPECT_GT(chat.calls(), 0u);
  ASSERT_EQ(summary.best.size(), 3u);
  EXPECT_EQ(summary.best.at("cso").rfind("cso-hash-", 0), 0u);
  EXPECT_EQ(summary.best.at("wikidata").rfind("wd-TAF-TT0-", 0), 0u);
  EXPECT_EQ(summary.best.at("llm").rfind("llm-scripted-", 0), 0u);

  const fs::path run = ws.dir.path / "run";
  for (const char* f : {"metrics/cso.csv", "metrics/wikidata.csv", "metrics/llm.csv", "select/best.json",
                        "select/cso_topsis.csv", "ensemble/edges.csv", "complete/edges.csv", "eval/agreement.csv",
                        "export/taxonomy_edges.csv", "export/taxonomy_nodes.csv", "export/taxonomy_aliases.csv",
                        "export/taxonomy.dot", "manifest.json"})
    EXPECT_TRUE(fs::exists(run / f)) << f;

  const auto header = tf::read_file(run / "metrics" / "cso.csv");
  EXPECT_EQ(std::count(header.begin(), header.begin() + header.find('\n'), ','), 16);
  const auto agreement = tf::read_file(run / "eval" / "agreement.csv");
  EXPECT_NE(agreement.find("zero_share,GPT,,3,0\n"), std::string::npos) << agreement;
  EXPECT_TRUE(tf::offline_preflight(ws.config()).empty());

  auto offline_cfg = ws.config();
  offline_cfg.offline = true;
  tf::RunOptions replay;
  replay.run_dir = ws.dir.path / "replay";
  replay.workers = 1;
  tf::run_pipeline(offline_cfg, replay);
  EXPECT_EQ(artifacts(run), artifacts(ws.dir.path / "replay"));
}

TEST(Pipeline, ResumedRunMatchesUninterrupted) {
  Workspace ws("tf_pipeline_resume");
  {
    ScriptedChat chat;
    script(chat);
    tf::RunOptions o;
    o.chat_client = &chat;
    tf::run_pipeline(ws.config(), o);
  }
  auto cfg = ws.config();
  cfg.offline = true;
  const fs::path resumed = ws.dir.path / "resumed";
  tf::RunOptions first;
  first.run_dir = resumed;
  first.stages = tf::parse_stages("build,clean");
  tf::run_pipeline(cfg, first);
  // Simulate a sweep interrupted part way: one build point and one cleaned
  // point never finished.
  fs::remove_all(resumed / "build" / "wikidata" / "wd-TAF-TT0-MD3");
  fs::remove_all(resumed / "clean" / "cso" / "cso-hash-0.80-C0A1");
  tf::RunOptions rest;
  rest.run_dir = resumed;
  tf::run_pipeline(cfg, rest);
  EXPECT_EQ(artifacts(ws.dir.path / "run"), artifacts(resumed));
}

TEST(Pipeline, StageFailureKeepsCheckpoint) {
  Workspace ws("tf_pipeline_fail");
  auto cfg = ws.config();
  cfg.offline = true;
  cfg.llm.reset();
  cfg.ensemble.order = {"cso", "wikidata"};
  cfg.eval.judge_rater.reset();
  std::ofstream(ws.dir.path / "annotations.csv") << "child,parent,rater,value\na,b,A,maybe\n";
  cfg.stages = tf::parse_stages("build,clean,metrics,select,eval");
  try {
    tf::run_pipeline(cfg);
    FAIL() << "expected eval to fail";
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.code(), tf::ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("stage eval"), std::string::npos);
  }
  EXPECT_TRUE(fs::exists(ws.dir.path / "run" / "select" / "best.json"));
}

TEST(Pipeline, UnionEnsembleWritesMerges) {
  Workspace ws("tf_pipeline_union");
  auto doc = base_config(ws.dir.path);
  doc.erase("llm");
  doc.erase("eval");
  doc["ensemble"] = {{"mode", "union"}, {"order", {"cso", "wikidata"}}, {"provider", "hash"}};
  doc["stages"] = {"build", "clean", "metrics", "select", "ensemble", "export"};
  doc["offline"] = true;
  tf::run_pipeline(ws.config(doc));
  const fs::path run = ws.dir.path / "run";
  EXPECT_EQ(tf::read_file(run / "ensemble" / "merges.csv").substr(0, 25), "kept,merged,similarity\n");
  const auto g = tf::read_graph_csv(tf::read_file(run / "export" / "taxonomy_edges.csv"),
                                    tf::read_file(run / "export" / "taxonomy_nodes.csv"),
                                    tf::read_file(run / "export" / "taxonomy_aliases.csv"));
  EXPECT_TRUE(tf::is_dag(g));
  EXPECT_TRUE(g.contains(testing_support::id("machine learning")));
}
