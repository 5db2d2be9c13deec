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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/llm.hpp"
#include "taxoforge/wikidata.hpp"

namespace taxoforge {

inline const std::vector<std::string> kStageOrder{"build",    "clean",    "metrics", "select",
                                                  "ensemble", "complete", "eval",    "export"};

struct ProviderSpec {
  std::string id;
  std::optional<std::filesystem::path> file;  // label,v0..vN table
  std::string url;                            // embeddings endpoint otherwise
  std::string token_env;
};

struct CsoGrid {
  std::filesystem::path dump;
  std::vector<double> thresholds{0.80};
  std::vector<std::string> providers;
};

struct WdGrid {
  std::vector<bool> take_all{false};
  std::vector<int> type_threshold{0};
  std::vector<int> max_depth{3};
  std::optional<std::string> base_url;
};

struct LlmGrid {
  std::vector<std::string> models{"gpt-4-1106-preview"};
  std::vector<PromptMode> prompt_modes{PromptMode::kWithTerms};
  std::vector<bool> iterative{false};
  LlmConfig base;  // depth bound, temperature, seed, in-flight budget
  std::string run_id = "default";
};

struct CleaningGrid {
  std::vector<bool> cycle{true, false};
  std::vector<bool> abstract{true, false};
};

struct EnsembleSpec {
  std::string mode = "cascade";  // or "union"
  std::vector<std::string> order{"cso", "wikidata"};
  double dedup_threshold = 0.90;
  std::optional<std::string> provider;
};

struct EvalSpec {
  std::optional<std::filesystem::path> annotations;
  std::optional<std::string> judge_rater;
  LlmConfig judge;
};

struct RunConfig {
  std::filesystem::path seed;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path run_dir = "runs/default";
  bool offline = false;
  std::size_t workers = 1;
  std::size_t cycle_cap = 10000;
  int generic_clusters = 1;
  std::vector<ProviderSpec> providers;
  std::optional<CsoGrid> cso;
  std::optional<WdGrid> wikidata;
  std::optional<LlmGrid> llm;
  CleaningGrid cleaning;
  EnsembleSpec ensemble;
  LlmConfig complete;
  EvalSpec eval;
  std::vector<std::string> stages = kStageOrder;
};

/// Relative paths resolve against `base_dir`. Throws kConfigError naming the
/// offending key.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           std::string_view origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Accepts a comma-separated list; returns the stages in pipeline order.
std::vector<std::string> parse_stages(std::string_view list);

struct SweepPoint {
  std::string source;  // cso, wikidata, llm
  std::string id;
};

/// Raw (pre-cleaning) sweep points in deterministic order.
std::vector<SweepPoint> build_points(const RunConfig& cfg);
/// Cleaned sweep points: every raw point times the cleaning toggles.
std::vector<SweepPoint> cleaned_points(const RunConfig& cfg);

struct RunOptions {
  std::optional<bool> offline;
  std::optional<std::vector<std::string>> stages;
  std::optional<std::size_t> workers;
  std::optional<std::filesystem::path> run_dir;
  std::function<void(std::string_view)> log;
  /// Test hook: replaces the chat client used in online mode.
  ChatClient* chat_client = nullptr;
};

struct RunSummary {
  std::vector<std::string> stages;
  std::map<std::string, std::string> best;  // source -> cleaned config id
  std::filesystem::path manifest;
};

/// Cache entries an offline run would need but cannot find.
std::vector<std::string> offline_preflight(const RunConfig& cfg);

RunSummary run_pipeline(RunConfig cfg, const RunOptions& options = {});

}  // namespace taxoforge
