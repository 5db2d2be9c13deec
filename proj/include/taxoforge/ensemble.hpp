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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taxoforge/graph.hpp"
#include "taxoforge/llm.hpp"
#include "taxoforge/seed.hpp"
#include "taxoforge/similarity.hpp"

namespace taxoforge {

inline constexpr double kDefaultDedupThreshold = 0.90;

struct MergeRecord {
  TermId kept;
  TermId merged;
  double similarity = 0.0;
};

struct UnionResult {
  TaxonomyGraph graph;
  std::vector<MergeRecord> merges;
};

/// Node and edge union, then duplicate folding of every node pair whose
/// alias similarity reaches `threshold`. A null provider disables folding.
UnionResult union_merge(std::span<const TaxonomyGraph> graphs, double threshold, EmbeddingProvider* provider);

/// Starts from the first graph; each seed term still unlinked takes its
/// ancestor paths from the first later graph that links it.
TaxonomyGraph cascade_merge(std::span<const TaxonomyGraph> ordered, const SeedList& seed);

struct CompletionResult {
  TaxonomyGraph graph;
  std::vector<std::pair<std::string, std::string>> skipped;  // term, reason
};

/// Asks the LLM (WT prompt over the graph's labels) for every unlinked seed term.
CompletionResult llm_complete(const TaxonomyGraph& g, const SeedList& seed, const LlmConfig& cfg, ChatClient& client);

}  // namespace taxoforge
