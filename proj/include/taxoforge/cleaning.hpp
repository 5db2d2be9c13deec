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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taxoforge/graph.hpp"

namespace taxoforge {

struct AuditEntry {
  std::string operation;  // self_loop, cycle, abstract, orphan
  TermId child;
  std::optional<TermId> parent;
};

std::string audit_csv(const std::vector<AuditEntry>& entries);

/// Returns the removed loop owners.
std::vector<TermId> remove_self_loops(TaxonomyGraph& g);

/// Zero-parent nodes sit at depth 0; others take the shortest hop count from
/// any of them. Nodes no root reaches get their component's diameter + 1.
std::map<TermId, int> node_depths(const TaxonomyGraph& g);

/// Requires a loop-free graph. The result is a DAG.
std::vector<EdgePair> break_cycles(TaxonomyGraph& g);

struct PruneResult {
  std::vector<EdgePair> removed_edges;
  std::vector<TermId> removed_nodes;
  std::vector<EdgePair> orphan_edges;
  std::vector<TermId> skipped;  // generic members absent from the graph
};

PruneResult prune_abstract_edges(TaxonomyGraph& g, const std::set<TermId>& generic);

struct CleanOptions {
  bool cycles = true;
  bool abstract = false;
  std::set<TermId> generic;
};

/// Self-loops always go; the other passes follow `options`.
std::vector<AuditEntry> clean(TaxonomyGraph& g, const CleanOptions& options);

}  // namespace taxoforge
