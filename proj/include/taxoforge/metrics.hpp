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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxoforge/graph.hpp"
#include "taxoforge/seed.hpp"

namespace taxoforge {

struct MetricsReport {
  std::size_t nodes = 0;
  std::size_t new_nodes = 0;
  std::size_t unlinked = 0;
  std::size_t edges = 0;
  double density = 0.0;
  std::size_t roots = 0;
  std::size_t leaves = 0;
  std::size_t max_parents = 0;
  double avg_parents = 0.0;
  double avg_depth = 0.0;
  std::size_t diameter = 0;
  std::size_t max_children = 0;
  double avg_children = 0.0;
  std::size_t components = 0;
  std::size_t loops = 0;
  std::size_t cycles = 0;
  bool cycles_saturated = false;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport compute_report(const TaxonomyGraph& g, const SeedList& seed, std::size_t cycle_cap = kDefaultCycleCap);

/// Seed terms with no incident edge, in seed order. Seeds missing from `g` count.
std::vector<TermId> unlinked_terms(const TaxonomyGraph& g, const SeedList& seed);

std::size_t diameter(const TaxonomyGraph& g);
double avg_depth(const TaxonomyGraph& g);

inline constexpr std::string_view kMetricsHeader =
    "config_id,nodes,new_nodes,unlinked,edges,density,roots,leaves,max_parents,avg_parents,avg_depth,"
    "diameter,max_children,avg_children,components,loops,cycles\n";

std::string metrics_row(std::string_view config_id, const MetricsReport& r);
std::string metrics_csv(std::span<const std::pair<std::string, MetricsReport>> reports);
std::vector<std::pair<std::string, MetricsReport>> parse_metrics_csv(std::string_view text);

}  // namespace taxoforge
