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

#include "taxoforge/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <deque>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"

namespace taxoforge {
namespace {

std::vector<int> distances_from(const Adjacency& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int c : adj.children[u]) {
      if (dist[c] < 0) {
        dist[c] = dist[u] + 1;
        queue.push_back(c);
      }
    }
  }
  return dist;
}

std::size_t diameter(const Adjacency& adj) {
  int best = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (adj.children[s].empty()) continue;
    for (int d : distances_from(adj, static_cast<int>(s))) best = std::max(best, d);
  }
  return static_cast<std::size_t>(best);
}

double avg_depth(const Adjacency& adj) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < adj.size(); ++r) {
    if (!adj.parents[r].empty() || adj.children[r].empty()) continue;
    const auto dist = distances_from(adj, static_cast<int>(r));
    for (std::size_t v = 0; v < adj.size(); ++v) {
      if (dist[v] > 0 && adj.children[v].empty()) {
        total += dist[v];
        ++pairs;
      }
    }
  }
  return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": bad number '" + field + "'");
  return value;
}

}  // namespace

std::vector<TermId> unlinked_terms(const TaxonomyGraph& g, const SeedList& seed) {
  std::vector<TermId> out;
  for (const SeedEntry& e : seed.entries())
    if (!g.contains(e.id) || g.degree(e.id) == 0) out.push_back(e.id);
  return out;
}

std::size_t diameter(const TaxonomyGraph& g) { return diameter(g.adjacency()); }

double avg_depth(const TaxonomyGraph& g) { return avg_depth(g.adjacency()); }

MetricsReport compute_report(const TaxonomyGraph& g, const SeedList& seed, std::size_t cycle_cap) {
  MetricsReport r;
  const Adjacency adj = g.adjacency();
  const auto unlinked = unlinked_terms(g, seed);
  std::size_t isolates = 0;
  for (const TermId& id : unlinked)
    if (g.contains(id)) ++isolates;

  r.unlinked = unlinked.size();
  r.nodes = g.node_count() - isolates;
  for (const auto& [id, term] : g.terms())
    if (!seed.contains(id)) ++r.new_nodes;
  r.edges = g.pair_count();
  r.loops = g.self_loop_count();
  const std::size_t links = r.edges - r.loops;
  if (r.nodes >= 2) r.density = static_cast<double>(links) / (static_cast<double>(r.nodes) * (r.nodes - 1));

  for (std::size_t i = 0; i < adj.size(); ++i) {
    const std::size_t np = adj.parents[i].size();
    const std::size_t nc = adj.children[i].size();
    if (np == 0 && nc > 0) ++r.roots;
    if (nc == 0 && np > 0) ++r.leaves;
    r.max_parents = std::max(r.max_parents, np);
    r.max_children = std::max(r.max_children, nc);
  }
  if (r.nodes > 0) {
    r.avg_parents = static_cast<double>(links) / static_cast<double>(r.nodes);
    r.avg_children = r.avg_parents;
  }
  r.avg_depth = avg_depth(adj);
  r.diameter = diameter(adj);
  r.components = weak_components(g).size() - isolates;

  bool saturated = false;
  r.cycles = simple_cycles(adj, cycle_cap, &saturated).size();
  r.cycles_saturated = saturated;
  return r;
}

std::string metrics_row(std::string_view config_id, const MetricsReport& r) {
  auto n = [](std::size_t v) { return std::to_string(v); };
  std::vector<std::string> fields{std::string(config_id), n(r.nodes), n(r.new_nodes), n(r.unlinked), n(r.edges),
                                  format_real(r.density), n(r.roots), n(r.leaves), n(r.max_parents),
                                  format_real(r.avg_parents), format_real(r.avg_depth), n(r.diameter),
                                  n(r.max_children), format_real(r.avg_children), n(r.components), n(r.loops),
                                  n(r.cycles)};
  return csv_row(fields);
}

std::string metrics_csv(std::span<const std::pair<std::string, MetricsReport>> reports) {
  std::string out(kMetricsHeader);
  for (const auto& [id, report] : reports) out += metrics_row(id, report);
  return out;
}

std::vector<std::pair<std::string, MetricsReport>> parse_metrics_csv(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty() || csv_row(rows.front().fields) != kMetricsHeader)
    throw Error(ErrorCode::kParseError, "metrics CSV header mismatch");
  std::vector<std::pair<std::string, MetricsReport>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    const std::size_t line = rows[i].line;
    if (f.size() != 17) throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": expected 17 fields");
    auto n = [&](int k) { return parse_number<std::size_t>(f[k], line); };
    auto x = [&](int k) { return parse_number<double>(f[k], line); };
    MetricsReport r{n(1), n(2), n(3), n(4), x(5), n(6), n(7), n(8), x(9), x(10), n(11), n(12), x(13), n(14), n(15), n(16)};
    out.emplace_back(f[0], r);
  }
  return out;
}

}  // namespace taxoforge
