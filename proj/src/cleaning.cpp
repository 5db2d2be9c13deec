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

#include "taxoforge/cleaning.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <tuple>

#include "taxoforge/csv.hpp"

namespace taxoforge {
namespace {

std::vector<int> bfs_down(const Adjacency& adj, const std::vector<int>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue;
  for (int s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
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

bool reaches_via_parents(const TaxonomyGraph& g, const TermId& from, const TermId& target) {
  std::set<TermId> seen{from};
  std::deque<TermId> queue{from};
  while (!queue.empty()) {
    TermId u = queue.front();
    queue.pop_front();
    for (const TermId& p : g.parents(u)) {
      if (p == target) return true;
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return false;
}

}  // namespace

std::string audit_csv(const std::vector<AuditEntry>& entries) {
  std::string out = "operation,child,parent\n";
  for (const AuditEntry& e : entries) {
    std::vector<std::string> row{e.operation, e.child.key(), e.parent ? e.parent->key() : std::string()};
    out += csv_row(row);
  }
  return out;
}

std::vector<TermId> remove_self_loops(TaxonomyGraph& g) {
  std::vector<TermId> removed;
  for (const auto& [id, term] : g.terms())
    if (g.has_self_loop(id)) removed.push_back(id);
  for (const TermId& id : removed) g.remove_edge(id, id);
  return removed;
}

std::map<TermId, int> node_depths(const TaxonomyGraph& g) {
  const Adjacency adj = g.adjacency();
  const int n = static_cast<int>(adj.size());

  std::vector<int> roots;
  for (int i = 0; i < n; ++i)
    if (adj.parents[i].empty()) roots.push_back(i);
  std::vector<int> depth = bfs_down(adj, roots);

  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int p : adj.parents[i]) comp[find(i)] = find(p);

  std::map<int, int> sentinel;
  for (int i = 0; i < n; ++i) {
    if (depth[i] >= 0) continue;
    const int c = find(i);
    if (sentinel.contains(c)) continue;
    int diameter = 0;
    for (int s = 0; s < n; ++s) {
      if (find(s) != c) continue;
      for (int d : bfs_down(adj, {s})) diameter = std::max(diameter, d);
    }
    sentinel[c] = diameter + 1;
  }

  std::map<TermId, int> out;
  for (int i = 0; i < n; ++i) out.emplace(adj.ids[i], depth[i] >= 0 ? depth[i] : sentinel.at(find(i)));
  return out;
}

std::vector<EdgePair> break_cycles(TaxonomyGraph& g) {
  std::vector<EdgePair> removed;
  for (;;) {
    const Adjacency adj = g.adjacency();
    std::vector<int> scc_of(adj.size(), -1);
    int nontrivial = 0;
    for (const auto& scc : strong_components(adj)) {
      if (scc.size() < 2) continue;
      for (int v : scc) scc_of[v] = nontrivial;
      ++nontrivial;
    }
    if (nontrivial == 0) break;

    const auto depth = node_depths(g);
    std::vector<std::tuple<int, TermId, TermId>> candidates;
    std::optional<EdgePair> fallback;
    for (std::size_t c = 0; c < adj.size(); ++c) {
      for (int p : adj.parents[c]) {
        if (scc_of[c] < 0 || scc_of[c] != scc_of[p]) continue;
        EdgePair pair{adj.ids[c], adj.ids[p]};
        if (!fallback || *fallback < pair) fallback = pair;
        const int gap = depth.at(pair.second) - depth.at(pair.first);
        if (gap > 0) candidates.emplace_back(-gap, pair.first, pair.second);
      }
    }
    std::sort(candidates.begin(), candidates.end());

    bool progressed = false;
    for (const auto& [neg_gap, child, parent] : candidates) {
      if (!reaches_via_parents(g, parent, child)) continue;
      g.remove_edge(child, parent);
      removed.emplace_back(child, parent);
      progressed = true;
    }
    if (!progressed) {
      g.remove_edge(fallback->first, fallback->second);
      removed.push_back(*fallback);
    }
  }
  return removed;
}

PruneResult prune_abstract_edges(TaxonomyGraph& g, const std::set<TermId>& generic) {
  PruneResult result;
  std::set<TermId> watch;
  for (const TermId& id : generic) {
    if (!g.contains(id)) {
      result.skipped.push_back(id);
      continue;
    }
    watch.merge(ancestors(g, id));
  }
  for (const TermId& id : generic) {
    if (!g.contains(id)) continue;
    for (const TermId& p : g.parents(id)) {
      g.remove_edge(id, p);
      result.removed_edges.emplace_back(id, p);
    }
  }

  auto removable = [&](const TermId& id) {
    const Term* t = g.find(id);
    return t && !t->origins.contains(Origin::kSeed) && !generic.contains(id) && g.children(id).empty();
  };
  std::deque<TermId> queue(watch.begin(), watch.end());
  while (!queue.empty()) {
    TermId id = queue.front();
    queue.pop_front();
    if (!removable(id)) continue;
    for (const TermId& p : g.parents(id)) {
      result.orphan_edges.emplace_back(id, p);
      queue.push_back(p);
    }
    g.remove_term(id);
    result.removed_nodes.push_back(id);
  }
  return result;
}

std::vector<AuditEntry> clean(TaxonomyGraph& g, const CleanOptions& options) {
  std::vector<AuditEntry> audit;
  for (const TermId& id : remove_self_loops(g)) audit.push_back({"self_loop", id, id});
  if (options.cycles)
    for (auto& [c, p] : break_cycles(g)) audit.push_back({"cycle", c, p});
  if (options.abstract) {
    PruneResult pruned = prune_abstract_edges(g, options.generic);
    for (auto& [c, p] : pruned.removed_edges) audit.push_back({"abstract", c, p});
    for (const TermId& id : pruned.removed_nodes) {
      bool any = false;
      for (auto& [c, p] : pruned.orphan_edges) {
        if (c != id) continue;
        audit.push_back({"orphan", c, p});
        any = true;
      }
      if (!any) audit.push_back({"orphan", id, std::nullopt});
    }
  }
  return audit;
}

}  // namespace taxoforge
