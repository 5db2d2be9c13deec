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

// Reference implementations written from the definitions, sharing no code
// with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Plain digraph on vertices 0..n-1; (child, parent) pairs, loops allowed.
struct Digraph {
  int n = 0;
  std::set<std::pair<int, int>> edges;
};

inline Digraph random_digraph(std::mt19937_64& rng, int max_nodes, double p, bool inject) {
  std::uniform_int_distribution<int> size(1, max_nodes);
  std::bernoulli_distribution coin(p);
  Digraph g;
  g.n = size(rng);
  for (int c = 0; c < g.n; ++c)
    for (int q = 0; q < g.n; ++q)
      if (c != q && coin(rng)) g.edges.insert({c, q});
  if (inject) {
    std::uniform_int_distribution<int> pick(0, g.n - 1);
    std::uniform_int_distribution<int> len(2, std::max(2, std::min(g.n, 5)));
    for (int k = 0; k < 3; ++k) {
      if (g.n >= 2) {
        std::vector<int> order(g.n);
        for (int i = 0; i < g.n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        const int m = std::min(len(rng), g.n);
        for (int i = 0; i < m; ++i) g.edges.insert({order[i], order[(i + 1) % m]});
      }
      if (coin(rng)) {
        const int v = pick(rng);
        g.edges.insert({v, v});
      }
    }
  }
  return g;
}

inline std::vector<std::vector<int>> parents_of(const Digraph& g) {
  std::vector<std::vector<int>> out(g.n);
  for (auto [c, q] : g.edges)
    if (c != q) out[c].push_back(q);
  return out;
}

/// Simple cycles of length >= 2, each counted once (rooted at its minimum).
inline std::size_t count_cycles(const Digraph& g) {
  const auto up = parents_of(g);
  std::size_t count = 0;
  std::vector<bool> on_path(g.n, false);
  for (int s = 0; s < g.n; ++s) {
    auto dfs = [&](auto&& self, int v) -> void {
      for (int w : up[v]) {
        if (w == s) {
          ++count;
        } else if (w > s && !on_path[w]) {
          on_path[w] = true;
          self(self, w);
          on_path[w] = false;
        }
      }
    };
    on_path[s] = true;
    dfs(dfs, s);
    on_path[s] = false;
  }
  return count;
}

inline bool acyclic(const Digraph& g) {
  for (auto [c, q] : g.edges)
    if (c == q) return false;
  std::vector<int> indegree(g.n, 0);
  for (auto [c, q] : g.edges) ++indegree[q];
  std::vector<int> ready;
  for (int v = 0; v < g.n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  int seen = 0;
  const auto up = parents_of(g);
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : up[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  return seen == g.n;
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

/// d[p][c]: hops from p down to c (parent -> child direction).
inline std::vector<std::vector<int>> floyd_warshall(const Digraph& g) {
  std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kInf));
  for (int v = 0; v < g.n; ++v) d[v][v] = 0;
  for (auto [c, q] : g.edges)
    if (c != q) d[q][c] = 1;
  for (int k = 0; k < g.n; ++k)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

struct Report {
  std::size_t nodes = 0, new_nodes = 0, unlinked = 0, edges = 0;
  double density = 0;
  std::size_t roots = 0, leaves = 0, max_parents = 0;
  double avg_parents = 0, avg_depth = 0;
  std::size_t diameter = 0, max_children = 0;
  double avg_children = 0;
  std::size_t components = 0, loops = 0, cycles = 0;
};

/// `seed` lists seed vertices; `absent_seeds` counts seed terms missing from g.
inline Report metrics(const Digraph& g, const std::set<int>& seed, std::size_t absent_seeds) {
  Report r;
  std::vector<int> incident(g.n, 0);
  std::vector<std::set<int>> up(g.n), down(g.n);
  for (auto [c, q] : g.edges) {
    ++incident[c];
    if (c != q) ++incident[q];
    if (c == q) {
      ++r.loops;
    } else {
      up[c].insert(q);
      down[q].insert(c);
    }
  }
  std::vector<bool> counted(g.n, true);
  r.unlinked = absent_seeds;
  for (int v : seed)
    if (incident[v] == 0) {
      ++r.unlinked;
      counted[v] = false;
    }
  for (int v = 0; v < g.n; ++v) {
    if (counted[v]) ++r.nodes;
    if (!seed.contains(v)) ++r.new_nodes;
  }
  r.edges = g.edges.size();
  const double links = static_cast<double>(r.edges - r.loops);
  if (r.nodes >= 2) r.density = links / (static_cast<double>(r.nodes) * (r.nodes - 1.0));
  for (int v = 0; v < g.n; ++v) {
    if (up[v].empty() && !down[v].empty()) ++r.roots;
    if (down[v].empty() && !up[v].empty()) ++r.leaves;
    r.max_parents = std::max(r.max_parents, up[v].size());
    r.max_children = std::max(r.max_children, down[v].size());
  }
  if (r.nodes > 0) {
    r.avg_parents = links / static_cast<double>(r.nodes);
    r.avg_children = links / static_cast<double>(r.nodes);
  }
  const auto d = floyd_warshall(g);
  double depth_sum = 0;
  std::size_t depth_pairs = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i != j && d[i][j] < kInf) r.diameter = std::max<std::size_t>(r.diameter, d[i][j]);
      const bool root = up[i].empty() && !down[i].empty();
      const bool leaf = down[j].empty() && !up[j].empty();
      if (root && leaf && i != j && d[i][j] < kInf) {
        depth_sum += d[i][j];
        ++depth_pairs;
      }
    }
  if (depth_pairs > 0) r.avg_depth = depth_sum / static_cast<double>(depth_pairs);

  std::vector<std::vector<bool>> reach(g.n, std::vector<bool>(g.n, false));
  for (int v = 0; v < g.n; ++v) reach[v][v] = true;
  for (auto [c, q] : g.edges) reach[c][q] = reach[q][c] = true;
  for (int k = 0; k < g.n; ++k)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (int v = 0; v < g.n; ++v) {
    if (!counted[v]) continue;
    bool first = true;
    for (int u = 0; u < v; ++u)
      if (counted[u] && reach[u][v]) first = false;
    if (first) ++r.components;
  }
  r.cycles = count_cycles(g);
  return r;
}

/// Textbook TOPSIS, all criteria minimised unless `maximise[j]`.
inline std::vector<double> topsis(const std::vector<std::vector<double>>& x, const std::vector<double>& w,
                                  const std::vector<bool>& maximise) {
  const std::size_t m = x.size(), k = x.front().size();
  std::vector<std::vector<double>> v(m, std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) ss += x[i][j] * x[i][j];
    for (std::size_t i = 0; i < m; ++i) v[i][j] = ss == 0 ? 0 : w[j] * x[i][j] / std::sqrt(ss);
  }
  std::vector<double> best(k), worst(k);
  for (std::size_t j = 0; j < k; ++j) {
    double lo = v[0][j], hi = v[0][j];
    for (std::size_t i = 1; i < m; ++i) {
      lo = std::min(lo, v[i][j]);
      hi = std::max(hi, v[i][j]);
    }
    best[j] = maximise[j] ? hi : lo;
    worst[j] = maximise[j] ? lo : hi;
  }
  std::vector<double> score(m);
  for (std::size_t i = 0; i < m; ++i) {
    double plus = 0, minus = 0;
    for (std::size_t j = 0; j < k; ++j) {
      plus += std::pow(v[i][j] - best[j], 2);
      minus += std::pow(v[i][j] - worst[j], 2);
    }
    plus = std::sqrt(plus);
    minus = std::sqrt(minus);
    score[i] = plus + minus == 0 ? 1.0 : minus / (plus + minus);
  }
  return score;
}

/// units[u] holds the values given to unit u (any number of raters).
/// Alpha from pairwise disagreements between individual value instances.
inline std::optional<double> alpha(const std::vector<std::vector<int>>& units) {
  std::vector<int> pooled;
  double within = 0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    double disagree = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j && u[i] != u[j]) disagree += 1;
    within += disagree / (u.size() - 1.0);
    pooled.insert(pooled.end(), u.begin(), u.end());
  }
  const double n = static_cast<double>(pooled.size());
  if (n == 0) return std::nullopt;
  double between = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j)
      if (i != j && pooled[i] != pooled[j]) between += 1;
  if (between == 0) return 1.0;
  const double observed = within / n;
  const double expected = between / (n * (n - 1));
  return 1.0 - observed / expected;
}

}  // namespace oracle
