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

#include "taxoforge/ensemble.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>

#include "taxoforge/error.hpp"
#include "taxoforge/metrics.hpp"

namespace taxoforge {
namespace {

void absorb(TaxonomyGraph& out, const TaxonomyGraph& g) {
  for (const auto& [id, term] : g.terms()) out.upsert_term(term);
  for (const Edge& e : g.edges()) out.add_edge(e.child, e.parent, e.source);
}

bool is_seed(const Term& t) { return t.origins.contains(Origin::kSeed); }

}  // namespace

UnionResult union_merge(std::span<const TaxonomyGraph> graphs, double threshold, EmbeddingProvider* provider) {
  if (graphs.size() < 2) throw Error(ErrorCode::kInvalidArgument, "union needs at least two graphs");
  UnionResult result;
  TaxonomyGraph merged;
  for (const TaxonomyGraph& g : graphs) absorb(merged, g);
  if (!provider || merged.node_count() < 2) {
    result.graph = std::move(merged);
    return result;
  }

  std::vector<const Term*> terms;
  std::map<std::string, std::size_t> string_index;
  std::vector<std::string> strings;
  std::vector<std::vector<std::size_t>> surface;
  for (const auto& [id, term] : merged.terms()) {
    terms.push_back(&term);
    std::vector<std::size_t> forms;
    auto add = [&](const std::string& s) {
      auto [it, fresh] = string_index.emplace(s, strings.size());
      if (fresh) strings.push_back(s);
      forms.push_back(it->second);
    };
    add(term.label);
    for (const std::string& a : term.aliases) add(a);
    surface.push_back(std::move(forms));
  }
  const auto vectors = provider->embed(strings);
  if (vectors.size() != strings.size()) throw Error(ErrorCode::kProviderError, "embedding count mismatch");

  const std::size_t n = terms.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double best = -1.0;
      for (std::size_t x : surface[a])
        for (std::size_t y : surface[b]) best = std::max(best, cosine(vectors[x], vectors[y]));
      if (best >= threshold) pairs.emplace_back(best, a, b);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) {
    if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) > std::get<0>(r);
    return std::tie(std::get<1>(l), std::get<2>(l)) < std::tie(std::get<1>(r), std::get<2>(r));
  });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<bool> has_seed(n);
  for (std::size_t i = 0; i < n; ++i) has_seed[i] = is_seed(*terms[i]);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // The root of each set is its representative: the seed member if any,
  // otherwise the smallest id.
  for (const auto& [sim, a, b] : pairs) {
    std::size_t ra = find(a), rb = find(b);
    if (ra == rb || (has_seed[ra] && has_seed[rb])) continue;
    if (has_seed[rb] || (!has_seed[ra] && rb < ra)) std::swap(ra, rb);
    parent[rb] = ra;
    result.merges.push_back({terms[ra]->id, terms[rb]->id, sim});
  }

  std::map<std::size_t, Term> groups;
  std::map<TermId, TermId> rep;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    rep.emplace(terms[i]->id, terms[r]->id);
    auto [it, fresh] = groups.emplace(r, *terms[r]);
    if (i == r) continue;
    Term& into = it->second;
    const Term& from = *terms[i];
    into.aliases.insert(from.label);
    into.aliases.insert(from.aliases.begin(), from.aliases.end());
    into.origins.insert(from.origins.begin(), from.origins.end());
    if (!into.qid) into.qid = from.qid;
    if (!into.genericity_cluster) into.genericity_cluster = from.genericity_cluster;
  }
  for (auto& [r, term] : groups) {
    term.aliases.erase(term.label);
    result.graph.upsert_term(std::move(term));
  }
  for (const Edge& e : merged.edges()) {
    const TermId& c = rep.at(e.child);
    const TermId& p = rep.at(e.parent);
    if (c == p && e.child != e.parent) continue;
    result.graph.add_edge(c, p, e.source);
  }
  return result;
}

TaxonomyGraph cascade_merge(std::span<const TaxonomyGraph> ordered, const SeedList& seed) {
  if (ordered.empty()) throw Error(ErrorCode::kInvalidArgument, "cascade needs at least one graph");
  TaxonomyGraph out = ordered.front();
  for (const SeedEntry& e : seed.entries())
    if (std::any_of(ordered.begin(), ordered.end(), [&](const TaxonomyGraph& g) { return g.contains(e.id); }))
      out.upsert_term(seed.term(e));

  auto copy_edge = [&](const TaxonomyGraph& src, const TermId& c, const TermId& p) {
    for (const TermId& id : {c, p})
      if (!out.contains(id)) out.upsert_term(src.term(id));
    for (Source s : src.sources(c, p)) out.add_edge(c, p, s);
  };

  for (std::size_t k = 1; k < ordered.size(); ++k) {
    const TaxonomyGraph& src = ordered[k];
    for (const TermId& id : unlinked_terms(out, seed)) {
      if (!src.contains(id) || src.degree(id) == 0) continue;
      if (src.has_self_loop(id)) copy_edge(src, id, id);
      const auto direct_parents = src.parents(id);
      if (direct_parents.empty()) {
        for (const TermId& c : src.children(id)) copy_edge(src, c, id);
        continue;
      }
      std::set<TermId> seen{id};
      std::deque<TermId> queue{id};
      while (!queue.empty()) {
        TermId u = queue.front();
        queue.pop_front();
        for (const TermId& p : src.parents(u)) {
          const bool present = out.contains(p);
          copy_edge(src, u, p);
          if (!present && seen.insert(p).second) queue.push_back(p);
        }
      }
    }
  }
  return out;
}

CompletionResult llm_complete(const TaxonomyGraph& g, const SeedList& seed, const LlmConfig& cfg, ChatClient& client) {
  if (cfg.prompt_mode != PromptMode::kWithTerms)
    throw Error(ErrorCode::kInvalidArgument, "completion uses the WT prompt");
  CompletionResult result{g, {}};
  TaxonomyGraph& out = result.graph;
  for (const SeedEntry& e : seed.entries())
    if (!out.contains(e.id)) out.upsert_term(seed.term(e));

  std::vector<std::string> labels;
  for (const auto& [id, term] : out.terms()) labels.push_back(term.label);
  std::sort(labels.begin(), labels.end());

  std::vector<std::string> asked;
  for (const TermId& id : unlinked_terms(out, seed)) asked.push_back(out.term(id).label);
  if (asked.empty()) return result;

  auto answers = ask_hypernyms(asked, std::span<const std::string>(labels), cfg, client);
  for (const HypernymAnswer& answer : answers) {
    if (answer.skipped) {
      result.skipped.emplace_back(answer.term, *answer.skipped);
      continue;
    }
    const TermId child = canonicalize_label(answer.term);
    for (const std::string& label : answer.parents) {
      TermId parent = canonicalize_label(label);
      if (parent == child) continue;
      if (!out.contains(parent)) out.upsert_term(make_term(label, Origin::kLlm));
      out.add_edge(child, parent, Source::kLlm);
    }
  }
  return result;
}

}  // namespace taxoforge
