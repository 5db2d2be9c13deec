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

#include "taxoforge/cso.hpp"

#include <algorithm>
#include <deque>
#include <mutex>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/parallel.hpp"

namespace taxoforge {

void CsoGraph::add_super_topic(const TermId& broader, const TermId& narrower) {
  narrower_broader_.emplace(narrower, broader);
}

void CsoGraph::add_preferential_equivalent(const TermId& alias, const TermId& canonical) {
  preferential_.insert_or_assign(alias, canonical);
}

void CsoGraph::add_same_as(const TermId& topic, std::string external_id) {
  same_as_[topic].insert(std::move(external_id));
}

void CsoGraph::add_label(const TermId& topic, std::string label) { labels_.try_emplace(topic, std::move(label)); }

void CsoGraph::finalize() {
  std::map<TermId, TermId> resolved;
  for (const auto& [alias, target] : preferential_) {
    TermId current = target;
    std::set<TermId> seen{alias};
    while (seen.insert(current).second) {
      auto it = preferential_.find(current);
      if (it == preferential_.end() || it->second == current) break;
      current = it->second;
    }
    resolved.insert_or_assign(alias, current);
  }
  preferential_ = std::move(resolved);

  broader_.clear();
  for (const auto& [narrower, broader] : narrower_broader_) broader_[resolve(narrower)].insert(resolve(broader));

  alias_groups_.clear();
  for (const auto& [alias, canonical] : preferential_) alias_groups_[canonical].insert(alias);

  by_qid_.clear();
  for (const auto& [topic, ids] : same_as_)
    for (const auto& id : ids)
      if (is_valid_qid(id)) by_qid_[id].insert(resolve(topic));
}

TermId CsoGraph::resolve(const TermId& topic) const {
  auto it = preferential_.find(topic);
  return it == preferential_.end() ? topic : it->second;
}

const std::string& CsoGraph::label(const TermId& topic) const {
  auto it = labels_.find(topic);
  return it == labels_.end() ? topic.key() : it->second;
}

std::set<std::string> CsoGraph::aliases_of(const TermId& canonical) const {
  std::set<std::string> out{label(canonical)};
  if (auto it = alias_groups_.find(canonical); it != alias_groups_.end())
    for (const TermId& alias : it->second) out.insert(label(alias));
  return out;
}

std::set<TermId> CsoGraph::broader(const TermId& canonical) const {
  auto it = broader_.find(canonical);
  return it == broader_.end() ? std::set<TermId>{} : it->second;
}

std::vector<TermId> CsoGraph::topics_for_qid(const std::string& qid) const {
  auto it = by_qid_.find(qid);
  if (it == by_qid_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> CsoGraph::qids_of(const TermId& canonical) const {
  std::set<std::string> out;
  auto collect = [&](const TermId& t) {
    if (auto it = same_as_.find(t); it != same_as_.end())
      for (const auto& id : it->second)
        if (is_valid_qid(id)) out.insert(id);
  };
  collect(canonical);
  if (auto it = alias_groups_.find(canonical); it != alias_groups_.end())
    for (const TermId& alias : it->second) collect(alias);
  return {out.begin(), out.end()};
}

namespace {

std::string_view strip_brackets(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') s = s.substr(1, s.size() - 2);
  return s;
}

std::string_view local_name(std::string_view uri) {
  while (uri.size() > 1 && uri.back() == '/') uri.remove_suffix(1);
  auto cut = uri.find_last_of("/#");
  return cut == std::string_view::npos ? uri : uri.substr(cut + 1);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string uri_to_label(std::string_view uri) {
  std::string_view segment = local_name(strip_brackets(uri));
  std::string out;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    char c = segment[i];
    if (c == '%' && i + 2 < segment.size()) {
      int hi = hex_value(segment[i + 1]), lo = hex_value(segment[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(c == '_' ? ' ' : c);
  }
  return out;
}

CsoGraph parse_cso_dump(std::string_view text) {
  CsoGraph cso;
  auto topic = [&](std::string_view uri) {
    std::string label = uri_to_label(uri);
    TermId id = canonicalize_label(label);
    cso.add_label(id, std::move(label));
    return id;
  };
  for (const CsvRecord& row : parse_csv(text)) {
    ++cso.stats.lines;
    if (row.fields.size() != 3)
      throw Error(ErrorCode::kParseError,
                  "CSO dump line " + std::to_string(row.line) + ": expected 3 fields, got " + std::to_string(row.fields.size()));
    std::string_view predicate = local_name(strip_brackets(row.fields[1]));
    try {
      if (predicate == "superTopicOf") {
        cso.add_super_topic(topic(row.fields[0]), topic(row.fields[2]));
        ++cso.stats.super_topic_of;
      } else if (predicate == "preferentialEquivalent") {
        cso.add_preferential_equivalent(topic(row.fields[0]), topic(row.fields[2]));
        ++cso.stats.preferential_equivalent;
      } else if (predicate == "sameAs" || predicate == "owl:sameAs") {
        std::string_view object = strip_brackets(row.fields[2]);
        std::string external(object);
        if (object.find("wikidata.org") != std::string_view::npos && is_valid_qid(local_name(object)))
          external = std::string(local_name(object));
        cso.add_same_as(topic(row.fields[0]), std::move(external));
        ++cso.stats.same_as;
      } else {
        ++cso.stats.skipped;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidLabel) throw;
      throw Error(ErrorCode::kParseError, "CSO dump line " + std::to_string(row.line) + ": empty topic label");
    }
  }
  cso.finalize();
  return cso;
}

CsoGraph load_cso_dump(const std::filesystem::path& path) { return parse_cso_dump(read_file(path)); }

CsoLinks link_seed_to_cso(const SeedList& seed, const CsoGraph& cso, const CsoLinkConfig& cfg,
                          const SeedAliases& seed_aliases) {
  if (!(cfg.sim_threshold >= 0.0 && cfg.sim_threshold <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "similarity threshold must lie in [0, 1]");
  if (!cfg.provider) throw Error(ErrorCode::kInvalidArgument, "CSO linking needs an embedding provider");

  struct Outcome {
    std::optional<TermId> best;
    double similarity = -2.0;
  };
  const auto& entries = seed.entries();
  std::vector<Outcome> outcomes(entries.size());
  parallel_for(entries.size(), cfg.workers, [&](std::size_t i) {
    const SeedEntry& e = entries[i];
    std::set<std::string> aliases{e.label};
    if (auto it = seed_aliases.find(e.id); it != seed_aliases.end() && !it->second.empty()) aliases = it->second;
    for (const TermId& candidate : cso.topics_for_qid(e.qid)) {
      double sim = alias_similarity(aliases, cso.aliases_of(candidate), *cfg.provider);
      if (sim > outcomes[i].similarity) outcomes[i] = Outcome{candidate, sim};
    }
  });

  CsoLinks links;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (!o.best) {
      links.unmatched.push_back(entries[i].id);
    } else if (o.similarity >= cfg.sim_threshold) {
      links.linked.emplace(entries[i].id, *o.best);
    } else {
      links.rejected.push_back(RejectedLink{entries[i].id, *o.best, o.similarity});
    }
  }
  return links;
}

TaxonomyGraph build_cso_taxonomy(const SeedList& seed, const CsoLinks& links, const CsoGraph& cso) {
  TaxonomyGraph g;
  for (const SeedEntry& e : seed.entries()) g.upsert_term(seed.term(e));

  // A CSO topic linked from a seed term is represented by that seed node;
  // the first seed term in seed order wins when several share a topic.
  std::map<TermId, TermId> node_for_topic;
  for (const SeedEntry& e : seed.entries())
    if (auto it = links.linked.find(e.id); it != links.linked.end()) node_for_topic.try_emplace(it->second, e.id);

  auto node = [&](const TermId& topic) {
    if (auto it = node_for_topic.find(topic); it != node_for_topic.end()) return it->second;
    Term t = make_term(cso.label(topic), Origin::kCso);
    for (const auto& alias : cso.aliases_of(topic))
      if (alias != t.label) t.aliases.insert(alias);
    if (auto q = cso.qids_of(topic); q.size() == 1) t.qid = q.front();
    TermId id = t.id;
    if (!g.contains(id)) {
      g.upsert_term(std::move(t));
    } else {
      Term marker = make_term(g.term(id).label, Origin::kCso);
      g.upsert_term(std::move(marker));
    }
    return id;
  };

  std::set<TermId> expanded;
  for (const SeedEntry& e : seed.entries()) {
    auto link = links.linked.find(e.id);
    if (link == links.linked.end()) continue;
    g.upsert_term(make_term(e.label, Origin::kCso));
    for (const auto& alias : cso.aliases_of(link->second)) {
      Term extra = make_term(e.label, Origin::kCso);
      if (alias != e.label) extra.aliases.insert(alias);
      g.upsert_term(std::move(extra));
    }
    // The seed node takes the linked topic's parents even when another seed
    // term owns the topic node.
    for (const TermId& broader : cso.broader(link->second)) g.add_edge(e.id, node(broader), Source::kCso);

    std::deque<TermId> queue{link->second};
    while (!queue.empty()) {
      TermId topic = queue.front();
      queue.pop_front();
      if (!expanded.insert(topic).second) continue;
      TermId child = node(topic);
      for (const TermId& broader : cso.broader(topic)) {
        g.add_edge(child, node(broader), Source::kCso);
        if (!expanded.contains(broader)) queue.push_back(broader);
      }
    }
  }
  return g;
}

std::string rejected_links_csv(const CsoLinks& links) {
  std::string out = "seed,cso_term,similarity\n";
  for (const RejectedLink& r : links.rejected) {
    std::string fields[] = {r.seed.key(), r.cso_term.key(), format_real(r.similarity)};
    out += csv_row(fields);
  }
  return out;
}

}  // namespace taxoforge
