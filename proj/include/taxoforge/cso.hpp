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
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/graph.hpp"
#include "taxoforge/seed.hpp"
#include "taxoforge/similarity.hpp"

namespace taxoforge {

struct CsoParseStats {
  std::size_t lines = 0;
  std::size_t super_topic_of = 0;
  std::size_t preferential_equivalent = 0;
  std::size_t same_as = 0;
  std::size_t skipped = 0;  // triples with other predicates
};

/// The three ontology relations the builder consumes, keyed by canonical
/// topic label.
class CsoGraph {
 public:
  /// Records `broader` superTopicOf `narrower`.
  void add_super_topic(const TermId& broader, const TermId& narrower);
  void add_preferential_equivalent(const TermId& alias, const TermId& canonical);
  void add_same_as(const TermId& topic, std::string external_id);
  void add_label(const TermId& topic, std::string label);

  /// Follows preferentialEquivalent chains so that the alias map becomes
  /// idempotent. Called by the parser; call again after manual edits.
  void finalize();

  /// Canonical form under preferentialEquivalent (identity when absent).
  TermId resolve(const TermId& topic) const;
  const std::string& label(const TermId& topic) const;
  /// Display labels of `canonical` and every alias pointing to it.
  std::set<std::string> aliases_of(const TermId& canonical) const;
  /// Collapsed broader topics of a canonical topic; may contain the topic
  /// itself when two aliases were related.
  std::set<TermId> broader(const TermId& canonical) const;
  /// Canonical topics carrying a Wikidata sameAs link to `qid`.
  std::vector<TermId> topics_for_qid(const std::string& qid) const;
  std::vector<std::string> qids_of(const TermId& canonical) const;

  const std::set<EdgePair>& narrower_broader() const noexcept { return narrower_broader_; }
  const std::map<TermId, TermId>& preferential_equivalent() const noexcept { return preferential_; }
  const std::map<TermId, std::set<std::string>>& same_as() const noexcept { return same_as_; }

  CsoParseStats stats;

 private:
  std::set<EdgePair> narrower_broader_;
  std::map<TermId, TermId> preferential_;
  std::map<TermId, std::set<std::string>> same_as_;
  std::map<TermId, std::string> labels_;
  std::map<TermId, std::set<TermId>> broader_;
  std::map<TermId, std::set<TermId>> alias_groups_;
  std::map<std::string, std::set<TermId>> by_qid_;
};

/// Readable label from a topic URI: last path segment, percent-decoded,
/// underscores to spaces.
std::string uri_to_label(std::string_view uri);

/// Triple CSV (`subject,predicate,object`, URIs optionally in angle
/// brackets). Other predicates are counted and skipped; a line without three
/// fields throws kParseError with its line number.
CsoGraph parse_cso_dump(std::string_view text);
CsoGraph load_cso_dump(const std::filesystem::path& path);

struct CsoLinkConfig {
  double sim_threshold = 0.80;
  EmbeddingProvider* provider = nullptr;
  std::size_t workers = 1;
};

struct RejectedLink {
  TermId seed;
  TermId cso_term;
  double similarity;
};

struct CsoLinks {
  std::map<TermId, TermId> linked;    // seed term -> canonical CSO topic
  std::vector<RejectedLink> rejected;  // QID matched but similarity below threshold
  std::vector<TermId> unmatched;       // no CSO topic shares the QID
};

/// Alias sets per seed term for the similarity gate; a seed term absent from
/// the map uses its own label.
using SeedAliases = std::map<TermId, std::set<std::string>>;

/// A seed term links to a CSO topic iff the topic's sameAs QID equals the
/// seed QID and alias_similarity reaches the threshold. Among several
/// QID-matching topics the most similar wins (ties: smallest id).
CsoLinks link_seed_to_cso(const SeedList& seed, const CsoGraph& cso, const CsoLinkConfig& cfg,
                          const SeedAliases& seed_aliases = {});

/// Ancestor traversal over superTopicOf from each linked topic, with aliases
/// collapsed before insertion. Unlinked seed terms become isolated nodes.
TaxonomyGraph build_cso_taxonomy(const SeedList& seed, const CsoLinks& links, const CsoGraph& cso);

/// `seed,cso_term,similarity` audit table.
std::string rejected_links_csv(const CsoLinks& links);

}  // namespace taxoforge
