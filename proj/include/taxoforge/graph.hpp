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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace taxoforge {

/// Canonical term key: Unicode NFKC case-folded, trimmed, inner whitespace
/// collapsed to single spaces. Never empty. Only constructible through
/// canonicalize_label, so every TermId in the system is canonical.
class TermId {
 public:
  const std::string& key() const noexcept { return key_; }
  auto operator<=>(const TermId&) const = default;

 private:
  friend TermId canonicalize_label(std::string_view raw);
  explicit TermId(std::string key) : key_(std::move(key)) {}
  std::string key_;
};

/// Throws Error(kInvalidLabel) when nothing but whitespace remains.
TermId canonicalize_label(std::string_view raw);

bool is_valid_qid(std::string_view qid) noexcept;

enum class Origin : std::uint8_t { kSeed, kCso, kWikidata, kLlm };
enum class Source : std::uint8_t { kCso, kWikidata, kLlm, kEnsemble };

std::string_view to_string(Origin origin) noexcept;
std::string_view to_string(Source source) noexcept;
Origin parse_origin(std::string_view text);
Source parse_source(std::string_view text);

struct Term {
  TermId id;
  std::string label;
  std::set<std::string> aliases;
  std::optional<std::string> qid;
  std::optional<int> genericity_cluster;
  std::set<Origin> origins;

  bool operator==(const Term&) const = default;
};

/// Builds a Term whose id is the canonical form of `label`.
Term make_term(std::string_view label, Origin origin);

/// child IS-A parent.
struct Edge {
  TermId child;
  TermId parent;
  Source source;

  auto operator<=>(const Edge&) const = default;
};

using EdgePair = std::pair<TermId, TermId>;

/// Integer-indexed view of a graph over distinct (child, parent) pairs.
/// Node indices follow TermId order. Self-loops are kept out of the
/// adjacency lists and recorded in `self_loop` instead.
struct Adjacency {
  std::vector<TermId> ids;
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<int>> children;
  std::vector<bool> self_loop;

  std::size_t size() const noexcept { return ids.size(); }
  int index_of(const TermId& id) const;  // -1 when absent
};

class TaxonomyGraph {
 public:
  enum class Upsert { kNo, kYes };

  /// Inserts the term, or merges it into an existing one: aliases and origins
  /// are unioned, qid/cluster fill in only when absent. The stored label is
  /// kept and the incoming label becomes an alias when it differs.
  const Term& upsert_term(Term term);

  bool contains(const TermId& id) const { return terms_.contains(id); }
  const Term* find(const TermId& id) const;
  const Term& term(const TermId& id) const;  // throws kMissingTerm

  /// Returns true when the (child, parent, source) triple was new. With
  /// Upsert::kYes, unknown endpoints are inserted with `source`'s origin.
  bool add_edge(const TermId& child, const TermId& parent, Source source,
                Upsert upsert = Upsert::kNo);

  /// Removes every source's copy of (child, parent). Returns triples removed.
  std::size_t remove_edge(const TermId& child, const TermId& parent);

  /// Removes the term and all incident edges.
  void remove_term(const TermId& id);

  const std::map<TermId, Term>& terms() const noexcept { return terms_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }

  std::size_t node_count() const noexcept { return terms_.size(); }
  /// Distinct (child, parent) pairs, self-loops included.
  std::size_t pair_count() const noexcept;
  std::size_t self_loop_count() const;

  std::vector<EdgePair> edge_pairs() const;
  /// Distinct parents / children, self excluded.
  std::vector<TermId> parents(const TermId& id) const;
  std::vector<TermId> children(const TermId& id) const;
  bool has_self_loop(const TermId& id) const;
  /// Distinct non-loop + loop incident pairs.
  std::size_t degree(const TermId& id) const;
  std::set<Source> sources(const TermId& child, const TermId& parent) const;

  Adjacency adjacency() const;

  bool operator==(const TaxonomyGraph& other) const {
    return terms_ == other.terms_ && edges_ == other.edges_;
  }

 private:
  std::map<TermId, Term> terms_;
  std::set<Edge> edges_;
  std::map<TermId, std::set<TermId>> parents_;
  std::map<TermId, std::set<TermId>> children_;
};

Source source_for(Origin origin) noexcept;
Origin origin_for(Source source) noexcept;

inline constexpr std::size_t kDefaultCycleCap = 10000;

/// Breadth-first ancestor closure excluding `id`. `max_depth` must be
/// positive when given; nullopt means unbounded.
std::set<TermId> ancestors(const TaxonomyGraph& g, const TermId& id,
                           std::optional<std::size_t> max_depth = std::nullopt);

/// Components ignoring direction, members sorted, ordered by smallest member.
std::vector<std::vector<TermId>> weak_components(const TaxonomyGraph& g);

struct CycleEnumeration {
  /// Each cycle lists nodes along child->parent edges, starting at its
  /// smallest member.
  std::vector<std::vector<TermId>> cycles;
  bool saturated = false;
};

/// Simple directed cycles of length >= 2 (self-loops excluded), stopping once
/// `cap` cycles have been found.
CycleEnumeration simple_cycles(const TaxonomyGraph& g, std::size_t cap = kDefaultCycleCap);

/// Same enumeration on an Adjacency view, as index lists.
std::vector<std::vector<int>> simple_cycles(const Adjacency& adj, std::size_t cap, bool* saturated);

/// Strongly connected components (Tarjan) over the non-loop adjacency.
std::vector<std::vector<int>> strong_components(const Adjacency& adj);

bool is_dag(const TaxonomyGraph& g);

// Flat-file exports. Edge CSV: `child,parent,source`; node CSV:
// `id,label,qid,origins,cluster` with origins '|'-joined and sorted.
// Aliases travel in a separate `id,alias` table, one row per alias.
std::string edges_csv(const TaxonomyGraph& g);
std::string nodes_csv(const TaxonomyGraph& g);
std::string aliases_csv(const TaxonomyGraph& g);
std::string to_dot(const TaxonomyGraph& g);

/// Inverse of the exports. Without a node table, endpoints get the origin of
/// the edge source that introduced them.
TaxonomyGraph read_graph_csv(std::string_view edges_text,
                             std::optional<std::string_view> nodes_text = std::nullopt,
                             std::optional<std::string_view> aliases_text = std::nullopt);

}  // namespace taxoforge
