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

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/graph.hpp"

namespace taxoforge {

struct SeedEntry {
  std::string label;
  TermId id;
  std::string qid;
  int cluster = 0;  // 0 = most generic
};

/// Ordered seed term list with genericity clusters. Labels (canonical) and
/// QIDs are unique, and clusters cover 0..cluster_count()-1 without gaps.
class SeedList {
 public:
  SeedList() = default;
  /// Validates; throws kDuplicateSeedEntry, kInvalidQid, kInvalidClustering.
  explicit SeedList(std::vector<SeedEntry> entries);

  const std::vector<SeedEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  int cluster_count() const noexcept { return cluster_count_; }

  bool contains(const TermId& id) const;
  const SeedEntry* find(const TermId& id) const;
  std::vector<TermId> ids() const;

  /// Seed node for insertion into a graph (origin SEED plus `extra`).
  Term term(const SeedEntry& entry) const;

  bool operator==(const SeedList& other) const;

 private:
  std::vector<SeedEntry> entries_;
  int cluster_count_ = 0;
};

/// CSV with header `label,qid,cluster`.
SeedList parse_seed(std::string_view text);
SeedList load_seed(const std::filesystem::path& path);

/// Seed terms whose cluster is below `clusters`. Throws kInvalidArgument
/// unless 1 <= clusters <= seed.cluster_count().
std::set<TermId> generic_head(const SeedList& seed, int clusters = 1);

}  // namespace taxoforge
