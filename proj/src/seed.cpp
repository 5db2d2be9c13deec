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

#include "taxoforge/seed.hpp"

#include <algorithm>
#include <charconv>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"

namespace taxoforge {

SeedList::SeedList(std::vector<SeedEntry> entries) : entries_(std::move(entries)) {
  std::set<TermId> ids;
  std::set<std::string> qids;
  std::set<int> clusters;
  for (const SeedEntry& e : entries_) {
    if (!is_valid_qid(e.qid)) throw Error(ErrorCode::kInvalidQid, "'" + e.qid + "' for seed term '" + e.label + "'");
    if (!ids.insert(e.id).second) throw Error(ErrorCode::kDuplicateSeedEntry, "label '" + e.label + "'");
    if (!qids.insert(e.qid).second) throw Error(ErrorCode::kDuplicateSeedEntry, "QID " + e.qid);
    if (e.cluster < 0) throw Error(ErrorCode::kInvalidClustering, "negative cluster for '" + e.label + "'");
    clusters.insert(e.cluster);
  }
  if (!clusters.empty() && (*clusters.begin() != 0 || *clusters.rbegin() + 1 != static_cast<int>(clusters.size())))
    throw Error(ErrorCode::kInvalidClustering, "clusters must be contiguous from 0");
  cluster_count_ = static_cast<int>(clusters.size());
}

bool SeedList::contains(const TermId& id) const { return find(id) != nullptr; }

const SeedEntry* SeedList::find(const TermId& id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const SeedEntry& e) { return e.id == id; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<TermId> SeedList::ids() const {
  std::vector<TermId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.id);
  return out;
}

Term SeedList::term(const SeedEntry& entry) const {
  Term t = make_term(entry.label, Origin::kSeed);
  t.qid = entry.qid;
  t.genericity_cluster = entry.cluster;
  return t;
}

bool SeedList::operator==(const SeedList& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto &a = entries_[i], &b = other.entries_[i];
    if (a.label != b.label || a.id != b.id || a.qid != b.qid || a.cluster != b.cluster) return false;
  }
  return true;
}

SeedList parse_seed(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"label", "qid", "cluster"})
    throw Error(ErrorCode::kParseError, "seed CSV must start with header label,qid,cluster");
  std::vector<SeedEntry> entries;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    const std::string where = "seed CSV line " + std::to_string(rows[i].line);
    if (f.size() != 3) throw Error(ErrorCode::kParseError, where + ": expected 3 fields");
    if (!is_valid_qid(f[1])) throw Error(ErrorCode::kInvalidQid, where + ": '" + f[1] + "'");
    int cluster = -1;
    auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), cluster);
    if (ec != std::errc{} || ptr != f[2].data() + f[2].size() || cluster < 0)
      throw Error(ErrorCode::kInvalidClustering, where + ": cluster must be a non-negative integer");
    Term t = make_term(f[0], Origin::kSeed);
    entries.push_back(SeedEntry{t.label, t.id, f[1], cluster});
  }
  return SeedList(std::move(entries));
}

SeedList load_seed(const std::filesystem::path& path) { return parse_seed(read_file(path)); }

std::set<TermId> generic_head(const SeedList& seed, int clusters) {
  if (clusters < 1 || clusters > seed.cluster_count())
    throw Error(ErrorCode::kInvalidArgument, "clusters must be in [1, " + std::to_string(seed.cluster_count()) + "]");
  std::set<TermId> out;
  for (const auto& e : seed.entries())
    if (e.cluster < clusters) out.insert(e.id);
  return out;
}

}  // namespace taxoforge
