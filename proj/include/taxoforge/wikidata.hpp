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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/graph.hpp"
#include "taxoforge/seed.hpp"

namespace taxoforge {

struct WdEntity {
  std::string qid;
  std::string label;
  std::vector<std::string> aliases;
  std::vector<std::string> subclass_of;  // P279
  std::vector<std::string> instance_of;  // P31

  bool operator==(const WdEntity&) const = default;
};

/// Cache document: exactly the WdEntity fields, keys sorted, 2-space indent.
std::string entity_to_json(const WdEntity& entity);
WdEntity entity_from_json(std::string_view text);

/// Normalizes one Special:EntityData document (labels/aliases in
/// `language`, P279/P31 item ids, lists deduplicated in claim order).
/// Returns nullopt when the document marks the entity as missing.
std::optional<WdEntity> parse_entity_data(std::string_view body, const std::string& qid,
                                          const std::string& language = "en");

enum class FetchMode {
  kOnline,   // cache first, then network
  kOffline,  // cache only; a miss is a FetchError
  kProbe,    // cache only; a miss is treated as not found and recorded
};

struct WikidataOptions {
  std::filesystem::path cache_dir = "cache/wikidata";
  FetchMode mode = FetchMode::kOnline;
  std::string base_url = "https://www.wikidata.org/wiki/Special:EntityData";
  std::string language = "en";
  std::string user_agent = "taxoforge/0.1";
  std::size_t max_in_flight = 8;
  std::chrono::milliseconds min_interval{50};  // between request starts
  int attempts = 3;
  std::chrono::milliseconds backoff{250};  // doubled per retry
};

/// Entity access with an on-disk cache under `cache_dir` (`Q*.json` for
/// entities, `Q*.missing` markers for entities the API does not have).
/// Thread-safe.
class WikidataClient {
 public:
  explicit WikidataClient(WikidataOptions options);

  /// Throws kInvalidQid, kEntityNotFound, or kFetchError.
  WdEntity fetch_entity(const std::string& qid);
  /// Like fetch_entity but maps kEntityNotFound to nullopt.
  std::optional<WdEntity> try_fetch(const std::string& qid);
  /// Warms the cache for `qids` with bounded parallelism.
  void prefetch(std::span<const std::string> qids);

  std::size_t network_requests() const;
  /// QIDs that were absent from the cache in probe mode.
  std::set<std::string> missing() const;
  const WikidataOptions& options() const noexcept { return options_; }

 private:
  std::optional<WdEntity> load(const std::string& qid);
  std::optional<WdEntity> download(const std::string& qid);

  WikidataOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::optional<WdEntity>> memory_;
  std::set<std::string> missing_;
  std::size_t requests_ = 0;
  std::chrono::steady_clock::time_point last_request_{};
};

/// P31 type -> number of entities carrying it.
std::map<std::string, std::size_t> type_frequencies(std::span<const WdEntity> entities);

inline constexpr int kMaxTraversalDepth = 10;

struct WdConfig {
  bool take_all = false;   // TA: no type filter and traversal to kMaxTraversalDepth
  int type_threshold = 0;  // TT: 0 disables the filter
  int max_depth = 3;       // MD, 1..kMaxTraversalDepth
};

void validate(const WdConfig& cfg);

/// Multi-source breadth-first traversal over P279 from every seed QID,
/// frontier in QID order. Discovered non-seed entities are admitted only
/// when one of their P31 types occurs at least `type_threshold` times among
/// the seed entities. Seed terms are always admitted; seeds without an
/// entity stay isolated.
TaxonomyGraph build_wikidata_taxonomy(const SeedList& seed, const WdConfig& cfg, WikidataClient& client);

}  // namespace taxoforge
