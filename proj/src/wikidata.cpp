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

#include "taxoforge/wikidata.hpp"

#include <algorithm>
#include <json.hpp>
#include <thread>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/http.hpp"
#include "taxoforge/parallel.hpp"

namespace taxoforge {
namespace {

using nlohmann::json;

void dedup_in_order(std::vector<std::string>& values) {
  std::set<std::string> seen;
  std::erase_if(values, [&](const std::string& v) { return !seen.insert(v).second; });
}

std::vector<std::string> claim_targets(const json& claims, const char* property) {
  std::vector<std::string> out;
  auto it = claims.find(property);
  if (it == claims.end()) return out;
  for (const auto& claim : *it) {
    const json* value = &claim;
    for (const char* key : {"mainsnak", "datavalue", "value"}) {
      auto next = value->find(key);
      if (next == value->end()) {
        value = nullptr;
        break;
      }
      value = &*next;
    }
    if (!value || !value->is_object()) continue;
    if (auto id = value->find("id"); id != value->end() && id->is_string() && is_valid_qid(id->get<std::string>()))
      out.push_back(id->get<std::string>());
  }
  return out;
}

}  // namespace

std::string entity_to_json(const WdEntity& e) {
  json doc = {{"qid", e.qid},
              {"label", e.label},
              {"aliases", e.aliases},
              {"subclassOf", e.subclass_of},
              {"instanceOf", e.instance_of}};
  return doc.dump(2) + "\n";
}

WdEntity entity_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    WdEntity e;
    e.qid = doc.at("qid").get<std::string>();
    e.label = doc.at("label").get<std::string>();
    e.aliases = doc.at("aliases").get<std::vector<std::string>>();
    e.subclass_of = doc.at("subclassOf").get<std::vector<std::string>>();
    e.instance_of = doc.at("instanceOf").get<std::vector<std::string>>();
    if (!is_valid_qid(e.qid)) throw Error(ErrorCode::kInvalidQid, e.qid);
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParseError, std::string("cached entity: ") + ex.what());
  }
}

std::optional<WdEntity> parse_entity_data(std::string_view body, const std::string& qid, const std::string& language) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kFetchError, "entity " + qid + ": " + ex.what());
  }
  auto entities = doc.find("entities");
  if (entities == doc.end() || !entities->is_object() || entities->empty()) return std::nullopt;
  // Redirected ids come back under the target id; take the requested one if
  // present, otherwise the single returned entity.
  const json& raw = entities->contains(qid) ? (*entities)[qid] : entities->begin().value();
  if (raw.contains("missing")) return std::nullopt;

  WdEntity e;
  e.qid = qid;
  if (auto labels = raw.find("labels"); labels != raw.end())
    if (auto l = labels->find(language); l != labels->end()) e.label = l->value("value", "");
  if (auto aliases = raw.find("aliases"); aliases != raw.end())
    if (auto a = aliases->find(language); a != aliases->end())
      for (const auto& item : *a) e.aliases.push_back(item.value("value", ""));
  std::erase_if(e.aliases, [](const std::string& s) { return s.empty(); });
  if (auto claims = raw.find("claims"); claims != raw.end()) {
    e.subclass_of = claim_targets(*claims, "P279");
    e.instance_of = claim_targets(*claims, "P31");
  }
  dedup_in_order(e.aliases);
  dedup_in_order(e.subclass_of);
  dedup_in_order(e.instance_of);
  return e;
}

WikidataClient::WikidataClient(WikidataOptions options) : options_(std::move(options)) {}

std::size_t WikidataClient::network_requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::set<std::string> WikidataClient::missing() const {
  std::lock_guard lock(mutex_);
  return missing_;
}

std::optional<WdEntity> WikidataClient::load(const std::string& qid) {
  const auto entity_path = options_.cache_dir / (qid + ".json");
  const auto missing_path = options_.cache_dir / (qid + ".missing");
  if (std::filesystem::exists(entity_path)) return entity_from_json(read_file(entity_path));
  if (std::filesystem::exists(missing_path)) return std::nullopt;

  switch (options_.mode) {
    case FetchMode::kOffline:
      throw Error(ErrorCode::kFetchError, qid + " is not cached and network access is disabled");
    case FetchMode::kProbe: {
      std::lock_guard lock(mutex_);
      missing_.insert(qid);
      return std::nullopt;
    }
    case FetchMode::kOnline:
      break;
  }
  auto entity = download(qid);
  if (entity) {
    write_file_atomic(entity_path, entity_to_json(*entity));
  } else {
    write_file_atomic(missing_path, "");
  }
  return entity;
}

std::optional<WdEntity> WikidataClient::download(const std::string& qid) {
  const std::string url = join_url(options_.base_url, qid + ".json");
  std::string last_error;
  auto delay = options_.backoff;
  for (int attempt = 0; attempt < std::max(1, options_.attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    {
      std::unique_lock lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      auto ready = last_request_ + options_.min_interval;
      last_request_ = std::max(now, ready);
      ++requests_;
      lock.unlock();
      if (ready > now) std::this_thread::sleep_until(ready);
    }
    HttpResponse r = http_get(url, {{"User-Agent", options_.user_agent}, {"Accept", "application/json"}});
    if (r.status == 200) {
      auto parsed = parse_entity_data(r.body, qid, options_.language);
      if (parsed && parsed->label.empty()) parsed->label = qid;
      return parsed;
    }
    if (r.status == 404) return std::nullopt;
    last_error = r.status == 0 ? r.error : "HTTP " + std::to_string(r.status);
    if (r.status != 0 && r.status != 429 && r.status < 500) break;
  }
  throw Error(ErrorCode::kFetchError, qid + ": " + last_error);
}

WdEntity WikidataClient::fetch_entity(const std::string& qid) {
  if (!is_valid_qid(qid)) throw Error(ErrorCode::kInvalidQid, "'" + qid + "'");
  {
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(qid); it != memory_.end()) {
      if (!it->second) throw Error(ErrorCode::kEntityNotFound, qid);
      return *it->second;
    }
  }
  auto entity = load(qid);
  {
    std::lock_guard lock(mutex_);
    if (options_.mode != FetchMode::kProbe || !missing_.contains(qid)) memory_.try_emplace(qid, entity);
  }
  if (!entity) throw Error(ErrorCode::kEntityNotFound, qid);
  return *entity;
}

std::optional<WdEntity> WikidataClient::try_fetch(const std::string& qid) {
  try {
    return fetch_entity(qid);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEntityNotFound) return std::nullopt;
    throw;
  }
}

void WikidataClient::prefetch(std::span<const std::string> qids) {
  parallel_for(qids.size(), options_.max_in_flight, [&](std::size_t i) { try_fetch(qids[i]); });
}

std::map<std::string, std::size_t> type_frequencies(std::span<const WdEntity> entities) {
  std::map<std::string, std::size_t> counts;
  for (const WdEntity& e : entities) {
    std::set<std::string> types(e.instance_of.begin(), e.instance_of.end());
    for (const auto& t : types) ++counts[t];
  }
  return counts;
}

void validate(const WdConfig& cfg) {
  if (cfg.max_depth < 1 || cfg.max_depth > kMaxTraversalDepth)
    throw Error(ErrorCode::kInvalidArgument, "maxDepth must be in [1, " + std::to_string(kMaxTraversalDepth) + "]");
  if (cfg.type_threshold < 0) throw Error(ErrorCode::kInvalidArgument, "typeThreshold must be non-negative");
}

TaxonomyGraph build_wikidata_taxonomy(const SeedList& seed, const WdConfig& cfg, WikidataClient& client) {
  validate(cfg);
  TaxonomyGraph g;
  std::map<std::string, TermId> node_of;
  std::vector<std::string> seed_qids;
  for (const SeedEntry& e : seed.entries()) {
    g.upsert_term(seed.term(e));
    node_of.emplace(e.qid, e.id);
    seed_qids.push_back(e.qid);
  }

  std::size_t fetched = 0;
  auto fetch = [&](const std::string& qid) {
    try {
      auto entity = client.try_fetch(qid);
      ++fetched;
      return entity;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFetchError) throw;
      throw Error(ErrorCode::kFetchError, e.detail() + " (after " + std::to_string(fetched) +
                                              " entities; fetched entities are cached, rerun to resume)");
    }
  };

  client.prefetch(seed_qids);
  std::vector<WdEntity> seed_entities;
  std::set<std::string> frontier;
  for (const SeedEntry& e : seed.entries()) {
    auto entity = fetch(e.qid);
    if (!entity) continue;
    Term marker = make_term(e.label, Origin::kWikidata);
    for (const auto& alias : entity->aliases) marker.aliases.insert(alias);
    if (!entity->label.empty() && entity->label != e.label) marker.aliases.insert(entity->label);
    g.upsert_term(std::move(marker));
    seed_entities.push_back(std::move(*entity));
    frontier.insert(e.qid);
  }
  const auto frequencies = type_frequencies(seed_entities);
  auto admitted = [&](const WdEntity& entity) {
    if (cfg.take_all || cfg.type_threshold == 0) return true;
    return std::any_of(entity.instance_of.begin(), entity.instance_of.end(), [&](const std::string& t) {
      auto it = frequencies.find(t);
      return it != frequencies.end() && it->second >= static_cast<std::size_t>(cfg.type_threshold);
    });
  };

  std::set<std::string> rejected;
  const int depth_limit = cfg.take_all ? kMaxTraversalDepth : cfg.max_depth;
  for (int depth = 0; depth < depth_limit && !frontier.empty(); ++depth) {
    std::vector<WdEntity> level;
    std::vector<std::string> parents;
    for (const std::string& qid : frontier) {
      auto entity = fetch(qid);
      if (!entity) continue;
      parents.insert(parents.end(), entity->subclass_of.begin(), entity->subclass_of.end());
      level.push_back(std::move(*entity));
    }
    std::sort(parents.begin(), parents.end());
    parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
    client.prefetch(parents);

    std::set<std::string> next;
    for (const WdEntity& entity : level) {
      const TermId child = node_of.at(entity.qid);
      for (const std::string& parent_qid : entity.subclass_of) {
        if (auto known = node_of.find(parent_qid); known != node_of.end()) {
          g.add_edge(child, known->second, Source::kWikidata);
          continue;
        }
        if (rejected.contains(parent_qid)) continue;
        auto parent = fetch(parent_qid);
        if (!parent || !admitted(*parent)) {
          rejected.insert(parent_qid);
          continue;
        }
        Term t = make_term(parent->label.empty() ? parent_qid : parent->label, Origin::kWikidata);
        t.qid = parent_qid;
        t.aliases.insert(parent->aliases.begin(), parent->aliases.end());
        t.aliases.erase(t.label);
        if (const Term* existing = g.find(t.id); existing && existing->qid && existing->qid != t.qid) t.qid.reset();
        TermId id = g.upsert_term(std::move(t)).id;
        node_of.emplace(parent_qid, id);
        g.add_edge(child, id, Source::kWikidata);
        next.insert(parent_qid);
      }
    }
    frontier = std::move(next);
  }
  return g;
}

}  // namespace taxoforge
