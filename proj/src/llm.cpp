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

#include "taxoforge/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <json.hpp>
#include <thread>

#include "taxoforge/csv.hpp"
#include "taxoforge/digest.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/http.hpp"
#include "taxoforge/parallel.hpp"

namespace taxoforge {
namespace {

using nlohmann::json;

constexpr std::string_view kPromptHead =
    "You are a helpful assistant tasked to pair terms to the hypernym to which they should belong. "
    "If it does not belong to any, answer None.\n";
constexpr std::string_view kAskNoTerms = "Given a term, provide the hypernym for the term.\n";
constexpr std::string_view kAskWithTerms =
    "Given a term, provide the hypernym for the term. The hypernym should be a term from the taxonomy.\n";
constexpr std::string_view kFormat =
    "Multiple answers are allowed, and should be separated by a comma. "
    "Keep the answer concise, in CSV format, without any extra.\n"
    "For example:\n"
    "parent1\n"
    "parent1,parent2,parent3\n"
    "None\n";
constexpr std::string_view kListIntro = "This is the list of possible terms:\n";

constexpr std::string_view kJudgePrompt =
    "You are an expert in domain relationships and knowledge categorization. Your task is to analyze pairs of "
    "terms and determine their relationship based on the following criteria:\n"
    "- 1 (Subdomain Relationship): One term is a specific subdomain or subset of the other.\n"
    "- 0 (No Relationship): The terms have no significant relationship.\n"
    "For each pair of terms provided, identify and categorize their relationship. Only provide the "
    "classification (0, or 1) without any explanation.\n"
    "Are the terms in the pair related as subdomain or unrelated?\n";

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return std::tolower(x) == std::tolower(y); });
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(PromptMode mode) noexcept { return mode == PromptMode::kWithTerms ? "WT" : "NT"; }

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "WT") return PromptMode::kWithTerms;
  if (text == "NT") return PromptMode::kNoTerms;
  throw Error(ErrorCode::kInvalidArgument, "prompt mode must be WT or NT, got '" + std::string(text) + "'");
}

std::string render_prompt(PromptMode mode, std::string_view term, std::optional<std::span<const std::string>> term_list) {
  std::string out(kPromptHead);
  if (mode == PromptMode::kNoTerms) {
    out += kAskNoTerms;
    out += kFormat;
  } else {
    if (!term_list || term_list->empty()) throw Error(ErrorCode::kMissingTermList, "WT prompt needs a term list");
    out += kAskWithTerms;
    out += kFormat;
    out += kListIntro;
    for (const std::string& t : *term_list) {
      out += t;
      out += '\n';
    }
  }
  out += "What is the hypernym of ";
  out += term;
  out += '?';
  return out;
}

std::string render_judge_prompt(std::string_view child, std::string_view parent) {
  std::string out(kJudgePrompt);
  out += child;
  out += ", ";
  out += parent;
  return out;
}

std::vector<std::string> parse_hypernyms(std::string_view response) {
  std::string_view text = trim(response);
  if (text.empty()) throw Error(ErrorCode::kMalformedResponse, "empty answer");
  if (text.find_first_of("\r\n") != std::string_view::npos)
    throw Error(ErrorCode::kMalformedResponse, "multi-line answer");
  if (iequals(text, "none")) return {};
  std::vector<CsvRecord> rows;
  try {
    rows = parse_csv(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kMalformedResponse, "unbalanced quotes");
  }
  std::vector<std::string> out;
  for (const std::string& field : rows.empty() ? std::vector<std::string>{} : rows.front().fields) {
    std::string_view f = trim(field);
    if (f.empty() || iequals(f, "none")) continue;
    std::string key = canonicalize_label(f).key();
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(std::move(key));
  }
  return out;
}

int parse_judgement(std::string_view response) {
  std::string_view text = trim(response);
  if (!text.empty() && (text[0] == '0' || text[0] == '1') && (text.size() == 1 || !std::isdigit(text[1])))
    return text[0] - '0';
  throw Error(ErrorCode::kMalformedResponse, "expected 0 or 1, got '" + std::string(text.substr(0, 40)) + "'");
}

std::string request_hash(const ChatRequest& request) { return sha256_hex(request.model + "\n" + request.prompt); }

std::string exchange_to_json(const LlmExchange& e) {
  json doc = {{"requestHash", e.request_hash},
              {"model", e.model},
              {"prompt", e.prompt},
              {"responseText", e.response_text},
              {"timestamp", e.timestamp}};
  return doc.dump(2) + "\n";
}

LlmExchange exchange_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    return LlmExchange{doc.at("requestHash").get<std::string>(), doc.at("model").get<std::string>(),
                       doc.at("prompt").get<std::string>(), doc.at("responseText").get<std::string>(),
                       doc.value("timestamp", "")};
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParseError, std::string("recording: ") + ex.what());
  }
}

HttpChatOptions chat_options_from_env() {
  HttpChatOptions options;
  if (const char* url = std::getenv("TAXOFORGE_LLM_BASE_URL"); url && *url) options.base_url = url;
  if (const char* key = std::getenv("TAXOFORGE_LLM_API_KEY"); key && *key) {
    options.api_key = key;
  } else if (const char* fallback = std::getenv("OPENAI_API_KEY"); fallback && *fallback) {
    options.api_key = fallback;
  }
  return options;
}

HttpChatClient::HttpChatClient(HttpChatOptions options)
    : options_(std::move(options)), slots_(std::clamp<std::ptrdiff_t>(options_.max_in_flight, 1, 64)) {}

std::string HttpChatClient::complete(const ChatRequest& request) {
  json body = {{"model", request.model},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  HttpHeaders headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  const std::string url = join_url(options_.base_url, "chat/completions");

  std::string last_error;
  auto delay = options_.backoff;
  for (int attempt = 0; attempt < std::max(1, options_.attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    slots_.acquire();
    HttpResponse r = http_post_json(url, body.dump(), headers);
    slots_.release();
    if (r.status == 200) {
      try {
        return json::parse(r.body).at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& ex) {
        last_error = std::string("malformed completion: ") + ex.what();
        continue;
      }
    }
    last_error = r.status == 0 ? r.error : "HTTP " + std::to_string(r.status);
    if (r.status != 0 && r.status != 429 && r.status < 500) break;
  }
  throw Error(ErrorCode::kClientError, last_error);
}

RecordingChatClient::RecordingChatClient(ChatClient& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {}

std::string RecordingChatClient::complete(const ChatRequest& request) {
  const std::string hash = request_hash(request);
  const auto path = dir_ / (hash + ".json");
  if (std::filesystem::exists(path)) return exchange_from_json(read_file(path)).response_text;
  std::string text = inner_.complete(request);
  write_file_atomic(path, exchange_to_json(LlmExchange{hash, request.model, request.prompt, text, utc_timestamp()}));
  std::lock_guard lock(mutex_);
  ++recorded_;
  return text;
}

std::size_t RecordingChatClient::recorded() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

ReplayChatClient::ReplayChatClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ReplayChatClient::complete(const ChatRequest& request) {
  const std::string hash = request_hash(request);
  const auto path = dir_ / (hash + ".json");
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::kMissingRecording, "no recording " + hash + " in " + dir_.string());
  return exchange_from_json(read_file(path)).response_text;
}

std::vector<HypernymAnswer> ask_hypernyms(std::span<const std::string> terms,
                                          std::optional<std::span<const std::string>> term_list,
                                          const LlmConfig& cfg, ChatClient& client) {
  std::vector<HypernymAnswer> answers(terms.size());
  parallel_for(terms.size(), cfg.max_in_flight, [&](std::size_t i) {
    HypernymAnswer& a = answers[i];
    a.term = terms[i];
    ChatRequest request{cfg.model_id, render_prompt(cfg.prompt_mode, terms[i], term_list), cfg.temperature, cfg.seed};
    try {
      a.parents = parse_hypernyms(client.complete(request));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kClientError && e.code() != ErrorCode::kMalformedResponse) throw;
      a.skipped = e.what();
    }
  });
  return answers;
}

LlmBuildResult build_llm_taxonomy(const SeedList& seed, const LlmConfig& cfg, ChatClient& client) {
  if (cfg.depth_bound < 1) throw Error(ErrorCode::kInvalidArgument, "depth bound must be positive");
  LlmBuildResult result;
  TaxonomyGraph& g = result.graph;
  std::vector<std::string> term_list;
  std::set<TermId> listed;
  std::set<TermId> queried;
  std::vector<std::string> round;
  for (const SeedEntry& e : seed.entries()) {
    g.upsert_term(seed.term(e));
    term_list.push_back(e.label);
    listed.insert(e.id);
    round.push_back(e.label);
    queried.insert(e.id);
  }

  for (int depth = 0; !round.empty(); ++depth) {
    std::optional<std::span<const std::string>> list;
    if (cfg.prompt_mode == PromptMode::kWithTerms) list = std::span<const std::string>(term_list);
    auto answers = ask_hypernyms(round, list, cfg, client);
    std::vector<std::string> next;
    for (const HypernymAnswer& answer : answers) {
      if (answer.skipped) {
        result.skipped.emplace_back(answer.term, *answer.skipped);
        continue;
      }
      const TermId child = canonicalize_label(answer.term);
      for (const std::string& parent_label : answer.parents) {
        TermId parent = canonicalize_label(parent_label);
        if (!g.contains(parent)) g.upsert_term(make_term(parent_label, Origin::kLlm));
        g.add_edge(child, parent, Source::kLlm);
        if (cfg.prompt_mode == PromptMode::kWithTerms && !listed.contains(parent))
          result.out_of_list.emplace_back(child, parent);
        if (cfg.iterative && depth + 1 < cfg.depth_bound && queried.insert(parent).second)
          next.push_back(g.term(parent).label);
      }
    }
    if (!cfg.iterative) break;
    for (const std::string& label : next)
      if (listed.insert(canonicalize_label(label)).second) term_list.push_back(label);
    round = std::move(next);
  }
  return result;
}

}  // namespace taxoforge
