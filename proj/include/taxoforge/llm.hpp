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
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taxoforge/graph.hpp"
#include "taxoforge/seed.hpp"

namespace taxoforge {

enum class PromptMode {
  kNoTerms,    // NT: only the term of interest
  kWithTerms,  // WT: the current term list precedes the question
};

std::string_view to_string(PromptMode mode) noexcept;
PromptMode parse_prompt_mode(std::string_view text);

/// Hypernym question. WT needs a non-empty term list (kMissingTermList
/// otherwise); NT ignores it.
std::string render_prompt(PromptMode mode, std::string_view term,
                          std::optional<std::span<const std::string>> term_list = std::nullopt);

/// Pair-judging prompt; the pair is rendered as `child, parent`.
std::string render_judge_prompt(std::string_view child, std::string_view parent);

/// One-line CSV answer -> canonical labels, order preserved, duplicates and
/// `None` dropped. Throws kMalformedResponse for empty or multi-line text.
std::vector<std::string> parse_hypernyms(std::string_view response);

/// Leading 0/1 of a judge answer; kMalformedResponse otherwise.
int parse_judgement(std::string_view response);

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

/// SHA-256 (hex) of model id, a newline, and the prompt bytes.
std::string request_hash(const ChatRequest& request);

struct LlmExchange {
  std::string request_hash;
  std::string model;
  std::string prompt;
  std::string response_text;
  std::string timestamp;  // ISO-8601 UTC
};

std::string exchange_to_json(const LlmExchange& exchange);
LlmExchange exchange_from_json(std::string_view text);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant text. Throws kClientError when the endpoint
  /// cannot answer and kMissingRecording when a replay has no recording.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct HttpChatOptions {
  std::string base_url = "https://api.openai.com/v1";  // POST {base}/chat/completions
  std::string api_key;
  int attempts = 3;
  std::chrono::milliseconds backoff{1000};  // doubled per retry
  std::ptrdiff_t max_in_flight = 2;
};

/// Reads TAXOFORGE_LLM_BASE_URL and TAXOFORGE_LLM_API_KEY (falling back to
/// OPENAI_API_KEY) over the defaults.
HttpChatOptions chat_options_from_env();

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatOptions options_;
  std::counting_semaphore<64> slots_;
};

/// Serves recordings under `dir` and records every new exchange made through
/// `inner` as `<dir>/<hash>.json`.
class RecordingChatClient final : public ChatClient {
 public:
  RecordingChatClient(ChatClient& inner, std::filesystem::path dir);
  std::string complete(const ChatRequest& request) override;
  std::size_t recorded() const;

 private:
  ChatClient& inner_;
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::size_t recorded_ = 0;
};

/// Recording-only client; an unrecorded request throws kMissingRecording.
class ReplayChatClient final : public ChatClient {
 public:
  explicit ReplayChatClient(std::filesystem::path dir);
  std::string complete(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
};

struct LlmConfig {
  std::string model_id = "gpt-4-1106-preview";
  PromptMode prompt_mode = PromptMode::kWithTerms;
  bool iterative = false;
  int depth_bound = 3;  // iterative mode: terms at this depth are not queried
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  std::size_t max_in_flight = 2;
};

struct HypernymAnswer {
  std::string term;  // display label that was asked about
  std::vector<std::string> parents;
  std::optional<std::string> skipped;  // reason when the answer was unusable
};

/// Issues one prompt per term (bounded parallelism), answers returned in input
/// order. Malformed answers and kClientError failures are reported as skipped;
/// kMissingRecording propagates.
std::vector<HypernymAnswer> ask_hypernyms(std::span<const std::string> terms,
                                          std::optional<std::span<const std::string>> term_list,
                                          const LlmConfig& cfg, ChatClient& client);

struct LlmBuildResult {
  TaxonomyGraph graph;
  std::vector<EdgePair> out_of_list;  // WT answers naming terms outside the list
  std::vector<std::pair<std::string, std::string>> skipped;  // term, reason
};

/// Simple mode asks once per seed term; iterative mode asks again for every
/// newly returned parent until no new terms appear or `depth_bound` is hit.
/// In WT mode the list is the seed labels plus terms added in earlier rounds.
LlmBuildResult build_llm_taxonomy(const SeedList& seed, const LlmConfig& cfg, ChatClient& client);

}  // namespace taxoforge
