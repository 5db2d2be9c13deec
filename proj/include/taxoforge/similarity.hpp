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
#include <memory>
#include <mutex>
#include <semaphore>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace taxoforge {

using EmbeddingVector = std::vector<double>;

/// dot(u,v)/(|u||v|). Throws kDimensionError on length mismatch and
/// kDegenerateVector when either vector is all zero.
double cosine(std::span<const double> u, std::span<const double> v);

/// Maps display labels to unit-length vectors. Implementations must be safe
/// for concurrent embed() calls and deterministic for a fixed snapshot.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const std::string& id() const noexcept = 0;
  /// Throws Error(kProviderError) on failure.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> labels) = 0;
};

/// Precomputed table, CSV rows `label,v0,...,vN`. Vectors are normalized at
/// load. Lookup tries the exact label, then its canonical form.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  FileEmbeddingProvider(std::string provider_id, std::string_view csv_text);
  static std::unique_ptr<FileEmbeddingProvider> load(std::string provider_id, const std::filesystem::path& path);

  const std::string& id() const noexcept override { return id_; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> labels) override;
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::string id_;
  std::size_t dimension_ = 0;
  std::map<std::string, EmbeddingVector, std::less<>> table_;
  std::map<std::string, const EmbeddingVector*, std::less<>> by_key_;
};

/// Remote endpoint speaking the common embeddings wire format:
/// POST {"model": id, "input": [labels]} -> {"data": [{"embedding": [...]}, ...]}.
/// Results are memoized per label; at most `max_in_flight` requests run at once.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string provider_id, std::string url, std::string token, std::ptrdiff_t max_in_flight = 4);

  const std::string& id() const noexcept override { return id_; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> labels) override;

 private:
  std::string id_;
  std::string url_;
  std::string token_;
  std::counting_semaphore<64> slots_;
  std::mutex mutex_;
  std::map<std::string, EmbeddingVector> memo_;
};

/// Maximum cosine over the cross product of both alias sets. Throws
/// kInvalidArgument when either set is empty.
double alias_similarity(const std::set<std::string>& a, const std::set<std::string>& b, EmbeddingProvider& provider);

}  // namespace taxoforge
