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

#include "taxoforge/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/graph.hpp"
#include "taxoforge/http.hpp"

namespace taxoforge {
namespace {

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

EmbeddingVector normalized(EmbeddingVector v, std::string_view label) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::kProviderError, "non-finite embedding for '" + std::string(label) + "'");
  double n = norm(v);
  if (n == 0) throw Error(ErrorCode::kDegenerateVector, "zero embedding for '" + std::string(label) + "'");
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorCode::kDimensionError, std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  double nu = norm(u), nv = norm(v);
  if (nu == 0 || nv == 0) throw Error(ErrorCode::kDegenerateVector, "cosine of a zero vector");
  double dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

FileEmbeddingProvider::FileEmbeddingProvider(std::string provider_id, std::string_view csv_text)
    : id_(std::move(provider_id)) {
  for (const CsvRecord& row : parse_csv(csv_text)) {
    const auto& f = row.fields;
    if (f.size() < 2) throw Error(ErrorCode::kParseError, "embedding CSV line " + std::to_string(row.line) + ": no vector");
    EmbeddingVector v;
    v.reserve(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(f[i], &used));
        if (used != f[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        if (row.line == 1) break;  // header row
        throw Error(ErrorCode::kParseError, "embedding CSV line " + std::to_string(row.line) + ": bad number");
      }
    }
    if (v.size() != f.size() - 1) continue;
    if (dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_)
      throw Error(ErrorCode::kDimensionError, "embedding CSV line " + std::to_string(row.line));
    table_[f[0]] = normalized(std::move(v), f[0]);
  }
  for (const auto& [label, vec] : table_) by_key_.emplace(canonicalize_label(label).key(), &vec);
}

std::unique_ptr<FileEmbeddingProvider> FileEmbeddingProvider::load(std::string provider_id,
                                                                   const std::filesystem::path& path) {
  return std::make_unique<FileEmbeddingProvider>(std::move(provider_id), read_file(path));
}

std::vector<EmbeddingVector> FileEmbeddingProvider::embed(std::span<const std::string> labels) {
  std::vector<EmbeddingVector> out;
  out.reserve(labels.size());
  for (const std::string& label : labels) {
    if (auto it = table_.find(label); it != table_.end()) {
      out.push_back(it->second);
      continue;
    }
    auto it = by_key_.find(canonicalize_label(label).key());
    if (it == by_key_.end())
      throw Error(ErrorCode::kProviderError, "provider '" + id_ + "' has no vector for '" + label + "'");
    out.push_back(*it->second);
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string provider_id, std::string url, std::string token,
                                             std::ptrdiff_t max_in_flight)
    : id_(std::move(provider_id)), url_(std::move(url)), token_(std::move(token)),
      slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 64)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(std::span<const std::string> labels) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto& label : labels)
      if (!memo_.contains(label) && std::find(missing.begin(), missing.end(), label) == missing.end())
        missing.push_back(label);
  }
  if (!missing.empty()) {
    nlohmann::json request = {{"model", id_}, {"input", missing}};
    HttpHeaders headers;
    if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);
    slots_.acquire();
    HttpResponse response = http_post_json(url_, request.dump(), headers);
    slots_.release();
    if (response.status != 200)
      throw Error(ErrorCode::kProviderError, "embedding endpoint returned " + std::to_string(response.status) + " " +
                                                 response.error);
    std::vector<EmbeddingVector> vectors;
    try {
      auto body = nlohmann::json::parse(response.body);
      for (const auto& item : body.at("data")) vectors.push_back(item.at("embedding").get<EmbeddingVector>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderError, std::string("malformed embedding response: ") + e.what());
    }
    if (vectors.size() != missing.size())
      throw Error(ErrorCode::kProviderError, "embedding endpoint returned the wrong number of vectors");
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (!memo_.empty() && memo_.begin()->second.size() != vectors[i].size())
        throw Error(ErrorCode::kDimensionError, "embedding dimension changed for '" + missing[i] + "'");
      memo_[missing[i]] = normalized(std::move(vectors[i]), missing[i]);
    }
  }
  std::lock_guard lock(mutex_);
  std::vector<EmbeddingVector> out;
  out.reserve(labels.size());
  for (const auto& label : labels) out.push_back(memo_.at(label));
  return out;
}

double alias_similarity(const std::set<std::string>& a, const std::set<std::string>& b, EmbeddingProvider& provider) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "alias sets must be non-empty");
  std::vector<std::string> la(a.begin(), a.end()), lb(b.begin(), b.end());
  auto ea = provider.embed(la);
  auto eb = provider.embed(lb);
  double best = -1.0;
  for (const auto& u : ea)
    for (const auto& v : eb) best = std::max(best, cosine(u, v));
  return best;
}

}  // namespace taxoforge
