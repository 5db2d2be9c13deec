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
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>

#include "oracles.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/graph.hpp"
#include "taxoforge/seed.hpp"

namespace taxoforge {
inline void PrintTo(ErrorCode code, std::ostream* os) { *os << error_code_name(code); }
}  // namespace taxoforge

namespace testing_support {

inline std::filesystem::path data_dir() { return TF_TEST_DATA; }

inline std::string vertex(int v) { return "v" + std::to_string(v); }

/// Seed vertices become SEED terms; the rest LLM terms with LLM edges.
inline taxoforge::TaxonomyGraph to_graph(const oracle::Digraph& d, const std::set<int>& seed = {}) {
  using namespace taxoforge;
  TaxonomyGraph g;
  for (int v = 0; v < d.n; ++v) g.upsert_term(make_term(vertex(v), seed.contains(v) ? Origin::kSeed : Origin::kLlm));
  for (auto [c, p] : d.edges) g.add_edge(canonicalize_label(vertex(c)), canonicalize_label(vertex(p)), Source::kLlm);
  return g;
}

inline oracle::Digraph from_graph(const taxoforge::TaxonomyGraph& g) {
  oracle::Digraph d;
  std::map<taxoforge::TermId, int> index;
  for (const auto& [id, term] : g.terms()) index.emplace(id, d.n++);
  for (const auto& [c, p] : g.edge_pairs()) d.edges.insert({index.at(c), index.at(p)});
  return d;
}

/// Seed over the given vertices plus `absent` labels missing from any graph.
inline taxoforge::SeedList make_seed(const std::set<int>& vertices, int absent = 0) {
  using namespace taxoforge;
  std::vector<SeedEntry> entries;
  int q = 1;
  for (int v : vertices) entries.push_back({vertex(v), canonicalize_label(vertex(v)), "Q" + std::to_string(q++), 0});
  for (int a = 0; a < absent; ++a) {
    std::string label = "absent " + std::to_string(a);
    entries.push_back({label, canonicalize_label(label), "Q" + std::to_string(q++), 0});
  }
  return SeedList(std::move(entries));
}

/// Code of the taxoforge::Error thrown by `fn`, or nullopt when none is thrown.
template <class F>
std::optional<taxoforge::ErrorCode> code_of(F&& fn) {
  try {
    fn();
  } catch (const taxoforge::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline taxoforge::TermId id(std::string_view label) { return taxoforge::canonicalize_label(label); }

}  // namespace testing_support
