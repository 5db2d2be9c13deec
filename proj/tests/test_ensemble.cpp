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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/fixtures.hpp"
#include "support/scripted_chat.hpp"
#include "taxoforge/ensemble.hpp"
#include "taxoforge/metrics.hpp"

namespace tf = taxoforge;
using testing_support::code_of;
using testing_support::id;
using testing_support::ScriptedChat;

namespace {

tf::FileEmbeddingProvider& provider() {
  static auto p = tf::FileEmbeddingProvider::load("hash-trigram-64", testing_support::data_dir() / "embeddings.csv");
  return *p;
}

tf::TaxonomyGraph build(std::initializer_list<std::pair<const char*, const char*>> edges, tf::Source source,
                        std::set<std::string> seed = {}) {
  tf::TaxonomyGraph g;
  for (const auto& label : seed) g.upsert_term(tf::make_term(label, tf::Origin::kSeed));
  for (auto [c, p] : edges) g.add_edge(id(c), id(p), source, tf::TaxonomyGraph::Upsert::kYes);
  return g;
}

std::set<tf::EdgePair> pairs(const tf::TaxonomyGraph& g) {
  auto v = g.edge_pairs();
  return {v.begin(), v.end()};
}

std::set<tf::TermId> unlinked(const tf::TaxonomyGraph& g, const tf::SeedList& seed) {
  auto v = tf::unlinked_terms(g, seed);
  return {v.begin(), v.end()};
}

/// Random graphs over a shared vertex universe; seed vertices are SEED terms
/// in every graph that contains them.
struct RandomFamily {
  std::set<int> seed_vertices;
  tf::SeedList seed;
  std::vector<tf::TaxonomyGraph> graphs;

  RandomFamily(std::mt19937_64& rng, int count) {
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int v = 0; v < n; ++v)
      if (rng() % 2) seed_vertices.insert(v);
    seed = testing_support::make_seed(seed_vertices, static_cast<int>(rng() % 2));
    for (int k = 0; k < count; ++k) {
      tf::TaxonomyGraph g;
      for (int v : seed_vertices) g.upsert_term(tf::make_term(testing_support::vertex(v), tf::Origin::kSeed));
      const auto source = k % 2 ? tf::Source::kWikidata : tf::Source::kCso;
      for (int c = 0; c < n; ++c)
        for (int p = 0; p < n; ++p)
          if (c != p && rng() % 5 == 0)
            g.add_edge(id(testing_support::vertex(c)), id(testing_support::vertex(p)), source,
                       tf::TaxonomyGraph::Upsert::kYes);
      graphs.push_back(std::move(g));
    }
  }
};

}  // namespace

TEST(Union, DisjointGraphsAtThresholdOne) {
  auto a = build({{"neural network", "machine learning"}}, tf::Source::kCso);
  auto b = build({{"compiler", "software"}}, tf::Source::kWikidata);
  std::vector<tf::TaxonomyGraph> gs{a, b};
  auto r = tf::union_merge(gs, 1.0, &provider());
  EXPECT_TRUE(r.merges.empty());
  EXPECT_EQ(r.graph.node_count(), 4u);
  EXPECT_EQ(r.graph.edges().size(), 2u);
}

TEST(Union, IdenticalGraphsAreIdempotent) {
  auto a = build({{"neural network", "machine learning"}, {"machine learning", "computer science"}},
                 tf::Source::kCso, {"neural network"});
  std::vector<tf::TaxonomyGraph> gs{a, a, a};
  auto r = tf::union_merge(gs, tf::kDefaultDedupThreshold, &provider());
  EXPECT_EQ(r.graph, a);
  EXPECT_TRUE(r.merges.empty());
}

TEST(Union, SourceTagsAreKept) {
  auto a = build({{"neural network", "machine learning"}}, tf::Source::kCso);
  auto b = build({{"neural network", "machine learning"}}, tf::Source::kWikidata);
  std::vector<tf::TaxonomyGraph> gs{a, b};
  auto r = tf::union_merge(gs, 1.0, nullptr);
  EXPECT_EQ(r.graph.edges().size(), 2u);
  EXPECT_EQ(r.graph.pair_count(), 1u);
  EXPECT_EQ(code_of([&] { tf::union_merge(std::span(gs).first(1), 1.0, nullptr); }), tf::ErrorCode::kInvalidArgument);
}

TEST(Union, NearDuplicatesFoldOntoSeedLabel) {
  auto a = build({{"neural network", "machine learning"}}, tf::Source::kCso, {"neural network"});
  auto b = build({{"neural networks", "machine-learning"}, {"deep learning", "neural networks"}}, tf::Source::kLlm);
  std::vector<tf::TaxonomyGraph> gs{a, b};

  auto strict = tf::union_merge(gs, 0.90, &provider());
  ASSERT_EQ(strict.merges.size(), 1u);
  EXPECT_EQ(strict.merges[0].kept, id("neural network"));
  EXPECT_EQ(strict.merges[0].merged, id("neural networks"));
  EXPECT_NEAR(strict.merges[0].similarity, 0.9095, 1e-3);
  EXPECT_FALSE(strict.graph.contains(id("neural networks")));
  EXPECT_TRUE(strict.graph.term(id("neural network")).aliases.contains("neural networks"));
  EXPECT_EQ(pairs(strict.graph), (std::set<tf::EdgePair>{{id("neural network"), id("machine learning")},
                                                         {id("neural network"), id("machine-learning")},
                                                         {id("deep learning"), id("neural network")}}));

  auto loose = tf::union_merge(gs, 0.80, &provider());
  EXPECT_EQ(loose.merges.size(), 2u);
  EXPECT_FALSE(loose.graph.contains(id("machine-learning")));
  EXPECT_EQ(loose.graph.pair_count(), 2u);
}

TEST(Union, TwoSeedTermsNeverMerge) {
  auto a = build({{"compiler", "software"}}, tf::Source::kCso, {"compiler", "compilers"});
  auto b = build({{"compilers", "software"}}, tf::Source::kWikidata, {"compiler", "compilers"});
  std::vector<tf::TaxonomyGraph> gs{a, b};
  auto r = tf::union_merge(gs, 0.80, &provider());
  EXPECT_TRUE(r.graph.contains(id("compiler")));
  EXPECT_TRUE(r.graph.contains(id("compilers")));
}

TEST(Union, NoSurvivingPairAboveThreshold) {
  auto a = build({{"neural network", "machine learning"}, {"compiler", "software"}}, tf::Source::kCso,
                 {"neural network"});
  auto b = build({{"neural networks", "machine-learning"},
                  {"artificial neural networks", "neural networks"},
                  {"compilers", "programming languages"},
                  {"machine learning methods", "machine learning"}},
                 tf::Source::kLlm);
  std::vector<tf::TaxonomyGraph> gs{a, b};
  for (double threshold : {0.5, 0.7, 0.8, 0.9}) {
    auto r = tf::union_merge(gs, threshold, &provider());
    std::vector<tf::TermId> ids;
    for (const auto& [t, term] : r.graph.terms()) ids.push_back(t);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const auto& ti = r.graph.term(ids[i]);
        const auto& tj = r.graph.term(ids[j]);
        if (ti.origins.contains(tf::Origin::kSeed) && tj.origins.contains(tf::Origin::kSeed)) continue;
        std::set<std::string> ai{ti.label}, aj{tj.label};
        ai.insert(ti.aliases.begin(), ti.aliases.end());
        aj.insert(tj.aliases.begin(), tj.aliases.end());
        EXPECT_LT(tf::alias_similarity(ai, aj, provider()), threshold) << ids[i].key() << " / " << ids[j].key();
      }
    for (std::size_t k = 1; k < r.merges.size(); ++k)
      EXPECT_GE(r.merges[k - 1].similarity, r.merges[k].similarity);
  }
}

TEST(Cascade, UnlinkedTermTakesLaterPath) {
  auto seed = tf::parse_seed("label,qid,cluster\nml,Q1,0\ncompiler,Q2,0\nqc,Q3,0\n");
  auto g1 = build({{"ml", "cs"}}, tf::Source::kCso, {"ml", "compiler", "qc"});
  auto g2 = build({{"ml", "statistics"}, {"compiler", "translator"}, {"translator", "software"}, {"software", "cs"}},
                  tf::Source::kWikidata, {"ml", "compiler", "qc"});
  std::vector<tf::TaxonomyGraph> gs{g1, g2};
  auto out = tf::cascade_merge(gs, seed);
  EXPECT_EQ(pairs(out), (std::set<tf::EdgePair>{{id("ml"), id("cs")},
                                                {id("compiler"), id("translator")},
                                                {id("translator"), id("software")},
                                                {id("software"), id("cs")}}));
  EXPECT_FALSE(out.contains(id("statistics")));
  EXPECT_EQ(unlinked(out, seed), (std::set<tf::TermId>{id("qc")}));
  for (const auto& e : out.edges())
    EXPECT_EQ(e.source, e.child == id("ml") ? tf::Source::kCso : tf::Source::kWikidata);
}

TEST(Cascade, StopsAtPresentNodes) {
  auto seed = tf::parse_seed("label,qid,cluster\na,Q1,0\nb,Q2,0\n");
  auto g1 = build({{"a", "x"}}, tf::Source::kCso, {"a", "b"});
  auto g2 = build({{"b", "x"}, {"x", "y"}, {"y", "z"}}, tf::Source::kWikidata, {"a", "b"});
  std::vector<tf::TaxonomyGraph> gs{g1, g2};
  auto out = tf::cascade_merge(gs, seed);
  EXPECT_EQ(pairs(out), (std::set<tf::EdgePair>{{id("a"), id("x")}, {id("b"), id("x")}}));
}

TEST(Cascade, ChildOnlyLinkIsCopied) {
  auto seed = tf::parse_seed("label,qid,cluster\nroot,Q1,0\n");
  auto g1 = build({}, tf::Source::kCso, {"root"});
  auto g2 = build({{"leaf", "root"}}, tf::Source::kWikidata, {"root"});
  std::vector<tf::TaxonomyGraph> gs{g1, g2};
  auto out = tf::cascade_merge(gs, seed);
  EXPECT_EQ(pairs(out), (std::set<tf::EdgePair>{{id("leaf"), id("root")}}));
}

TEST(EnsembleProperties, UnlinkedShrinks) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    RandomFamily f(rng, 2 + trial % 2);
    auto casc = tf::cascade_merge(f.graphs, f.seed);
    auto uni = tf::union_merge(f.graphs, 1.0, nullptr).graph;
    std::set<tf::TermId> common = unlinked(f.graphs[0], f.seed);
    for (const auto& g : f.graphs) {
      auto u = unlinked(g, f.seed);
      auto ucasc = unlinked(casc, f.seed), uuni = unlinked(uni, f.seed);
      EXPECT_TRUE(std::includes(u.begin(), u.end(), uuni.begin(), uuni.end())) << trial;
      std::set<tf::TermId> keep;
      std::set_intersection(common.begin(), common.end(), u.begin(), u.end(), std::inserter(keep, keep.end()));
      common = std::move(keep);
    }
    auto ucasc = unlinked(casc, f.seed);
    EXPECT_TRUE(std::includes(common.begin(), common.end(), ucasc.begin(), ucasc.end())) << trial;
    EXPECT_LE(casc.node_count(), uni.node_count()) << trial;
    for (const auto& e : casc.edges()) EXPECT_TRUE(uni.edges().contains(e)) << trial;
  }
}

TEST(Completion, AddsParentsForUnlinkedSeeds) {
  auto seed = tf::parse_seed("label,qid,cluster\nmachine learning,Q1,0\ncompiler,Q2,0\ngenomics,Q3,0\nquantum computing,Q4,0\n");
  auto g = build({{"machine learning", "computer science"}}, tf::Source::kCso,
                 {"machine learning", "compiler", "genomics", "quantum computing"});
  ScriptedChat chat;
  chat.replies = {{"compiler", "Software, computer science"}, {"genomics", "None"}, {"quantum computing", "!error"}};
  tf::LlmConfig cfg;
  auto r = tf::llm_complete(g, seed, cfg, chat);
  EXPECT_EQ(chat.calls(), 3u);
  for (const auto& prompt : chat.prompts())
    EXPECT_NE(prompt.find("terms:\ncompiler\ncomputer science\ngenomics\nmachine learning\nquantum computing\n"),
              std::string::npos);
  EXPECT_EQ(pairs(r.graph), (std::set<tf::EdgePair>{{id("machine learning"), id("computer science")},
                                                    {id("compiler"), id("software")},
                                                    {id("compiler"), id("computer science")}}));
  EXPECT_EQ(r.graph.term(id("software")).origins, (std::set<tf::Origin>{tf::Origin::kLlm}));
  EXPECT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(unlinked(r.graph, seed), (std::set<tf::TermId>{id("genomics"), id("quantum computing")}));
}

TEST(Completion, AllNoneLeavesGraphUnchanged) {
  auto seed = tf::parse_seed("label,qid,cluster\na,Q1,0\nb,Q2,0\n");
  auto g = build({{"a", "x"}}, tf::Source::kCso, {"a", "b"});
  ScriptedChat chat;
  tf::LlmConfig cfg;
  auto r = tf::llm_complete(g, seed, cfg, chat);
  EXPECT_EQ(r.graph, g);
  cfg.prompt_mode = tf::PromptMode::kNoTerms;
  EXPECT_EQ(code_of([&] { tf::llm_complete(g, seed, cfg, chat); }), tf::ErrorCode::kInvalidArgument);
}

TEST(CompletionProperties, NeverRemoves) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    RandomFamily f(rng, 1);
    const auto& g = f.graphs[0];
    ScriptedChat chat;
    for (int v : f.seed_vertices)
      if (rng() % 2) chat.replies[testing_support::vertex(v)] = testing_support::vertex(static_cast<int>(rng() % 12));
    tf::LlmConfig cfg;
    auto r = tf::llm_complete(g, f.seed, cfg, chat);
    for (const auto& [t, term] : g.terms()) EXPECT_TRUE(r.graph.contains(t));
    for (const auto& e : g.edges()) EXPECT_TRUE(r.graph.edges().contains(e));
    auto before = unlinked(g, f.seed), after = unlinked(r.graph, f.seed);
    EXPECT_TRUE(std::includes(before.begin(), before.end(), after.begin(), after.end()));
  }
}
