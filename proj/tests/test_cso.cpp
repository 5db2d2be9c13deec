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

#include "support/fixtures.hpp"
#include "taxoforge/cso.hpp"
#include "taxoforge/csv.hpp"

namespace tf = taxoforge;
using testing_support::code_of;
using testing_support::id;

namespace {

constexpr const char* kSuper = "<http://cso.kmi.open.ac.uk/schema/cso#superTopicOf>";
constexpr const char* kPref = "<http://cso.kmi.open.ac.uk/schema/cso#preferentialEquivalent>";

std::string topic(const std::string& name) { return "<https://cso.kmi.open.ac.uk/topics/" + name + ">"; }

std::string triple(const std::string& s, const std::string& p, const std::string& o) {
  return "\"" + s + "\",\"" + p + "\",\"" + o + "\"\n";
}

struct Fixture {
  tf::SeedList seed = tf::load_seed(testing_support::data_dir() / "seed.csv");
  tf::CsoGraph cso = tf::load_cso_dump(testing_support::data_dir() / "cso.csv");
  std::unique_ptr<tf::FileEmbeddingProvider> provider =
      tf::FileEmbeddingProvider::load("hash-trigram-64", testing_support::data_dir() / "embeddings.csv");

  tf::CsoLinks link(double threshold, std::size_t workers = 1) {
    return tf::link_seed_to_cso(seed, cso, {threshold, provider.get(), workers});
  }
};

std::set<tf::EdgePair> pairs(const tf::TaxonomyGraph& g) {
  auto v = g.edge_pairs();
  return {v.begin(), v.end()};
}

}  // namespace

TEST(CsoParse, UriToLabel) {
  EXPECT_EQ(tf::uri_to_label("https://cso.kmi.open.ac.uk/topics/machine_learning"), "machine learning");
  EXPECT_EQ(tf::uri_to_label("<https://cso.kmi.open.ac.uk/topics/caf%C3%A9_systems>"), "caf\xC3\xA9 systems");
  EXPECT_EQ(tf::uri_to_label("https://x/topics/semi-supervised_learning/"), "semi-supervised learning");
}

TEST(CsoParse, SuperTopicDirection) {
  auto g = tf::parse_cso_dump(triple(topic("x"), kSuper, topic("y")));
  EXPECT_EQ(g.narrower_broader(), (std::set<tf::EdgePair>{{id("y"), id("x")}}));
  EXPECT_EQ(g.broader(id("y")), (std::set<tf::TermId>{id("x")}));
  EXPECT_TRUE(g.same_as().empty());
}

TEST(CsoParse, DuplicateAliasTripleIsOneEntry) {
  const std::string t = triple(topic("a"), kPref, topic("c"));
  auto g = tf::parse_cso_dump(t + t);
  EXPECT_EQ(g.preferential_equivalent().size(), 1u);
  EXPECT_EQ(g.resolve(id("a")), id("c"));
  EXPECT_EQ(g.stats.preferential_equivalent, 2u);
}

TEST(CsoParse, AliasChainsAreIdempotent) {
  auto g = tf::parse_cso_dump(triple(topic("a"), kPref, topic("b")) + triple(topic("b"), kPref, topic("c")) +
                              triple(topic("c"), kPref, topic("c")));
  for (const auto& [alias, canonical] : g.preferential_equivalent()) {
    EXPECT_EQ(g.resolve(canonical), canonical);
    EXPECT_EQ(g.resolve(alias), id("c"));
  }
  EXPECT_EQ(g.aliases_of(id("c")), (std::set<std::string>{"a", "b", "c"}));
}

TEST(CsoParse, FixtureStats) {
  Fixture f;
  EXPECT_EQ(f.cso.stats.lines, 25u);
  EXPECT_EQ(f.cso.stats.super_topic_of, 12u);
  EXPECT_EQ(f.cso.stats.preferential_equivalent, 2u);
  EXPECT_EQ(f.cso.stats.same_as, 10u);
  EXPECT_EQ(f.cso.stats.skipped, 1u);
  EXPECT_EQ(f.cso.topics_for_qid("Q192776"), (std::vector<tf::TermId>{id("neural networks")}));
  // Alias edges collapse onto the canonical topic.
  EXPECT_TRUE(f.cso.broader(id("deep learning")).contains(id("neural networks")));
}

TEST(CsoParse, MalformedLine) {
  auto code = code_of([] { tf::parse_cso_dump(triple(topic("a"), kSuper, topic("b")) + "\"only\",\"two\"\n"); });
  EXPECT_EQ(code, tf::ErrorCode::kParseError);
  try {
    tf::parse_cso_dump(triple(topic("a"), kSuper, topic("b")) + "\"only\",\"two\"\n");
  } catch (const tf::Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(CsoLink, GateAtDefaultThreshold) {
  Fixture f;
  auto links = f.link(0.80);
  EXPECT_EQ(links.linked.size(), 8u);
  EXPECT_EQ(links.linked.at(id("neural network")), id("neural networks"));
  EXPECT_EQ(links.linked.at(id("compiler")), id("compilers"));
  ASSERT_EQ(links.rejected.size(), 1u);
  EXPECT_EQ(links.rejected[0].seed, id("semi-supervised clustering"));
  EXPECT_EQ(links.rejected[0].cso_term, id("constrained clustering"));
  EXPECT_LT(links.rejected[0].similarity, 0.5);
  EXPECT_EQ(links.unmatched, (std::vector<tf::TermId>{id("science"), id("quantum computing")}));
  EXPECT_EQ(tf::rejected_links_csv(links).substr(0, 25), "seed,cso_term,similarity\n");
}

TEST(CsoLink, MislinkAcceptedOnlyAtLowThreshold) {
  Fixture f;
  EXPECT_TRUE(f.link(0.40).linked.contains(id("semi-supervised clustering")));
  EXPECT_FALSE(f.link(0.50).linked.contains(id("semi-supervised clustering")));
  EXPECT_TRUE(f.link(0.80).linked.contains(id("compiler")));
  EXPECT_FALSE(f.link(0.90).linked.contains(id("compiler")));
}

TEST(CsoLink, MonotoneInThreshold) {
  Fixture f;
  std::set<tf::TermId> prev;
  for (int step = 10; step >= 0; --step) {
    auto links = f.link(step / 10.0);
    std::set<tf::TermId> cur;
    for (const auto& [s, t] : links.linked) cur.insert(s);
    EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) << step;
    EXPECT_EQ(links.linked.size() + links.rejected.size() + links.unmatched.size(), f.seed.size());
    prev = std::move(cur);
  }
}

TEST(CsoLink, WorkersDoNotChangeResult) {
  Fixture f;
  auto a = f.link(0.6, 1), b = f.link(0.6, 4);
  EXPECT_EQ(a.linked, b.linked);
  EXPECT_EQ(tf::rejected_links_csv(a), tf::rejected_links_csv(b));
}

TEST(CsoLink, RequiresProvider) {
  Fixture f;
  EXPECT_EQ(code_of([&] { tf::link_seed_to_cso(f.seed, f.cso, {0.8, nullptr, 1}); }), tf::ErrorCode::kInvalidArgument);
}

TEST(CsoBuild, FixtureTaxonomy) {
  Fixture f;
  auto g = tf::build_cso_taxonomy(f.seed, f.link(0.80), f.cso);
  const std::set<tf::EdgePair> expected{
      {id("machine learning"), id("computer science")},
      {id("machine learning"), id("artificial intelligence")},
      {id("artificial intelligence"), id("computer science")},
      {id("semi-supervised learning"), id("machine learning")},
      {id("neural network"), id("machine learning")},
      {id("compiler"), id("programming languages")},
      {id("programming languages"), id("computer science")},
      {id("bioinformatics"), id("computational biology")},
      {id("bioinformatics"), id("genomics")},
      {id("genomics"), id("bioinformatics")},
  };
  EXPECT_EQ(pairs(g), expected);
  EXPECT_EQ(g.node_count(), 13u);
  for (const auto& e : g.edges()) EXPECT_EQ(e.source, tf::Source::kCso);
  for (const char* unlinked : {"science", "semi-supervised clustering", "quantum computing"}) {
    ASSERT_TRUE(g.contains(id(unlinked)));
    EXPECT_TRUE(g.parents(id(unlinked)).empty());
    EXPECT_TRUE(g.children(id(unlinked)).empty());
  }
  const auto& nn = g.term(id("neural network"));
  EXPECT_TRUE(nn.origins.contains(tf::Origin::kSeed));
  EXPECT_TRUE(nn.origins.contains(tf::Origin::kCso));
  EXPECT_TRUE(nn.aliases.contains("artificial neural networks"));
  EXPECT_FALSE(g.contains(id("artificial neural networks")));
  EXPECT_EQ(g.term(id("programming languages")).origins, (std::set<tf::Origin>{tf::Origin::kCso}));
}

TEST(CsoBuild, AliasesCollapseToOneNode) {
  const std::string dump = triple(topic("a1"), kPref, topic("a")) + triple(topic("a"), kSuper, topic("x")) +
                           triple(topic("a1"), kSuper, topic("x")) + triple(topic("p"), kSuper, topic("a")) +
                           triple(topic("p"), kSuper, topic("a1")) +
                           "\"" + topic("x") + "\",\"<http://www.w3.org/2002/07/owl#sameAs>\",\"<http://www.wikidata.org/entity/Q5>\"\n";
  auto cso = tf::parse_cso_dump(dump);
  auto seed = tf::parse_seed("label,qid,cluster\nx,Q5,0\n");
  tf::CsoLinks links;
  links.linked.emplace(id("x"), id("x"));
  auto g = tf::build_cso_taxonomy(seed, links, cso);
  EXPECT_EQ(pairs(g), (std::set<tf::EdgePair>{{id("x"), id("a")}, {id("a"), id("p")}}));
  EXPECT_FALSE(g.contains(id("a1")));
  EXPECT_TRUE(g.term(id("a")).aliases.contains("a1"));
}
