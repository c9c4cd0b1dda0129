// Copyright 2026 The Authors.
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
#include "andis/graph.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "andis/synth.hpp"

namespace andis {
namespace {

Corpus Parse(const std::string& text) { return ParsePublications(text); }

// Sorted paper ids adjacent to a node.
std::vector<std::string> PaperIds(const BipartiteGraph& g, NodeId v) {
  std::vector<std::string> out;
  for (NodeId p : g.neighbors(v)) out.push_back(g.paper_id(p));
  std::sort(out.begin(), out.end());
  return out;
}

Corpus GiffelsCorpus() {
  return Parse(R"({
    "p1": {"title": "a", "authors": [{"name": "M. Giffels", "org": "CERN"}, {"name": "T. Kress", "org": "RWTH"}]},
    "p2": {"title": "b", "authors": [{"name": "M. Giffels", "org": "CERN"}]},
    "p3": {"title": "c", "authors": [{"name": "M. Giffels", "org": "RWTH"}, {"name": "T. Kress", "org": "RWTH"}]},
    "p4": {"title": "d", "authors": [{"name": "A. Other", "org": "CERN"}]}
  })");
}

TEST(BuildGraph, OnePaperTwoAuthors) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({"p": {"authors": [{"name": "A A"}, {"name": "B B"}]}})"));
  EXPECT_EQ(g.num_author_slots(), 2u);
  EXPECT_EQ(g.num_papers(), 1u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.ConnectedComponents(), std::vector<std::size_t>{3});
}

TEST(BuildGraph, SharedAuthorHasDegreeTwo) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({
    "p": {"authors": [{"name": "A A", "org": "x"}]},
    "q": {"authors": [{"name": "a-a", "org": "X "}]}
  })"));
  ASSERT_EQ(g.num_author_slots(), 1u);
  EXPECT_EQ(g.degree(0), 2u);
}

TEST(BuildGraph, NodeIdsFollowSortedKeys) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  // authors: a_other/cern, m_giffels/cern, m_giffels/rwth, t_kress/rwth
  ASSERT_EQ(g.num_author_slots(), 4u);
  EXPECT_EQ(g.author_key(0).name, "a_other");
  EXPECT_EQ(g.author_key(1).org, "cern");
  EXPECT_EQ(g.author_key(2).org, "rwth");
  EXPECT_EQ(g.paper_id(4), "p1");
  EXPECT_EQ(g.paper_id(7), "p4");
  EXPECT_TRUE(g.is_author(3));
  EXPECT_TRUE(g.is_paper(4));
}

TEST(BuildGraph, DistinctEmptyOrgOption) {
  Corpus c = Parse(R"({
    "p": {"authors": [{"name": "A A"}]},
    "q": {"authors": [{"name": "A A"}]}
  })");
  EXPECT_EQ(BipartiteGraph::Build(c).num_author_slots(), 1u);
  BipartiteGraph g = BipartiteGraph::Build(c, {.distinct_empty_org = true});
  EXPECT_EQ(g.num_author_slots(), 2u);
  EXPECT_EQ(g.ConnectedComponents().size(), 2u);
}

TEST(BuildGraph, EmptyCorpus) {
  BipartiteGraph g = BipartiteGraph::Build(Corpus{});
  EXPECT_EQ(g.num_nodes(), 0u);
  EXPECT_TRUE(g.ConnectedComponents().empty());
}

TEST(Merge, GiffelsNodesCombine) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const NodeId cern = *g.FindAuthor({"m_giffels", "cern", {}});
  const NodeId rwth = *g.FindAuthor({"m_giffels", "rwth", {}});
  const NodeId c = g.Merge(cern, rwth, 0, 7);
  EXPECT_EQ(c, std::min(cern, rwth));
  EXPECT_EQ(g.Resolve(cern), c);
  EXPECT_EQ(g.Resolve(rwth), c);
  EXPECT_EQ(PaperIds(g, c), (std::vector<std::string>{"p1", "p2", "p3"}));
  EXPECT_EQ(*g.FindAuthor({"m_giffels", "rwth", {}}), c);
  ASSERT_EQ(g.merge_log().size(), 1u);
  EXPECT_EQ(g.merge_log()[0].trigger_count, 7u);
  EXPECT_EQ(g.ComponentsToClustering("m_giffels"),
            (std::vector<std::vector<std::string>>{{"p1", "p2", "p3"}}));
}

TEST(Merge, SelfMergeIsLoggedNoOp) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const std::string before = g.ExportText();
  EXPECT_EQ(g.Merge(1, 1), 1u);
  EXPECT_EQ(g.ExportText(), before);
  ASSERT_EQ(g.merge_log().size(), 1u);
  EXPECT_TRUE(g.merge_log()[0].self_merge);
}

TEST(Merge, CrossNameAndPaperNodesRejected) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  EXPECT_THROW(g.Merge(0, 1), Error);
  EXPECT_THROW(g.Merge(1, 5), Error);
}

TEST(Merge, SharedPaperDegreeIsSetUnion) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({
    "p": {"authors": [{"name": "X", "org": "a"}, {"name": "X", "org": "b"}]},
    "q": {"authors": [{"name": "X", "org": "a"}]},
    "r": {"authors": [{"name": "X", "org": "b"}]}
  })"));
  const std::size_t da = g.degree(0), db = g.degree(1);
  const std::size_t edges = g.num_edges();
  const NodeId c = g.Merge(0, 1);
  EXPECT_EQ(g.degree(c), da + db - 1);
  EXPECT_EQ(g.num_edges(), edges - 1);
  EXPECT_EQ(g.degree(g.FindPaper("p").value()), 1u);
}

// Component count by an independent union-find over the edge list.
std::size_t OracleComponents(const BipartiteGraph& g) {
  std::vector<NodeId> parent(g.num_nodes());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<NodeId(NodeId)> find = [&](NodeId v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.neighbors(v)) parent[find(u)] = find(v);
  }
  std::set<NodeId> roots;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.is_live(v)) roots.insert(find(v));
  }
  return roots.size();
}

void CheckInvariants(const BipartiteGraph& g) {
  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    degree_sum += g.degree(v);
    if (!g.is_live(v)) {
      EXPECT_EQ(g.degree(v), 0u);
      continue;
    }
    for (NodeId u : g.neighbors(v)) {
      EXPECT_NE(g.is_author(u), g.is_author(v));
      EXPECT_TRUE(g.is_live(u));
      EXPECT_TRUE(g.has_edge(u, v));
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.num_edges());
  for (NodeId v = 0; v < g.num_author_slots(); ++v) EXPECT_EQ(g.Resolve(g.Resolve(v)), g.Resolve(v));
  EXPECT_EQ(g.ConnectedComponents().size(), OracleComponents(g));
}

TEST(Merge, RandomMergeSequencesKeepInvariants) {
  SynthConfig cfg;
  cfg.names = 6;
  cfg.orgs_per_profile = 3;
  cfg.papers_per_profile = 6;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthData d = SynthGenerate(cfg, seed);
    BipartiteGraph original = BipartiteGraph::Build(d.corpus);
    BipartiteGraph g = original;
    Rng rng(seed);
    std::size_t edges = g.num_edges();
    std::size_t comps = g.ConnectedComponents().size();
    std::map<NodeId, std::set<NodeId>> expected;  // original slot -> expected paper set of its canonical
    for (int step = 0; step < 30; ++step) {
      const auto names = d.labeling.name_keys();
      const std::string name = rng.Pick(names);
      std::vector<NodeId> nodes = g.AuthorsNamed(name);
      if (nodes.size() < 2) continue;
      const NodeId a = rng.Pick(nodes), b = rng.Pick(nodes);
      std::set<NodeId> want;
      for (NodeId p : g.neighbors(a)) want.insert(p);
      for (NodeId p : g.neighbors(b)) want.insert(p);
      const NodeId c = g.Merge(a, b, 0, 0);
      EXPECT_EQ(std::set<NodeId>(g.neighbors(c).begin(), g.neighbors(c).end()), want);
      EXPECT_LE(g.num_edges(), edges);
      EXPECT_LE(g.ConnectedComponents().size(), comps);
      edges = g.num_edges();
      comps = g.ConnectedComponents().size();
    }
    CheckInvariants(g);
    BipartiteGraph replay = original;
    ReplayMerges(replay, g.merge_log());
    EXPECT_TRUE(replay.SameStructure(g));
  }
}

TEST(Components, TwoStars) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({
    "p": {"authors": [{"name": "A"}, {"name": "B"}, {"name": "C"}]},
    "q": {"authors": [{"name": "D"}]}
  })"));
  EXPECT_EQ(g.ConnectedComponents(), (std::vector<std::size_t>{4, 2}));
}

TEST(Components, ClusteringWithoutMergesGroupsByOrg) {
  SynthConfig cfg;
  cfg.names = 3;
  cfg.orgs_per_profile = 2;
  SynthData d = SynthGenerate(cfg, 9);
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  for (const std::string& name : d.labeling.name_keys()) {
    auto clusters = g.ComponentsToClustering(name, d.labeling.papers_of(name));
    std::map<std::string, std::set<std::string>> by_org;
    for (const std::string& p : d.labeling.papers_of(name)) {
      for (const AuthorRef& a : d.corpus.at(p).authors) {
        if (NormalizeName(a.raw_name) == name) {
          by_org[NormalizeOrg(a.raw_org)].insert(p);
          break;
        }
      }
    }
    std::set<std::set<std::string>> want, got;
    for (auto& [org, ps] : by_org) want.insert(ps);
    for (auto& c : clusters) got.insert(std::set<std::string>(c.begin(), c.end()));
    EXPECT_EQ(got, want);
  }
}

TEST(Components, WithinProfileMergesRecoverTruth) {
  SynthConfig cfg;
  cfg.names = 4;
  cfg.orgs_per_profile = 3;
  SynthData d = SynthGenerate(cfg, 21);
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  for (const auto& [name, profiles] : d.labeling.names) {
    for (const auto& [pid, papers] : profiles) {
      std::optional<NodeId> first;
      for (const std::string& p : papers) {
        NodeId a = *g.AuthorOfInterest(p, name);
        if (!first) first = a;
        else g.Merge(*first, a);
      }
    }
    auto clusters = g.ComponentsToClustering(name, d.labeling.papers_of(name));
    std::set<std::vector<std::string>> got(clusters.begin(), clusters.end());
    std::set<std::vector<std::string>> want;
    for (const auto& [pid, papers] : profiles) want.insert(papers);
    EXPECT_EQ(got, want);
  }
}

TEST(Components, UnknownNameIsEmpty) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  EXPECT_TRUE(g.ComponentsToClustering("nobody").empty());
}

TEST(Graph, BuildIsDeterministic) {
  SynthData d = SynthGenerate(SynthConfig{}, 1);
  EXPECT_EQ(BipartiteGraph::Build(d.corpus).ExportText(), BipartiteGraph::Build(d.corpus).ExportText());
}

TEST(Graph, TextRoundTripAfterMerges) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  g.Merge(1, 2);
  BipartiteGraph back = BipartiteGraph::ImportText(g.ExportText());
  EXPECT_TRUE(back.SameStructure(g));
  EXPECT_EQ(back.ExportText(), g.ExportText());
  EXPECT_EQ(back.ComponentsToClustering("m_giffels"), g.ComponentsToClustering("m_giffels"));
  EXPECT_THROW(BipartiteGraph::ImportText("node x author"), Error);
}

}  // namespace
}  // namespace andis
