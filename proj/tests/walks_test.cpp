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
#include "andis/walks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "andis/synth.hpp"

namespace andis {
namespace {

Corpus Parse(const std::string& text) { return ParsePublications(text); }

Corpus GiffelsCorpus() {
  return Parse(R"({
    "p1": {"authors": [{"name": "M. Giffels", "org": "CERN"}, {"name": "T. Kress", "org": "RWTH"}]},
    "p2": {"authors": [{"name": "M. Giffels", "org": "CERN"}, {"name": "A. Meyer", "org": "RWTH"}]},
    "p3": {"authors": [{"name": "M. Giffels", "org": "RWTH"}, {"name": "T. Kress", "org": "RWTH"}]},
    "p4": {"authors": [{"name": "M. Giffels", "org": "RWTH"}, {"name": "A. Meyer", "org": "RWTH"}]},
    "p5": {"authors": [{"name": "M. Giffels", "org": "DESY"}, {"name": "Q. Zed", "org": "DESY"}]}
  })");
}

TEST(RwrVisitCounts, AlphaOneStaysAtStart) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const NodeId s = *g.FindAuthor({"m_giffels", "cern", {}});
  auto counts = RwrVisitCounts(g, s, 1.0, 500, 1);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.at(s), 500u);
}

TEST(RwrVisitCounts, CountsSumToStepsAndStayOnReachableAuthors) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const NodeId s = *g.FindAuthor({"m_giffels", "cern", {}});
  const auto labels = g.ComponentLabels();
  for (double alpha : {0.0, 0.4, 0.9}) {
    auto counts = RwrVisitCounts(g, s, alpha, 2000, 7);
    std::uint64_t total = 0;
    for (const auto& [v, c] : counts) {
      total += c;
      EXPECT_TRUE(g.is_author(v));
      EXPECT_EQ(labels[v], labels[s]);
    }
    EXPECT_EQ(total, 2000u);
  }
  // The DESY node sits in another component and is never reached.
  auto counts = RwrVisitCounts(g, s, 0.0, 5000, 3);
  EXPECT_EQ(counts.count(*g.FindAuthor({"m_giffels", "desy", {}})), 0u);
}

TEST(RwrVisitCounts, TwoAuthorPaperSplitsEvenly) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({"p": {"authors": [{"name": "A"}, {"name": "B"}]}})"));
  const std::uint64_t steps = 10000;
  auto counts = RwrVisitCounts(g, 0, 0.0, steps, 5);
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts.at(0) + counts.at(1), steps);
  // Each step lands on A or B with probability 1/2: stay within 5 sigma.
  EXPECT_NEAR(static_cast<double>(counts.at(0)), steps / 2.0, 5 * std::sqrt(steps / 4.0));
  // Small W, enumerated: with W = 1 the one step lands on either node.
  auto one = RwrVisitCounts(g, 0, 0.0, 1, 11);
  EXPECT_EQ(one.size(), 1u);
}

// Stationary distribution of the restart chain on author nodes:
//   pi = alpha e_s + (1 - alpha) pi M,  M[a][b] = sum_p 1/deg(a) * 1/deg(p).
TEST(RwrVisitCounts, FrequenciesMatchRestartChain) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const NodeId s = *g.FindAuthor({"m_giffels", "cern", {}});
  const double alpha = 0.4;
  const std::size_t n = g.num_author_slots();
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId p : g.neighbors(a)) {
      for (NodeId b : g.neighbors(p)) {
        M[a][b] += 1.0 / static_cast<double>(g.degree(a)) / static_cast<double>(g.degree(p));
      }
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[s] = 1.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> next(n, 0.0);
    next[s] = alpha;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) next[b] += (1 - alpha) * pi[a] * M[a][b];
    }
    pi = next;
  }
  const std::uint64_t steps = 200000;
  auto counts = RwrVisitCounts(g, s, alpha, steps, 13);
  for (NodeId v = 0; v < n; ++v) {
    const double freq = counts.count(v) ? static_cast<double>(counts.at(v)) / steps : 0.0;
    EXPECT_NEAR(freq, pi[v], 0.01) << v;
  }
}

TEST(RwrVisitCounts, RejectsUnwalkableStarts) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  EXPECT_THROW(RwrVisitCounts(g, *g.FindPaper("p1"), 0.4, 10, 1), Error);
  BipartiteGraph h = BipartiteGraph::Build(Parse(R"({"p": {"authors": [{"name": "A", "org": "x"}, {"name": "A", "org": "y"}]}})"));
  h.Merge(0, 1);
  EXPECT_THROW(RwrVisitCounts(h, 1, 0.4, 10, 1), Error);
}

TEST(RwrVisitCounts, DeterministicForSeed) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  EXPECT_EQ(RwrVisitCounts(g, 1, 0.4, 1000, 5), RwrVisitCounts(g, 1, 0.4, 1000, 5));
}

TEST(RwrMerge, GiffelsCoauthorNodeCrossesThreshold) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  const NodeId cern = *g.FindAuthor({"m_giffels", "cern", {}});
  const NodeId rwth = *g.FindAuthor({"m_giffels", "rwth", {}});
  auto counts = RwrVisitCounts(g, cern, 0.4, 10000, 1);
  EXPECT_GT(counts[rwth], 3u);
  RwrMerge(g, RwrConfig{});
  EXPECT_EQ(g.Resolve(cern), g.Resolve(rwth));
  auto clusters = g.ComponentsToClustering("m_giffels");
  std::set<std::vector<std::string>> got(clusters.begin(), clusters.end());
  EXPECT_EQ(got, (std::set<std::vector<std::string>>{{"p1", "p2", "p3", "p4"}, {"p5"}}));
}

TEST(RwrMerge, NoSharedNamesNoMerges) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({
    "p": {"authors": [{"name": "A", "org": "x"}, {"name": "B", "org": "y"}]},
    "q": {"authors": [{"name": "B", "org": "y"}, {"name": "C", "org": "z"}]}
  })"));
  RwrResult r = RwrMerge(g, RwrConfig{});
  EXPECT_EQ(r.merges, 0u);
  EXPECT_EQ(r.walks, 0u);
  EXPECT_TRUE(g.merge_log().empty());
}

TEST(RwrMerge, DisjointComponentsNeverMerge) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig cfg;
    cfg.names = 4;
    cfg.orgs_per_profile = 3;
    cfg.papers_per_profile = 6;
    SynthData d = SynthGenerate(cfg, seed);
    BipartiteGraph g = BipartiteGraph::Build(d.corpus);
    const auto labels = g.ComponentLabels();
    RwrConfig rc;
    rc.seed = seed;
    rc.walk_length = 2000;
    rc.epochs = 2;
    RwrMerge(g, rc);
    for (const MergeRecord& m : g.merge_log()) EXPECT_EQ(labels[m.a], labels[m.b]);
  }
}

TEST(RwrMerge, LiveCountFallsAndLogReplays) {
  SynthConfig cfg;
  cfg.names = 5;
  cfg.orgs_per_profile = 3;
  SynthData d = SynthGenerate(cfg, 4);
  const BipartiteGraph original = BipartiteGraph::Build(d.corpus);
  BipartiteGraph g = original;
  RwrConfig rc;
  rc.epochs = 3;
  RwrResult r = RwrMerge(g, rc);
  std::size_t prev = original.num_live_authors();
  for (std::size_t live : r.live_authors_per_epoch) {
    EXPECT_LE(live, prev);
    prev = live;
  }
  EXPECT_GT(r.merges, 0u);
  BipartiteGraph replay = original;
  ReplayMerges(replay, g.merge_log());
  EXPECT_TRUE(replay.SameStructure(g));
  EXPECT_EQ(replay.ExportText(), g.ExportText());
}

TEST(RwrMerge, CleanSyntheticIsPrecise) {
  SynthConfig cfg;
  cfg.orgs_per_profile = 3;
  SynthData d = SynthGenerate(cfg, 6);
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  RwrMerge(g, RwrConfig{});
  Clustering c;
  for (const std::string& name : d.labeling.name_keys()) {
    c.by_name[name] = g.ComponentsToClustering(name, d.labeling.papers_of(name));
  }
  PairwiseMetrics m = ComputePairwiseMetrics(c, d.labeling);
  EXPECT_GE(m.macro_precision, 0.9);
  EXPECT_GT(m.macro_recall, 1.0 / 3.0);
}

TEST(Node2Vec, UniformWhenPAndQAreOne) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  for (NodeId cur = 0; cur < g.num_nodes(); ++cur) {
    for (NodeId prev : g.neighbors(cur)) {
      for (const auto& [x, pr] : TransitionProbabilities(g, prev, cur, 1.0, 1.0)) {
        EXPECT_DOUBLE_EQ(pr, 1.0 / static_cast<double>(g.degree(cur)));
      }
    }
  }
}

TEST(Node2Vec, TransitionWeightsMatchFormula) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  for (double p : {0.25, 1.0, 4.0}) {
    for (double q : {0.5, 2.0, 1e6}) {
      for (NodeId cur = 0; cur < g.num_nodes(); ++cur) {
        for (NodeId prev : g.neighbors(cur)) {
          auto probs = TransitionProbabilities(g, prev, cur, p, q);
          double total = 0, norm = 0;
          for (NodeId x : g.neighbors(cur)) {
            // Distance from prev to x: 0, 1 or 2 (x is a neighbor of cur).
            norm += x == prev ? 1 / p : (g.has_edge(prev, x) ? 1.0 : 1 / q);
          }
          for (const auto& [x, pr] : probs) {
            const double w = x == prev ? 1 / p : (g.has_edge(prev, x) ? 1.0 : 1 / q);
            EXPECT_NEAR(pr, w / norm, 1e-12);
            total += pr;
          }
          EXPECT_NEAR(total, 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(Node2Vec, EmpiricalTransitionsMatchClosedForm) {
  // Hub paper h with authors {a, b, c}; a also writes paper k. Walks that
  // arrive at h from a should return to a with weight 1/p and move on to b
  // or c with weight 1/q each.
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({
    "h": {"authors": [{"name": "A"}, {"name": "B"}, {"name": "C"}]},
    "k": {"authors": [{"name": "A"}]}
  })"));
  const NodeId a = *g.FindAuthor({"a", "", {}});
  const NodeId h = *g.FindPaper("h");
  Node2VecConfig c;
  c.p = 1.0;
  c.q = 4.0;
  c.walk_length = 3;
  c.walks_per_node = 4000;
  WalkCorpus w = Node2VecWalks(g, c);
  std::map<NodeId, double> freq;
  double n = 0;
  for (const auto& walk : w.walks) {
    if (walk.size() == 3 && walk[0] == a && walk[1] == h) {
      freq[walk[2]] += 1;
      n += 1;
    }
  }
  ASSERT_GT(n, 500);
  for (const auto& [x, pr] : TransitionProbabilities(g, a, h, c.p, c.q)) {
    EXPECT_NEAR(freq[x] / n, pr, 0.04) << x;
  }
  // q -> infinity suppresses moving away: the walk returns.
  EXPECT_NEAR(TransitionProbabilities(g, a, h, 1.0, 1e12)[0].second, 1.0, 1e-9);
}

TEST(Node2Vec, CorpusShape) {
  SynthConfig cfg;
  cfg.names = 3;
  SynthData d = SynthGenerate(cfg, 1);
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  WalkCorpus w = Node2VecWalks(g, Node2VecConfig{});
  EXPECT_EQ(w.walks.size(), 20 * g.num_nodes());
  for (const auto& walk : w.walks) {
    EXPECT_LE(walk.size(), 10u);
    EXPECT_GE(walk.size(), 1u);
    for (std::size_t i = 1; i < walk.size(); ++i) EXPECT_TRUE(g.has_edge(walk[i - 1], walk[i]));
  }
  Node2VecConfig skewed;
  skewed.p = 0.5;
  skewed.q = 2.0;
  EXPECT_EQ(Node2VecWalks(g, skewed).ToText(), Node2VecWalks(g, skewed).ToText());
}

TEST(Node2Vec, IsolatedNodeGivesLengthOneWalk) {
  BipartiteGraph g = BipartiteGraph::Build(Parse(R"({"p": {"title": "orphan"}})"));
  WalkCorpus w = Node2VecWalks(g, Node2VecConfig{});
  ASSERT_EQ(w.walks.size(), 20u);
  for (const auto& walk : w.walks) EXPECT_EQ(walk.size(), 1u);
}

TEST(WalkCorpus, TextRoundTrip) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  Node2VecConfig c;
  c.p = 0.5;
  c.walks_per_node = 3;
  WalkCorpus w = Node2VecWalks(g, c);
  WalkCorpus back = WalkCorpus::FromText(w.ToText());
  EXPECT_EQ(back.walks, w.walks);
  EXPECT_EQ(back.p, 0.5);
  EXPECT_EQ(back.walk_length, 10u);
  EXPECT_THROW(WalkCorpus::FromText("1 2 x\n"), Error);
}

TEST(SkipGram, GradientMatchesFiniteDifferences) {
  // Five-node toy: input 0, positive 1, negatives 2, 3, 4.
  Rng rng(3);
  std::vector<Vec> v(5, Vec(6));
  for (auto& x : v) {
    for (double& e : x) e = rng.Uniform(-1, 1);
  }
  auto loss = [&]() {
    std::vector<std::span<const double>> negs = {v[2], v[3], v[4]};
    return SgnsLoss(v[0], v[1], negs);
  };
  std::vector<Vec> grad(5, Vec(6, 0.0));
  {
    std::vector<std::span<const double>> negs = {v[2], v[3], v[4]};
    std::vector<std::span<double>> gnegs = {grad[2], grad[3], grad[4]};
    SgnsLoss(v[0], v[1], negs, grad[0], grad[1], gnegs);
  }
  double worst = 0;
  const double eps = 1e-6;
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t i = 0; i < 6; ++i) {
      const double keep = v[r][i];
      v[r][i] = keep + eps;
      const double up = loss();
      v[r][i] = keep - eps;
      const double down = loss();
      v[r][i] = keep;
      const double fd = (up - down) / (2 * eps);
      worst = std::max(worst, std::abs(fd - grad[r][i]) / std::max({std::abs(fd), std::abs(grad[r][i]), 1e-6}));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(SkipGram, StepMatchesAnalyticUpdate) {
  Rng rng(1);
  SgnsTables t(3, 3, 4, rng);
  for (std::size_t r = 0; r < 3; ++r) {
    for (double& x : t.out(r)) x = rng.Uniform(-1, 1);
  }
  // A sampler that only ever yields node 2.
  UnigramSampler only_two({0, 0, 1}, 1.0);
  Vec in0(t.in(0).begin(), t.in(0).end());
  Vec out1(t.out(1).begin(), t.out(1).end()), out2(t.out(2).begin(), t.out(2).end());
  Vec gi(4, 0.0), g1(4, 0.0), g2(4, 0.0);
  std::vector<std::span<const double>> negs = {out2};
  std::vector<std::span<double>> gnegs = {g2};
  const double want_loss = SgnsLoss(in0, out1, negs, gi, g1, gnegs);
  Rng r2(0);
  const double got_loss = t.Step(0, 1, only_two, 1, 0.1, r2);
  EXPECT_NEAR(got_loss, want_loss, 1e-12);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(t.in(0)[i], in0[i] - 0.1 * gi[i], 1e-12);
    EXPECT_NEAR(t.out(1)[i], out1[i] - 0.1 * g1[i], 1e-12);
    EXPECT_NEAR(t.out(2)[i], out2[i] - 0.1 * g2[i], 1e-12);
  }
}

TEST(SkipGram, SharedContextBecomesSimilar) {
  // Nodes 0 and 1 only ever appear next to hub 6, 2 and 3 next to 7, 4 and 5
  // next to 8.
  WalkCorpus w;
  for (int i = 0; i < 300; ++i) {
    for (NodeId v = 0; v < 6; ++v) w.walks.push_back({v, 6 + v / 2});
  }
  SgnsConfig c;
  c.dim = 16;
  c.epochs = 5;
  NodeEmbeddings e = TrainSkipGram(w, 9, c, 1);
  for (NodeId v = 0; v < 6; ++v) {
    const NodeId twin = v ^ 1u;
    for (NodeId other = 0; other < 6; ++other) {
      if (other / 2 == v / 2) continue;
      EXPECT_GT(AuthorSimCosine(e, v, twin), AuthorSimCosine(e, v, other)) << v << " " << other;
    }
  }
  EXPECT_GT(e.epoch_loss.front(), e.epoch_loss.back());
}

TEST(SkipGram, ShapesAndErrors) {
  BipartiteGraph g = BipartiteGraph::Build(GiffelsCorpus());
  Node2VecConfig nc;
  nc.walks_per_node = 2;
  WalkCorpus w = Node2VecWalks(g, nc);
  NodeEmbeddings e = TrainSkipGram(w, g.num_nodes(), DefaultNodeSgns(), 2);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    EXPECT_EQ(e.vector(v).size(), 100u);
    EXPECT_TRUE(AllFinite(e.vector(v)));
  }
  SgnsConfig bad = DefaultNodeSgns();
  bad.window = 0;
  EXPECT_THROW(TrainSkipGram(w, g.num_nodes(), bad, 2), Error);
  EXPECT_THROW(TrainSkipGram(WalkCorpus{}, g.num_nodes(), DefaultNodeSgns(), 2), Error);
  NodeEmbeddings again = TrainSkipGram(w, g.num_nodes(), DefaultNodeSgns(), 2);
  EXPECT_EQ(again.data, e.data);
}

TEST(SkipGram, MissingNodeHasNoEmbedding) {
  WalkCorpus w;
  w.walks = {{0, 1}, {1, 0}};
  SgnsConfig c;
  c.dim = 4;
  NodeEmbeddings e = TrainSkipGram(w, 3, c, 1);
  EXPECT_FALSE(e.has(2));
  EXPECT_THROW(AuthorSimCosine(e, 0, 2), Error);
}

TEST(SkipGram, PersistenceRoundTrip) {
  WalkCorpus w;
  w.walks = {{0, 1, 2}, {2, 1, 0}};
  SgnsConfig c;
  c.dim = 8;
  NodeEmbeddings e = TrainSkipGram(w, 4, c, 1);
  NodeEmbeddings back = NodeEmbeddings::FromJson(Json::parse(e.ToJson().dump()));
  EXPECT_EQ(back.data, e.data);
  EXPECT_EQ(back.present, e.present);
}

TEST(AuthorSimCosine, Cases) {
  NodeEmbeddings e;
  e.dim = 2;
  e.data = {1, 2, 1, 2, -2, 1, -1, -2, 0, 0};
  e.present = {1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(AuthorSimCosine(e, 0, 1), 1.0);
  EXPECT_NEAR(AuthorSimCosine(e, 0, 2), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(AuthorSimCosine(e, 0, 3), -1.0);
  EXPECT_EQ(AuthorSimCosine(e, 0, 4), 0.0);
  SimilarityFunction s = EmbeddingSimilarity(e);
  EXPECT_NEAR(s.Score({"x", "", 0}, {"x", "", 3}), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.Score({"x", "", 0}, {"x", "", 1}), 1.0);
  EXPECT_DOUBLE_EQ(s.Score({"x", "", 0}, {"y", "", 1}), 0.0);
}

}  // namespace
}  // namespace andis
