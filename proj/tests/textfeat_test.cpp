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
#include "andis/textfeat.hpp"

#include <gtest/gtest.h>

#include "andis/synth.hpp"

namespace andis {
namespace {

TEST(Tokenize, LowercaseAndDropsSingleCharacters) {
  EXPECT_EQ(TokenizeText("A Study of X-ray Data, 2nd ed."),
            (std::vector<std::string>{"study", "of", "ray", "data", "2nd", "ed"}));
  EXPECT_TRUE(TokenizeText("").empty());
}

TEST(OrgBigrams, HandTokenized) {
  EXPECT_EQ(OrgBigrams("cern"), (std::vector<std::string>{"ce", "er", "rn"}));
  EXPECT_EQ(OrgBigrams("ab_c"), (std::vector<std::string>{"ab", "b_", "_c"}));
  EXPECT_TRUE(OrgBigrams("x").empty());
  EXPECT_TRUE(OrgBigrams("").empty());
}

DocModelConfig Small(std::size_t dim = 32, std::size_t epochs = 10) {
  DocModelConfig c;
  c.dim = dim;
  c.epochs = epochs;
  return c;
}

bool Finite(std::span<const double> v) { return AllFinite(v); }

TEST(DocModel, SingleDocument) {
  DocEmbeddingModel m = DocEmbeddingModel::Train({{"d", {"alpha", "beta"}}}, Small(), 1);
  ASSERT_TRUE(m.DocVector("d"));
  EXPECT_TRUE(Finite(*m.DocVector("d")));
}

TEST(DocModel, DefaultDimensionIsHundred) {
  DocEmbeddingModel m = DocEmbeddingModel::Train({{"d", {"alpha", "beta"}}, {"e", {"gamma"}}}, DocModelConfig{}, 1);
  EXPECT_EQ(m.DocVector("d")->size(), 100u);
  EXPECT_EQ(m.WordVector("gamma")->size(), 100u);
}

TEST(DocModel, AllEmptyIsAnError) {
  EXPECT_THROW(DocEmbeddingModel::Train({{"a", {}}, {"b", {}}}, Small(), 1), Error);
  EXPECT_THROW(DocEmbeddingModel::Train({}, Small(), 1), Error);
}

TEST(DocModel, EmptyDocumentsHaveNoVector) {
  DocEmbeddingModel m = DocEmbeddingModel::Train({{"a", {"xx"}}, {"b", {}}}, Small(), 1);
  EXPECT_FALSE(m.DocVector("b"));
  EXPECT_EQ(m.Embed("b", {}), Vec(32, 0.0));
}

// Two topics with disjoint vocabularies, 50 documents each.
std::vector<TextDocument> TwoTopics(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TextDocument> docs;
  for (int topic = 0; topic < 2; ++topic) {
    for (int d = 0; d < 50; ++d) {
      TextDocument doc{"t" + std::to_string(topic) + "_" + std::to_string(d), {}};
      for (int k = 0; k < 12; ++k) doc.tokens.push_back("w" + std::to_string(topic) + "_" + std::to_string(rng.Below(20)));
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

TEST(DocModel, TopicsSeparateForEverySeed) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto docs = TwoTopics(seed);
    DocEmbeddingModel m = DocEmbeddingModel::Train(docs, Small(50, 20), seed);
    double within = 0, across = 0;
    std::size_t nw = 0, na = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (std::size_t j = i + 1; j < docs.size(); ++j) {
        const double c = Cosine(*m.DocVector(docs[i].id), *m.DocVector(docs[j].id));
        if ((i < 50) == (j < 50)) {
          within += c;
          ++nw;
        } else {
          across += c;
          ++na;
        }
      }
    }
    EXPECT_GT(within / static_cast<double>(nw), across / static_cast<double>(na)) << "seed " << seed;
  }
}

TEST(DocModel, LossFallsAcrossEpochs) {
  DocEmbeddingModel m = DocEmbeddingModel::Train(TwoTopics(3), Small(32, 20), 3);
  ASSERT_EQ(m.epoch_loss().size(), 20u);
  EXPECT_GT(m.epoch_loss().front(), m.epoch_loss().back());
  for (double l : m.epoch_loss()) EXPECT_TRUE(std::isfinite(l));
}

TEST(DocModel, DeterministicForSeed) {
  auto docs = TwoTopics(1);
  DocEmbeddingModel a = DocEmbeddingModel::Train(docs, Small(), 9);
  DocEmbeddingModel b = DocEmbeddingModel::Train(docs, Small(), 9);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  DocEmbeddingModel c = DocEmbeddingModel::Train(docs, Small(), 10);
  EXPECT_NE(a.ToJson().dump(), c.ToJson().dump());
}

TEST(DocModel, MinCountFiltersVocabulary) {
  DocModelConfig c = Small();
  c.min_count = 2;
  DocEmbeddingModel m = DocEmbeddingModel::Train({{"a", {"xx", "yy"}}, {"b", {"xx"}}}, c, 1);
  EXPECT_EQ(m.words(), std::vector<std::string>{"xx"});
}

TEST(DocModel, JsonRoundTripIsExact) {
  DocEmbeddingModel m = DocEmbeddingModel::Train(TwoTopics(2), Small(), 4);
  DocEmbeddingModel back = DocEmbeddingModel::FromJson(Json::parse(m.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), m.ToJson().dump());
  Vec a = m.Infer({"w0_1", "w0_2"}), b = back.Infer({"w0_1", "w0_2"});
  EXPECT_EQ(a, b);
  Json bad = m.ToJson();
  bad["format"] = "other";
  EXPECT_THROW(DocEmbeddingModel::FromJson(bad), Error);
}

TEST(Year, Standardization) {
  EXPECT_EQ(StandardizeYear(1995, 1995, 2019), 0.0);
  EXPECT_EQ(StandardizeYear(2019, 1995, 2019), 1.0);
  EXPECT_EQ(StandardizeYear(2007, 1995, 2019), 0.5);
  EXPECT_EQ(StandardizeYear(std::nullopt, 1995, 2019), 0.5);
  EXPECT_EQ(StandardizeYear(1900, 1995, 2019), 0.0);
  EXPECT_EQ(StandardizeYear(2100, 1995, 2019), 1.0);
  double prev = -1;
  for (int y = 1980; y <= 2030; ++y) {
    const double v = StandardizeYear(y, 1995, 2019);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
}

FeatureConfig SmallFeatures() {
  FeatureConfig c;
  c.title = Small(16, 5);
  c.abstract = Small(16, 5);
  c.org = Small(16, 5);
  return c;
}

TEST(Features, LayoutAndBlocks) {
  SynthConfig cfg;
  cfg.names = 3;
  cfg.papers_per_profile = 5;
  cfg.missing_abstract_rate = 0.3;
  SynthData d = SynthGenerate(cfg, 6);
  FeatureModels m = TrainFeatureModels(d.corpus, SmallFeatures(), 6);
  EXPECT_EQ(m.dim(), 49u);
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  NodeFeatures f = AssembleFeatures(g, d.corpus, m);
  EXPECT_EQ(f.rows(), g.num_nodes());
  auto block_is_zero = [&](std::span<const double> x, std::size_t b) {
    for (std::size_t i = b * 16; i < (b + 1) * 16; ++i) {
      if (x[i] != 0.0) return false;
    }
    return true;
  };
  bool saw_missing = false;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    std::span<const double> x = f.row(v);
    EXPECT_TRUE(AllFinite(x));
    if (g.is_author(v)) {
      EXPECT_TRUE(block_is_zero(x, 0));
      EXPECT_TRUE(block_is_zero(x, 1));
      EXPECT_EQ(x[48], 0.0);
      const Vec o = m.OrgEmbedding(g.author_key(v).org);
      EXPECT_TRUE(std::equal(o.begin(), o.end(), x.begin() + 32));
    } else {
      const Publication& p = d.corpus.at(g.paper_id(v));
      EXPECT_FALSE(block_is_zero(x, 0));
      EXPECT_FALSE(block_is_zero(x, 2));
      if (p.abstract.empty()) {
        saw_missing = true;
        EXPECT_TRUE(block_is_zero(x, 1));
      } else {
        EXPECT_FALSE(block_is_zero(x, 1));
      }
      EXPECT_EQ(x[48], StandardizeYear(p.year, m.min_year, m.max_year));
    }
  }
  EXPECT_TRUE(saw_missing);
}

TEST(Features, DefaultWidthIs301) {
  Corpus c = ParsePublications(R"({"p": {"title": "graph mining methods", "abstract": "we study graphs",
    "authors": [{"name": "A B", "org": "CERN"}], "year": 2000}})");
  FeatureConfig fc;
  fc.title.epochs = fc.abstract.epochs = fc.org.epochs = 2;
  FeatureModels m = TrainFeatureModels(c, fc, 1);
  EXPECT_EQ(PaperFeatures(c.at("p"), m).size(), 301u);
  EXPECT_EQ(AuthorFeatures("cern", m).size(), 301u);
}

TEST(Features, CorpusWithoutAbstractsStillWorks) {
  Corpus c = ParsePublications(R"({"p": {"title": "graph mining", "authors": [{"name": "A B"}]}})");
  FeatureModels m = TrainFeatureModels(c, SmallFeatures(), 1);
  Vec x = PaperFeatures(c.at("p"), m);
  EXPECT_EQ(x.size(), 49u);
  for (std::size_t i = 16; i < 48; ++i) EXPECT_EQ(x[i], 0.0);
  EXPECT_EQ(x[48], 0.5);
}

TEST(OrgEmbedding, KnownUnseenAndEmpty) {
  Corpus c = ParsePublications(R"({
    "p": {"title": "x y", "authors": [{"name": "A", "org": "CERN"}, {"name": "B", "org": "RWTH Aachen"}]}
  })");
  FeatureModels m = TrainFeatureModels(c, SmallFeatures(), 1);
  const Vec cern = m.OrgEmbedding("cern");
  auto stored = m.org.DocVector("cern");
  ASSERT_TRUE(stored);
  EXPECT_TRUE(std::equal(cern.begin(), cern.end(), stored->begin()));
  EXPECT_EQ(m.OrgEmbedding(""), Vec(16, 0.0));
  // Unseen: mean of its known bigrams ("ce", "er"; "rx" is unknown).
  const Vec unseen = m.OrgEmbedding("cerx");
  Vec want(16, 0.0);
  Axpy(0.5, *m.org.WordVector("ce"), want);
  Axpy(0.5, *m.org.WordVector("er"), want);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(unseen[i], want[i], 1e-15);
  EXPECT_EQ(m.OrgEmbedding("qqqq"), Vec(16, 0.0));
}

TEST(OrgEmbedding, OneCharacterEditsStayCloserThanRandomPairs) {
  SynthConfig cfg;
  cfg.names = 20;
  cfg.orgs_per_profile = 2;
  SynthData d = SynthGenerate(cfg, 2);
  FeatureConfig fc;
  fc.title.epochs = fc.abstract.epochs = 1;
  fc.org.epochs = 10;
  FeatureModels m = TrainFeatureModels(d.corpus, fc, 2);
  std::vector<std::string> orgs = m.org.doc_ids();
  Rng rng(5);
  double near = 0, random = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const std::string& o = rng.Pick(orgs);
    std::string edited = o;
    edited[rng.Below(edited.size())] = static_cast<char>('a' + rng.Below(26));
    near += Cosine(m.OrgEmbedding(o), m.OrgEmbedding(edited));
    random += Cosine(m.OrgEmbedding(o), m.OrgEmbedding(rng.Pick(orgs)));
  }
  EXPECT_GT(near / trials, random / trials);
}

TEST(FeatureModels, PersistenceReproducesFeatures) {
  SynthConfig cfg;
  cfg.names = 2;
  cfg.papers_per_profile = 4;
  SynthData d = SynthGenerate(cfg, 8);
  FeatureModels m = TrainFeatureModels(d.corpus, SmallFeatures(), 8);
  FeatureModels back = FeatureModels::FromJson(Json::parse(m.ToJson().dump()));
  BipartiteGraph g = BipartiteGraph::Build(d.corpus);
  EXPECT_EQ(AssembleFeatures(g, d.corpus, m).data, AssembleFeatures(g, d.corpus, back).data);
}

}  // namespace
}  // namespace andis
