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

// Node features: paragraph vectors (PV-DBOW) for titles and abstracts, a
// character-bigram paragraph model for affiliations, and a scaled year.
//
// Feature layout: title | abstract | org | year. Author nodes fill only the
// org block.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "andis/common.hpp"
#include "andis/corpus.hpp"
#include "andis/graph.hpp"
#include "andis/sgns.hpp"

namespace andis {

// Lowercase ASCII-folded alphanumeric tokens of length >= 2.
inline std::vector<std::string> TokenizeText(std::string_view text) {
  std::vector<std::string> out;
  for (std::string& t : FoldedTokens(text)) {
    if (t.size() >= 2) out.push_back(std::move(t));
  }
  return out;
}

// Overlapping character bigrams of a normalized org key.
inline std::vector<std::string> OrgBigrams(std::string_view org_key) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < org_key.size(); ++i) out.emplace_back(org_key.substr(i, 2));
  return out;
}

struct DocModelConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 20;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  // Interleave skip-gram word training so word vectors share the document
  // space (needed to infer vectors for unseen documents).
  bool train_words = true;

  SgnsConfig Sgns() const {
    SgnsConfig c;
    c.dim = dim;
    c.window = window;
    c.negatives = negatives;
    c.epochs = epochs;
    c.learning_rate = learning_rate;
    return c;
  }
};

struct TextDocument {
  std::string id;
  std::vector<std::string> tokens;
};

class DocEmbeddingModel {
 public:
  static constexpr const char* kFormat = "andis-doc-model";
  static constexpr int kVersion = 1;

  DocEmbeddingModel() = default;

  const DocModelConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return config_.dim; }
  std::size_t num_docs() const { return doc_ids_.size(); }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<double>& epoch_loss() const { return epoch_loss_; }

  bool has_doc(const std::string& id) const { return doc_index_.count(id) > 0; }

  std::optional<std::span<const double>> DocVector(const std::string& id) const {
    auto it = doc_index_.find(id);
    if (it == doc_index_.end()) return std::nullopt;
    return tables_.in(it->second);
  }

  std::optional<std::span<const double>> WordVector(const std::string& token) const {
    auto it = word_index_.find(token);
    if (it == word_index_.end()) return std::nullopt;
    return tables_.in(doc_ids_.size() + it->second);
  }

  // Mean of the known tokens' word vectors; zero when none is known.
  Vec Infer(const std::vector<std::string>& tokens) const {
    Vec out(dim(), 0.0);
    std::size_t n = 0;
    for (const std::string& t : tokens) {
      if (auto v = WordVector(t)) {
        Axpy(1.0, *v, out);
        ++n;
      }
    }
    if (n) {
      for (double& x : out) x /= static_cast<double>(n);
    }
    return out;
  }

  // Stored vector for a known document id, otherwise inferred from tokens.
  Vec Embed(const std::string& id, const std::vector<std::string>& tokens) const {
    if (auto v = DocVector(id)) return Vec(v->begin(), v->end());
    return Infer(tokens);
  }

  // A model with no documents or words; embeds everything as zero.
  static DocEmbeddingModel Empty(const DocModelConfig& config, std::uint64_t seed) {
    DocEmbeddingModel m;
    m.config_ = config;
    m.seed_ = seed;
    m.tables_ = SgnsTables::FromData(config.dim, {}, {});
    return m;
  }

  // Documents with no tokens are skipped (they have no vector).
  static DocEmbeddingModel Train(const std::vector<TextDocument>& docs, const DocModelConfig& config,
                                 std::uint64_t seed) {
    config.Sgns().Validate();
    DocEmbeddingModel m;
    m.config_ = config;
    m.seed_ = seed;

    std::map<std::string, std::uint64_t> freq;
    for (const TextDocument& d : docs) {
      for (const std::string& t : d.tokens) ++freq[t];
    }
    for (const auto& [w, c] : freq) {
      if (c >= config.min_count) {
        m.word_index_.emplace(w, m.words_.size());
        m.words_.push_back(w);
      }
    }
    std::vector<std::vector<std::size_t>> encoded;
    for (const TextDocument& d : docs) {
      std::vector<std::size_t> ids;
      for (const std::string& t : d.tokens) {
        if (auto it = m.word_index_.find(t); it != m.word_index_.end()) ids.push_back(it->second);
      }
      if (ids.empty()) continue;
      if (m.doc_index_.count(d.id)) Fail(ErrorCode::kInvalidArgument, "duplicate document id " + d.id);
      m.doc_index_.emplace(d.id, m.doc_ids_.size());
      m.doc_ids_.push_back(d.id);
      encoded.push_back(std::move(ids));
    }
    if (encoded.empty()) Fail(ErrorCode::kInvalidArgument, "all documents are empty");

    Rng rng(DeriveSeed(seed, "pv-dbow"));
    const std::size_t nd = m.doc_ids_.size();
    m.tables_ = SgnsTables(nd + m.words_.size(), m.words_.size(), config.dim, rng);
    std::vector<std::uint64_t> counts(m.words_.size(), 0);
    std::uint64_t tokens = 0;
    for (const auto& ids : encoded) {
      for (std::size_t id : ids) ++counts[id];
      tokens += ids.size();
    }
    UnigramSampler sampler(counts, 0.75);
    const SgnsConfig sg = config.Sgns();
    const std::uint64_t total = tokens * config.epochs;
    std::uint64_t done = 0;
    std::vector<std::size_t> order(nd);
    for (std::size_t i = 0; i < nd; ++i) order[i] = i;
    for (std::size_t e = 0; e < config.epochs; ++e) {
      rng.Shuffle(order);
      double sum = 0;
      std::uint64_t n = 0;
      for (std::size_t d : order) {
        const auto& ids = encoded[d];
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const double lr = DecayedRate(sg, done++, total);
          sum += m.tables_.Step(d, ids[i], sampler, config.negatives, lr, rng);
          ++n;
          if (!config.train_words) continue;
          const std::size_t lo = i > config.window ? i - config.window : 0;
          const std::size_t hi = std::min(ids.size(), i + config.window + 1);
          for (std::size_t j = lo; j < hi; ++j) {
            if (j != i) m.tables_.Step(nd + ids[i], ids[j], sampler, config.negatives, lr, rng);
          }
        }
      }
      m.epoch_loss_.push_back(n ? sum / static_cast<double>(n) : 0.0);
    }
    return m;
  }

  Json ToJson() const {
    Json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["seed"] = seed_;
    j["config"] = {{"dim", config_.dim},       {"window", config_.window},
                   {"negatives", config_.negatives}, {"epochs", config_.epochs},
                   {"learning_rate", config_.learning_rate}, {"min_count", config_.min_count},
                   {"train_words", config_.train_words}};
    j["words"] = words_;
    j["docs"] = doc_ids_;
    j["epoch_loss"] = epoch_loss_;
    j["inputs"] = tables_.inputs();
    j["outputs"] = tables_.outputs();
    return j;
  }

  static DocEmbeddingModel FromJson(const Json& j) {
    try {
      if (j.at("format") != kFormat) Fail(ErrorCode::kParse, "not a document model");
      if (j.at("version") != kVersion) Fail(ErrorCode::kParse, "unsupported document model version");
      DocEmbeddingModel m;
      m.seed_ = j.at("seed").get<std::uint64_t>();
      const Json& c = j.at("config");
      m.config_.dim = c.at("dim").get<std::size_t>();
      m.config_.window = c.at("window").get<std::size_t>();
      m.config_.negatives = c.at("negatives").get<std::size_t>();
      m.config_.epochs = c.at("epochs").get<std::size_t>();
      m.config_.learning_rate = c.at("learning_rate").get<double>();
      m.config_.min_count = c.at("min_count").get<std::size_t>();
      m.config_.train_words = c.at("train_words").get<bool>();
      m.words_ = j.at("words").get<std::vector<std::string>>();
      m.doc_ids_ = j.at("docs").get<std::vector<std::string>>();
      m.epoch_loss_ = j.at("epoch_loss").get<std::vector<double>>();
      for (std::size_t i = 0; i < m.words_.size(); ++i) m.word_index_.emplace(m.words_[i], i);
      for (std::size_t i = 0; i < m.doc_ids_.size(); ++i) m.doc_index_.emplace(m.doc_ids_[i], i);
      m.tables_ = SgnsTables::FromData(m.config_.dim, j.at("inputs").get<std::vector<double>>(),
                                       j.at("outputs").get<std::vector<double>>());
      if (m.tables_.num_inputs() != m.doc_ids_.size() + m.words_.size() ||
          m.tables_.num_outputs() != m.words_.size()) {
        Fail(ErrorCode::kShapeMismatch, "document model tables do not match its vocabulary");
      }
      return m;
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse, std::string("document model: ") + e.what());
    }
  }

 private:
  DocModelConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> words_;
  std::map<std::string, std::size_t> word_index_;
  std::vector<std::string> doc_ids_;
  std::map<std::string, std::size_t> doc_index_;
  SgnsTables tables_;
  std::vector<double> epoch_loss_;
};

// Min-max scaled year clipped to [0, 1]; absent years map to 0.5.
inline double StandardizeYear(std::optional<int> year, int min_year, int max_year) {
  if (!year) return 0.5;
  if (max_year <= min_year) return *year < min_year ? 0.0 : (*year > min_year ? 1.0 : 0.5);
  const double v = static_cast<double>(*year - min_year) / static_cast<double>(max_year - min_year);
  return std::clamp(v, 0.0, 1.0);
}

struct FeatureConfig {
  DocModelConfig title;
  DocModelConfig abstract;
  DocModelConfig org;
};

// The three trained text models plus the year range they were fit on.
struct FeatureModels {
  DocEmbeddingModel title;
  DocEmbeddingModel abstract;
  DocEmbeddingModel org;
  int min_year = 0;
  int max_year = 0;

  std::size_t block() const { return title.dim(); }
  std::size_t dim() const { return 3 * block() + 1; }

  // Vector for a normalized org key: trained if known, else the mean of its
  // known bigram vectors; zero for the empty org.
  Vec OrgEmbedding(const std::string& org_key) const {
    if (org_key.empty()) return Vec(org.dim(), 0.0);
    return org.Embed(org_key, OrgBigrams(org_key));
  }

  Json ToJson() const {
    return {{"format", "andis-feature-models"}, {"version", 1},        {"min_year", min_year},
            {"max_year", max_year},             {"title", title.ToJson()}, {"abstract", abstract.ToJson()},
            {"org", org.ToJson()}};
  }

  static FeatureModels FromJson(const Json& j) {
    try {
      if (j.at("format") != "andis-feature-models") Fail(ErrorCode::kParse, "not a feature model file");
      FeatureModels m;
      m.min_year = j.at("min_year").get<int>();
      m.max_year = j.at("max_year").get<int>();
      m.title = DocEmbeddingModel::FromJson(j.at("title"));
      m.abstract = DocEmbeddingModel::FromJson(j.at("abstract"));
      m.org = DocEmbeddingModel::FromJson(j.at("org"));
      if (m.title.dim() != m.abstract.dim() || m.title.dim() != m.org.dim()) {
        Fail(ErrorCode::kShapeMismatch, "feature models disagree on dimension");
      }
      return m;
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse, std::string("feature models: ") + e.what());
    }
  }
};

inline FeatureModels TrainFeatureModels(const Corpus& corpus, const FeatureConfig& config, std::uint64_t seed) {
  if (config.title.dim != config.abstract.dim || config.title.dim != config.org.dim) {
    Fail(ErrorCode::kConfig, "title, abstract and org embeddings must share a dimension");
  }
  std::vector<TextDocument> titles, abstracts, orgs;
  std::set<std::string> org_keys;
  FeatureModels m;
  bool have_year = false;
  for (const auto& [id, pub] : corpus.pubs) {
    titles.push_back({id, TokenizeText(pub.title)});
    abstracts.push_back({id, TokenizeText(pub.abstract)});
    for (const AuthorRef& a : pub.authors) {
      std::string k = NormalizeOrg(a.raw_org);
      if (!k.empty()) org_keys.insert(std::move(k));
    }
    if (pub.year) {
      m.min_year = have_year ? std::min(m.min_year, *pub.year) : *pub.year;
      m.max_year = have_year ? std::max(m.max_year, *pub.year) : *pub.year;
      have_year = true;
    }
  }
  for (const std::string& k : org_keys) orgs.push_back({k, OrgBigrams(k)});
  auto train_or_empty = [&](const std::vector<TextDocument>& docs, const DocModelConfig& c, const char* tag) {
    bool any = false;
    for (const TextDocument& d : docs) any |= !d.tokens.empty();
    if (!any) {
      // A field absent from the whole corpus: an untrained model of the right
      // width that embeds everything as zero.
      return DocEmbeddingModel::Empty(c, DeriveSeed(seed, tag));
    }
    return DocEmbeddingModel::Train(docs, c, DeriveSeed(seed, tag));
  };
  m.title = train_or_empty(titles, config.title, "title");
  m.abstract = train_or_empty(abstracts, config.abstract, "abstract");
  m.org = train_or_empty(orgs, config.org, "org");
  return m;
}

// Paper feature vector: title, abstract, the mean of its authors' org
// embeddings, and the scaled year.
inline Vec PaperFeatures(const Publication& pub, const FeatureModels& m) {
  const std::size_t b = m.block();
  Vec x(m.dim(), 0.0);
  const Vec t = m.title.Embed(pub.id, TokenizeText(pub.title));
  const Vec a = m.abstract.Embed(pub.id, TokenizeText(pub.abstract));
  std::copy(t.begin(), t.end(), x.begin());
  std::copy(a.begin(), a.end(), x.begin() + static_cast<std::ptrdiff_t>(b));
  std::size_t n = 0;
  Vec org(b, 0.0);
  for (const AuthorRef& ref : pub.authors) {
    const std::string k = NormalizeOrg(ref.raw_org);
    if (k.empty()) continue;
    Axpy(1.0, m.OrgEmbedding(k), org);
    ++n;
  }
  for (std::size_t i = 0; i < b && n; ++i) x[2 * b + i] = org[i] / static_cast<double>(n);
  x[3 * b] = StandardizeYear(pub.year, m.min_year, m.max_year);
  return x;
}

inline Vec AuthorFeatures(const std::string& org_key, const FeatureModels& m) {
  const std::size_t b = m.block();
  Vec x(m.dim(), 0.0);
  const Vec o = m.OrgEmbedding(org_key);
  std::copy(o.begin(), o.end(), x.begin() + static_cast<std::ptrdiff_t>(2 * b));
  return x;
}

// Row-major feature matrix indexed by graph node id.
struct NodeFeatures {
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t rows() const { return dim ? data.size() / dim : 0; }
  std::span<const double> row(NodeId v) const { return {data.data() + static_cast<std::size_t>(v) * dim, dim}; }
  std::span<double> row(NodeId v) { return {data.data() + static_cast<std::size_t>(v) * dim, dim}; }
};

inline NodeFeatures AssembleFeatures(const BipartiteGraph& g, const Corpus& corpus, const FeatureModels& m) {
  NodeFeatures f;
  f.dim = m.dim();
  f.data.assign(g.num_nodes() * f.dim, 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const Vec x = g.is_author(v) ? AuthorFeatures(g.author_key(v).org, m) : PaperFeatures(corpus.at(g.paper_id(v)), m);
    std::copy(x.begin(), x.end(), f.row(v).begin());
  }
  return f;
}

}  // namespace andis
