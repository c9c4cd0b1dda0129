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

// Random walks over the author-paper graph: restart walks that merge
// same-name authors, and second-order (p, q) walks feeding skip-gram node
// embeddings.

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "andis/cluster.hpp"
#include "andis/common.hpp"
#include "andis/graph.hpp"
#include "andis/sgns.hpp"

namespace andis {

struct RwrConfig {
  double alpha = 0.4;
  std::size_t epochs = 1;
  std::uint64_t walk_length = 10000;
  std::uint64_t threshold = 3;
  std::uint64_t seed = 0;

  void Validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) Fail(ErrorCode::kConfig, "rwr: alpha must lie in [0, 1]");
    if (epochs == 0) Fail(ErrorCode::kConfig, "rwr: epochs must be at least 1");
    if (walk_length == 0) Fail(ErrorCode::kConfig, "rwr: walk length must be at least 1");
    if (threshold == 0) Fail(ErrorCode::kConfig, "rwr: threshold must be at least 1");
  }
};

// Visit counts of a restart walk from `start`. Each of the `steps` steps
// either restarts (probability alpha, counting `start`) or moves author ->
// paper -> author and counts the author reached.
inline std::map<NodeId, std::uint64_t> RwrVisitCounts(const BipartiteGraph& g, NodeId start, double alpha,
                                                      std::uint64_t steps, std::uint64_t seed) {
  if (!g.is_author(start) || !g.is_live(start)) {
    Fail(ErrorCode::kInvalidArgument, "walk start " + std::to_string(start) + " is not a live author node");
  }
  if (g.degree(start) == 0) {
    Fail(ErrorCode::kInvalidArgument, "walk start " + std::to_string(start) + " has no papers");
  }
  Rng rng(seed);
  std::map<NodeId, std::uint64_t> counts;
  NodeId cur = start;
  for (std::uint64_t s = 0; s < steps; ++s) {
    if (rng.Bernoulli(alpha)) {
      cur = start;
    } else {
      std::span<const NodeId> papers = g.neighbors(cur);
      const NodeId p = papers[rng.Below(papers.size())];
      std::span<const NodeId> authors = g.neighbors(p);
      cur = authors[rng.Below(authors.size())];
    }
    ++counts[cur];
  }
  return counts;
}

struct RwrResult {
  std::size_t walks = 0;
  std::size_t merges = 0;
  std::vector<std::size_t> live_authors_per_epoch;
};

// Walks from every live author that has a live same-name peer and merges it
// with each same-name node visited more than `threshold` times. Merges apply
// immediately; later walks see the merged graph.
inline RwrResult RwrMerge(BipartiteGraph& g, const RwrConfig& config) {
  config.Validate();
  RwrResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (NodeId v = 0; v < g.num_author_slots(); ++v) {
      if (!g.is_live(v) || g.degree(v) == 0) continue;
      const std::string name = g.author_name(v);
      if (g.AuthorsNamed(name).size() < 2) continue;
      const auto counts = RwrVisitCounts(g, v, config.alpha, config.walk_length, DeriveSeed(config.seed, {epoch, v}));
      ++result.walks;
      for (const auto& [u, c] : counts) {
        if (u == v || c <= config.threshold || g.author_name(u) != name) continue;
        g.Merge(g.Resolve(v), u, epoch, c);
        ++result.merges;
      }
    }
    result.live_authors_per_epoch.push_back(g.num_live_authors());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Second-order walks.

struct Node2VecConfig {
  double p = 1.0;
  double q = 1.0;
  std::size_t walk_length = 10;
  std::size_t walks_per_node = 20;
  std::uint64_t seed = 0;

  void Validate() const {
    if (!(p > 0) || !(q > 0)) Fail(ErrorCode::kConfig, "node2vec: p and q must be positive");
    if (walk_length == 0) Fail(ErrorCode::kConfig, "node2vec: walk length must be at least 1");
  }
};

// Normalized next-step distribution from `cur` having arrived from `prev`
// (kNoNode for the first step): weight 1/p to return to prev, 1 for
// neighbors of prev, 1/q otherwise.
inline std::vector<std::pair<NodeId, double>> TransitionProbabilities(const BipartiteGraph& g, NodeId prev, NodeId cur,
                                                                      double p, double q) {
  std::vector<std::pair<NodeId, double>> out;
  double total = 0;
  for (NodeId x : g.neighbors(cur)) {
    double w = 1.0;
    if (prev != kNoNode) {
      if (x == prev) w = 1.0 / p;
      else if (!g.has_edge(prev, x)) w = 1.0 / q;
    }
    out.emplace_back(x, w);
    total += w;
  }
  for (auto& [x, w] : out) w /= total;
  return out;
}

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  std::size_t walk_length = 0;
  std::size_t walks_per_node = 0;
  double p = 1.0;
  double q = 1.0;

  // One walk per line, space-separated node ids, after a header comment.
  std::string ToText() const {
    std::ostringstream out;
    out.precision(17);
    out << "# walks length " << walk_length << " per_node " << walks_per_node << " p " << p << " q " << q << '\n';
    for (const auto& w : walks) {
      for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
      out << '\n';
    }
    return out.str();
  }

  static WalkCorpus FromText(const std::string& text) {
    WalkCorpus c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      if (line[0] == '#') {
        std::string hash, tag;
        ls >> hash;
        while (ls >> tag) {
          if (tag == "length") ls >> c.walk_length;
          else if (tag == "per_node") ls >> c.walks_per_node;
          else if (tag == "p") ls >> c.p;
          else if (tag == "q") ls >> c.q;
        }
        continue;
      }
      std::vector<NodeId> w;
      long long id;
      while (ls >> id) {
        if (id < 0 || id >= static_cast<long long>(kNoNode)) Fail(ErrorCode::kParse, "walk node id out of range");
        w.push_back(static_cast<NodeId>(id));
      }
      if (!ls.eof()) Fail(ErrorCode::kParse, "malformed walk line: " + line);
      c.walks.push_back(std::move(w));
    }
    return c;
  }
};

// `walks_per_node` rounds; each round starts one walk at every live node in
// ascending order. Isolated nodes give single-node walks.
inline WalkCorpus Node2VecWalks(const BipartiteGraph& g, const Node2VecConfig& config) {
  config.Validate();
  WalkCorpus c;
  c.walk_length = config.walk_length;
  c.walks_per_node = config.walks_per_node;
  c.p = config.p;
  c.q = config.q;
  const double inv_p = 1.0 / config.p, inv_q = 1.0 / config.q;
  std::vector<double> weights;
  for (std::size_t r = 0; r < config.walks_per_node; ++r) {
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
      if (!g.is_live(s)) continue;
      Rng rng(DeriveSeed(config.seed, "node2vec", {r, s}));
      std::vector<NodeId> walk{s};
      NodeId prev = kNoNode;
      while (walk.size() < config.walk_length) {
        const NodeId cur = walk.back();
        std::span<const NodeId> nb = g.neighbors(cur);
        if (nb.empty()) break;
        NodeId next;
        if (prev == kNoNode || (inv_p == 1.0 && inv_q == 1.0)) {
          next = nb[rng.Below(nb.size())];
        } else {
          weights.resize(nb.size());
          double total = 0;
          for (std::size_t i = 0; i < nb.size(); ++i) {
            const double w = nb[i] == prev ? inv_p : (g.has_edge(prev, nb[i]) ? 1.0 : inv_q);
            total += w;
            weights[i] = total;
          }
          const double x = rng.Uniform() * total;
          std::size_t i = static_cast<std::size_t>(std::upper_bound(weights.begin(), weights.end(), x) - weights.begin());
          next = nb[std::min(i, nb.size() - 1)];
        }
        prev = cur;
        walk.push_back(next);
      }
      c.walks.push_back(std::move(walk));
    }
  }
  return c;
}

// Dense vector per graph node; nodes absent from every walk have none.
struct NodeEmbeddings {
  static constexpr const char* kFormat = "andis-node-embeddings";
  static constexpr int kVersion = 1;

  std::size_t dim = 0;
  std::vector<double> data;
  std::vector<char> present;
  std::vector<double> epoch_loss;
  std::uint64_t seed = 0;

  std::size_t num_nodes() const { return present.size(); }
  bool has(NodeId v) const { return v < present.size() && present[v]; }

  std::span<const double> vector(NodeId v) const {
    if (!has(v)) Fail(ErrorCode::kNotFound, "no embedding for node " + std::to_string(v));
    return {data.data() + static_cast<std::size_t>(v) * dim, dim};
  }

  Json ToJson() const {
    return {{"format", kFormat}, {"version", kVersion}, {"dim", dim},     {"seed", seed},
            {"present", std::vector<int>(present.begin(), present.end())}, {"epoch_loss", epoch_loss},
            {"vectors", data}};
  }

  static NodeEmbeddings FromJson(const Json& j) {
    try {
      if (j.at("format") != kFormat) Fail(ErrorCode::kParse, "not a node embedding file");
      if (j.at("version") != kVersion) Fail(ErrorCode::kParse, "unsupported node embedding version");
      NodeEmbeddings e;
      e.dim = j.at("dim").get<std::size_t>();
      e.seed = j.at("seed").get<std::uint64_t>();
      for (int x : j.at("present").get<std::vector<int>>()) e.present.push_back(static_cast<char>(x != 0));
      e.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
      e.data = j.at("vectors").get<std::vector<double>>();
      if (e.data.size() != e.dim * e.present.size()) Fail(ErrorCode::kShapeMismatch, "node embedding table has the wrong size");
      return e;
    } catch (const Json::exception& ex) {
      Fail(ErrorCode::kParse, std::string("node embeddings: ") + ex.what());
    }
  }
};

// Node2vec-style defaults: one pass over the walks.
inline SgnsConfig DefaultNodeSgns() {
  SgnsConfig c;
  c.dim = 100;
  c.window = 5;
  c.negatives = 5;
  c.epochs = 1;
  return c;
}

inline NodeEmbeddings TrainSkipGram(const WalkCorpus& walks, std::size_t num_nodes, const SgnsConfig& config,
                                    std::uint64_t seed) {
  config.Validate();
  std::vector<std::vector<std::size_t>> seqs;
  seqs.reserve(walks.walks.size());
  NodeEmbeddings e;
  e.dim = config.dim;
  e.seed = seed;
  e.present.assign(num_nodes, 0);
  for (const auto& w : walks.walks) {
    std::vector<std::size_t> s;
    for (NodeId v : w) {
      if (v >= num_nodes) Fail(ErrorCode::kInvalidArgument, "walk visits node outside the graph");
      e.present[v] = 1;
      s.push_back(v);
    }
    seqs.push_back(std::move(s));
  }
  Rng rng(DeriveSeed(seed, "skipgram"));
  SgnsTables tables(num_nodes, num_nodes, config.dim, rng);
  SgnsReport report = TrainSkipGramSequences(tables, seqs, config, rng);
  e.epoch_loss = report.epoch_loss;
  e.data = tables.inputs();
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (!e.present[v]) std::fill_n(e.data.begin() + static_cast<std::ptrdiff_t>(v * config.dim), config.dim, 0.0);
  }
  return e;
}

// Raw cosine of two node embeddings, in [-1, 1].
inline double AuthorSimCosine(const NodeEmbeddings& emb, NodeId a, NodeId b) {
  return Cosine(emb.vector(a), emb.vector(b));
}

// Clustering scorer over embeddings: cosine rescaled to [0, 1] as
// (1 + cos) / 2, so a threshold of 0 admits every same-name pair. Items not
// located in the graph score as orthogonal (0.5).
inline SimilarityFunction EmbeddingSimilarity(const NodeEmbeddings& emb, std::string name = "node2vec") {
  return {std::move(name), [&emb](const AuthorItem& a, const AuthorItem& b) {
            if (a.node == kNoNode || b.node == kNoNode) return 0.5;
            return 0.5 * (1.0 + AuthorSimCosine(emb, a.node, b.node));
          }};
}

}  // namespace andis
