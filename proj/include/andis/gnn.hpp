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

// Graph neural encoders over the author-paper graph and the two training
// regimes built on them: an unsupervised margin loss over walk neighbors and
// a supervised Siamese pair classifier. Forward and backward passes are
// written out by hand at double precision.
//
// Encoder, for every layer l = 1..L and node v:
//   m_u   = relu(Wn_l h_u)                        message from neighbor u
//   p_v   = sum_u w_vu m_u                        pooled (zero with no neighbors)
//   h_v  <- relu(Ws_l [h_v ; p_v])
// with h^0 = P x and z = h^L / |h^L|. The architectures differ only in which
// neighbors are pooled and with what weights.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "andis/cluster.hpp"
#include "andis/common.hpp"
#include "andis/corpus.hpp"
#include "andis/graph.hpp"
#include "andis/textfeat.hpp"

namespace andis {

enum class GnnArch { kGcn, kGraphSage, kPinSage, kMlp };

inline const char* GnnArchName(GnnArch a) {
  switch (a) {
    case GnnArch::kGcn: return "gcn";
    case GnnArch::kGraphSage: return "graphsage";
    case GnnArch::kPinSage: return "pinsage";
    case GnnArch::kMlp: return "mlp";
  }
  return "unknown";
}

inline GnnArch ParseGnnArch(const std::string& s) {
  for (GnnArch a : {GnnArch::kGcn, GnnArch::kGraphSage, GnnArch::kPinSage, GnnArch::kMlp}) {
    if (s == GnnArchName(a)) return a;
  }
  Fail(ErrorCode::kConfig, "unknown gnn architecture '" + s + "'");
}

// kMaxMargin: max(0, zs.zn - zs.zd + delta). kPaperLiteral keeps the sign
// convention max(0, zs.zd - zs.zn - delta).
enum class HingeMode { kMaxMargin, kPaperLiteral };

inline const char* HingeModeName(HingeMode m) {
  return m == HingeMode::kMaxMargin ? "max-margin" : "paper-literal";
}

inline HingeMode ParseHingeMode(const std::string& s) {
  if (s == "max-margin") return HingeMode::kMaxMargin;
  if (s == "paper-literal") return HingeMode::kPaperLiteral;
  Fail(ErrorCode::kConfig, "unknown hinge mode '" + s + "'");
}

struct GnnConfig {
  GnnArch arch = GnnArch::kPinSage;
  std::size_t hidden = 64;
  std::size_t out = 64;
  std::size_t layers = 2;
  std::vector<std::size_t> fanouts = {10, 5};
  std::size_t gcn_cap = 256;
  std::size_t head_hidden = 64;
  double learning_rate = 0.05;
  std::size_t batch = 128;
  std::size_t epochs = 20;
  double delta = 0.02;
  HingeMode hinge = HingeMode::kMaxMargin;
  double negative_ratio = 1.0;
  // PinSage importance: expected neighbor visits of a short restart walk.
  std::size_t importance_steps = 3;
  double importance_restart = 0.5;
  // Coordinates compared by the pre-training gradient check (0 disables it).
  std::size_t grad_check_coords = 24;
  std::uint64_t seed = 0;

  void Validate() const {
    auto bad = [](const std::string& m) { Fail(ErrorCode::kConfig, "gnn: " + m); };
    if (hidden == 0 || out == 0 || head_hidden == 0) bad("widths must be positive");
    if (layers < 1 || layers > 2) bad("layers must be 1 or 2");
    if (fanouts.size() != layers) bad("need one fanout per layer");
    for (std::size_t f : fanouts) {
      if (f == 0) bad("fanouts must be positive");
    }
    if (gcn_cap == 0) bad("gcn_cap must be positive");
    if (!(learning_rate > 0)) bad("learning rate must be positive");
    if (batch == 0) bad("batch must be positive");
    if (epochs == 0) bad("epochs must be positive");
    if (!(delta >= 0)) bad("delta must be nonnegative");
    if (!(negative_ratio > 0)) bad("negative ratio must be positive");
    if (!(importance_restart > 0 && importance_restart < 1)) bad("importance_restart must lie in (0, 1)");
    if (importance_steps == 0) bad("importance_steps must be positive");
  }
};

// ---------------------------------------------------------------------------
// Parameters

struct ParamBlock {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

class GnnParams {
 public:
  GnnArch arch = GnnArch::kPinSage;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;
  std::size_t layers = 0;
  std::size_t head_hidden = 0;  // 0 without a Siamese head
  std::uint64_t seed = 0;
  std::vector<ParamBlock> blocks;
  Vec data;

  // Layout: "input" is stored feature-major (input_dim x hidden) so that
  // sparse inputs touch contiguous rows. Layer and head matrices are
  // (out x in), row-major.
  static GnnParams Init(std::size_t input_dim, const GnnConfig& c, bool with_head, std::uint64_t seed) {
    c.Validate();
    if (input_dim == 0) Fail(ErrorCode::kShapeMismatch, "gnn: input dimension must be positive");
    GnnParams p;
    p.arch = c.arch;
    p.input_dim = input_dim;
    p.hidden = c.hidden;
    p.out = c.out;
    p.layers = c.layers;
    p.head_hidden = with_head ? c.head_hidden : 0;
    p.seed = seed;
    p.Layout();
    Rng rng(seed);
    for (const ParamBlock& b : p.blocks) {
      if (b.cols == 1) continue;  // biases start at zero
      const std::size_t fan_in = b.name == "input" ? b.rows : b.cols;
      const std::size_t fan_out = b.name == "input" ? b.cols : b.rows;
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (std::size_t i = 0; i < b.size(); ++i) p.data[b.offset + i] = rng.Uniform(-limit, limit);
    }
    return p;
  }

  std::size_t layer_out(std::size_t l) const { return l == layers ? out : hidden; }
  bool has_head() const { return head_hidden > 0; }

  const ParamBlock& info(const std::string& name) const {
    for (const ParamBlock& b : blocks) {
      if (b.name == name) return b;
    }
    Fail(ErrorCode::kNotFound, "gnn: no parameter block " + name);
  }
  std::span<double> block(const std::string& name) {
    const ParamBlock& b = info(name);
    return {data.data() + b.offset, b.size()};
  }
  std::span<const double> block(const std::string& name) const {
    const ParamBlock& b = info(name);
    return {data.data() + b.offset, b.size()};
  }

  std::uint64_t Checksum() const { return ChecksumDoubles(data); }

  Json ToJson(std::uint64_t data_checksum = 0) const {
    Json shapes = Json::array();
    for (const ParamBlock& b : blocks) shapes.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}});
    return {{"format", "andis-gnn-params"},
            {"version", 1},
            {"arch", GnnArchName(arch)},
            {"input_dim", input_dim},
            {"hidden", hidden},
            {"out", out},
            {"layers", layers},
            {"head_hidden", head_hidden},
            {"seed", seed},
            {"data_checksum", HexU64(data_checksum)},
            {"params_checksum", HexU64(Checksum())},
            {"blocks", shapes},
            {"data", data}};
  }

  static GnnParams FromJson(const Json& j, GnnArch expected) {
    GnnParams p;
    try {
      if (j.at("format") != "andis-gnn-params") Fail(ErrorCode::kParse, "not a gnn parameter file");
      p.arch = ParseGnnArch(j.at("arch").get<std::string>());
      if (p.arch != expected) {
        Fail(ErrorCode::kShapeMismatch, std::string("gnn parameters were trained for ") + GnnArchName(p.arch) +
                                            ", not " + GnnArchName(expected));
      }
      p.input_dim = j.at("input_dim").get<std::size_t>();
      p.hidden = j.at("hidden").get<std::size_t>();
      p.out = j.at("out").get<std::size_t>();
      p.layers = j.at("layers").get<std::size_t>();
      p.head_hidden = j.at("head_hidden").get<std::size_t>();
      p.seed = j.at("seed").get<std::uint64_t>();
      p.Layout();
      const Json& shapes = j.at("blocks");
      if (shapes.size() != p.blocks.size()) Fail(ErrorCode::kShapeMismatch, "gnn: block count mismatch");
      for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        if (shapes[i].at("name") != p.blocks[i].name || shapes[i].at("rows") != p.blocks[i].rows ||
            shapes[i].at("cols") != p.blocks[i].cols) {
          Fail(ErrorCode::kShapeMismatch, "gnn: block " + p.blocks[i].name + " has the wrong shape");
        }
      }
      Vec d = j.at("data").get<Vec>();
      if (d.size() != p.data.size()) Fail(ErrorCode::kShapeMismatch, "gnn: parameter count mismatch");
      p.data = std::move(d);
      if (!AllFinite(p.data)) Fail(ErrorCode::kDataIntegrity, "gnn: non-finite parameters");
      if (j.contains("params_checksum") && j.at("params_checksum") != HexU64(p.Checksum())) {
        Fail(ErrorCode::kDataIntegrity, "gnn: parameter checksum mismatch");
      }
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse, std::string("gnn parameters: ") + e.what());
    }
    return p;
  }

 private:
  void Layout() {
    if (layers < 1 || layers > 2) Fail(ErrorCode::kShapeMismatch, "gnn: layers must be 1 or 2");
    blocks.clear();
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
      blocks.push_back({std::move(name), rows, cols, offset});
      offset += rows * cols;
    };
    add("input", input_dim, hidden);
    for (std::size_t l = 1; l <= layers; ++l) {
      add("neigh" + std::to_string(l), hidden, hidden);
      add("self" + std::to_string(l), layer_out(l), 2 * hidden);
    }
    if (has_head()) {
      add("head_w", head_hidden, 2 * out);
      add("head_b", head_hidden, 1);
      add("out_w", 2, head_hidden);
      add("out_b", 2, 1);
    }
    data.assign(offset, 0.0);
  }
};

namespace detail {

// y = W x for row-major W (rows x cols).
inline void MatVec(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double s = 0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

// dx += W^T g and dW += g x^T.
inline void MatVecBackward(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* g,
                           double* dx, double* dw) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const double* row = w + r * cols;
    double* drow = dw + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      if (dx) dx[c] += row[c] * gr;
      drow[c] += gr * x[c];
    }
  }
}

inline double Relu(double x) { return x > 0 ? x : 0.0; }

// Tracks the smallest nonzero |value| among quantities whose derivative
// jumps at zero. Exact zeros come from all-zero inputs and stay put under
// perturbation, so they are not kinks.
inline void NoteKink(double* kink, double value) {
  if (kink && value != 0.0) *kink = std::min(*kink, std::abs(value));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Neighborhoods

struct WeightedNeighbor {
  NodeId node = kNoNode;
  double weight = 0.0;
};

// Which neighbors a node pools at a given hop (0 = the target's own
// neighbors), and with what weights. Samples are a pure function of
// (seed, hop, node), so a node aggregates identically wherever it appears
// in a batch.
class NeighborSampler {
 public:
  NeighborSampler(const BipartiteGraph& g, const GnnConfig& c) : g_(&g), c_(c) {
    c_.Validate();
    if (c_.arch == GnnArch::kPinSage) ComputeImportance();
  }

  const BipartiteGraph& graph() const { return *g_; }
  const GnnConfig& config() const { return c_; }

  std::vector<WeightedNeighbor> Sample(NodeId v, std::size_t hop, std::uint64_t seed) const {
    std::vector<WeightedNeighbor> out;
    if (c_.arch == GnnArch::kMlp) return out;
    const std::span<const NodeId> nbrs = g_->neighbors(v);
    if (nbrs.empty()) return out;
    const std::size_t fanout = c_.fanouts.at(std::min(hop, c_.fanouts.size() - 1));
    switch (c_.arch) {
      case GnnArch::kGraphSage: {
        const std::vector<NodeId> pick = Uniform(nbrs, fanout, DeriveSeed(seed, {hop, v}));
        for (NodeId u : pick) out.push_back({u, 1.0 / static_cast<double>(pick.size())});
        break;
      }
      case GnnArch::kGcn: {
        const std::vector<NodeId> pick = Uniform(nbrs, c_.gcn_cap, DeriveSeed(seed, {hop, v}));
        const double dv = static_cast<double>(nbrs.size()) + 1.0;
        for (NodeId u : pick) {
          const double du = static_cast<double>(g_->degree(u)) + 1.0;
          out.push_back({u, 1.0 / std::sqrt(dv * du)});
        }
        break;
      }
      case GnnArch::kPinSage: {
        const auto& ranked = importance_.at(v);
        const std::size_t k = std::min(fanout, ranked.size());
        double total = 0;
        for (std::size_t i = 0; i < k; ++i) total += ranked[i].weight;
        for (std::size_t i = 0; i < k; ++i) out.push_back({ranked[i].node, ranked[i].weight / total});
        break;
      }
      case GnnArch::kMlp: break;
    }
    return out;
  }

  // Neighbors of v ranked by expected walk visits (PinSage only).
  const std::vector<WeightedNeighbor>& Importance(NodeId v) const { return importance_.at(v); }

 private:
  static std::vector<NodeId> Uniform(std::span<const NodeId> nbrs, std::size_t k, std::uint64_t seed) {
    std::vector<NodeId> all(nbrs.begin(), nbrs.end());
    if (all.size() <= k) return all;
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.Below(all.size() - i));
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }

  // Expected visits of a restart walk from v over `importance_steps` steps,
  // computed exactly. Contributions are summed in sorted order so that the
  // result does not depend on node numbering.
  void ComputeImportance() {
    const BipartiteGraph& g = *g_;
    const double a = c_.importance_restart;
    importance_.assign(g.num_nodes(), {});
    std::vector<std::pair<NodeId, double>> terms;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const std::span<const NodeId> nbrs = g.neighbors(v);
      if (nbrs.empty()) continue;
      std::vector<std::pair<NodeId, double>> dist = {{v, 1.0}};
      std::map<NodeId, double> visits;
      for (NodeId u : nbrs) visits[u] = 0.0;
      for (std::size_t t = 0; t < c_.importance_steps; ++t) {
        terms.clear();
        terms.emplace_back(v, a);
        for (const auto& [x, m] : dist) {
          const std::span<const NodeId> here = g.neighbors(x);
          const double share = (1 - a) * m / static_cast<double>(here.size());
          for (NodeId u : here) terms.emplace_back(u, share);
        }
        std::sort(terms.begin(), terms.end());
        dist.clear();
        for (const auto& [u, m] : terms) {
          if (dist.empty() || dist.back().first != u) {
            dist.emplace_back(u, m);
          } else {
            dist.back().second += m;
          }
        }
        for (const auto& [u, m] : dist) {
          if (auto it = visits.find(u); it != visits.end()) it->second += m;
        }
      }
      auto& ranked = importance_[v];
      for (const auto& [u, w] : visits) ranked.push_back({u, w});
      std::sort(ranked.begin(), ranked.end(), [](const WeightedNeighbor& x, const WeightedNeighbor& y) {
        return x.weight != y.weight ? x.weight > y.weight : x.node < y.node;
      });
    }
  }

  const BipartiteGraph* g_;
  GnnConfig c_;
  std::vector<std::vector<WeightedNeighbor>> importance_;
};

// Layered sample around one node: layers[0] = {node}; layers[i] holds the
// pooled neighbors of every layers[i-1] entry, parent[i][j] pointing back.
struct Neighborhood {
  std::vector<std::vector<NodeId>> layers;
  std::vector<std::vector<std::size_t>> parent;
};

inline Neighborhood SampleNeighborhood(const NeighborSampler& sampler, NodeId node, std::uint64_t seed) {
  Neighborhood n;
  n.layers.push_back({node});
  n.parent.push_back({0});
  for (std::size_t hop = 0; hop < sampler.config().layers; ++hop) {
    std::vector<NodeId> next;
    std::vector<std::size_t> parent;
    for (std::size_t i = 0; i < n.layers.back().size(); ++i) {
      for (const WeightedNeighbor& w : sampler.Sample(n.layers.back()[i], hop, seed)) {
        next.push_back(w.node);
        parent.push_back(i);
      }
    }
    n.layers.push_back(std::move(next));
    n.parent.push_back(std::move(parent));
  }
  return n;
}

// Deduplicated computation graph for a set of target nodes. level[L] holds
// the targets; level[k-1] holds every node whose layer-(k-1) state feeds a
// level[k] node.
struct GnnPlan {
  std::size_t layers = 0;
  std::vector<std::vector<NodeId>> level;
  std::vector<std::vector<std::size_t>> self;  // k >= 1: index into level[k-1]
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> nbrs;
  std::vector<std::vector<char>> source;  // k >= 1: level[k-1] entry sends a message

  std::size_t target_index(NodeId v) const {
    const auto& t = level[layers];
    auto it = std::find(t.begin(), t.end(), v);
    if (it == t.end()) Fail(ErrorCode::kNotFound, "node " + std::to_string(v) + " is not a plan target");
    return static_cast<std::size_t>(it - t.begin());
  }
};

inline GnnPlan BuildPlan(const NeighborSampler& sampler, const std::vector<NodeId>& targets, std::uint64_t seed) {
  const BipartiteGraph& g = sampler.graph();
  const std::size_t L = sampler.config().layers;
  GnnPlan plan;
  plan.layers = L;
  plan.level.assign(L + 1, {});
  plan.self.assign(L + 1, {});
  plan.nbrs.assign(L + 1, {});
  plan.source.assign(L + 1, {});
  std::unordered_map<NodeId, std::size_t> index;
  for (NodeId v : targets) {
    if (v >= g.num_nodes()) Fail(ErrorCode::kNotFound, "gnn: node " + std::to_string(v) + " is not in the graph");
    if (index.emplace(v, plan.level[L].size()).second) plan.level[L].push_back(v);
  }
  for (std::size_t k = L; k >= 1; --k) {
    std::unordered_map<NodeId, std::size_t> below;
    auto slot = [&](NodeId u) {
      auto [it, fresh] = below.emplace(u, plan.level[k - 1].size());
      if (fresh) {
        plan.level[k - 1].push_back(u);
        plan.source[k].push_back(0);
      }
      return it->second;
    };
    const std::size_t hop = L - k;
    for (NodeId v : plan.level[k]) {
      plan.self[k].push_back(slot(v));
      std::vector<std::pair<std::size_t, double>> pooled;
      for (const WeightedNeighbor& w : sampler.Sample(v, hop, seed)) {
        const std::size_t j = slot(w.node);
        plan.source[k][j] = 1;
        pooled.emplace_back(j, w.weight);
      }
      plan.nbrs[k].push_back(std::move(pooled));
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Encoder

struct GnnForward {
  GnnPlan plan;
  std::vector<Vec> h;     // h[k]: |level k| x width(k)
  std::vector<Vec> mpre;  // k >= 1: |level k-1| x hidden, message pre-activations
  std::vector<Vec> pool;  // k >= 1: |level k| x hidden
  std::vector<Vec> pre;   // k >= 1: |level k| x width(k)
  Vec norm;               // per target
  Vec z;                  // |targets| x out, unit length (or zero)

  std::span<const double> embedding(std::size_t target) const {
    const std::size_t d = norm.empty() ? 0 : z.size() / norm.size();
    return {z.data() + target * d, d};
  }
};

inline std::size_t LayerWidth(const GnnParams& p, std::size_t k) { return k == 0 ? p.hidden : p.layer_out(k); }

inline GnnForward Encode(const GnnParams& p, const NodeFeatures& x, GnnPlan plan, double* kink = nullptr) {
  if (x.dim != p.input_dim) {
    Fail(ErrorCode::kShapeMismatch, "gnn: features have width " + std::to_string(x.dim) + ", parameters expect " +
                                        std::to_string(p.input_dim));
  }
  if (plan.layers != p.layers) Fail(ErrorCode::kShapeMismatch, "gnn: plan depth differs from parameters");
  const std::size_t L = p.layers, H = p.hidden;
  GnnForward f;
  f.h.assign(L + 1, {});
  f.mpre.assign(L + 1, {});
  f.pool.assign(L + 1, {});
  f.pre.assign(L + 1, {});
  const double* in = p.block("input").data();
  f.h[0].assign(plan.level[0].size() * H, 0.0);
  for (std::size_t i = 0; i < plan.level[0].size(); ++i) {
    const NodeId v = plan.level[0][i];
    if (v >= x.rows()) Fail(ErrorCode::kShapeMismatch, "gnn: no features for node " + std::to_string(v));
    const std::span<const double> xv = x.row(v);
    double* hv = f.h[0].data() + i * H;
    for (std::size_t j = 0; j < xv.size(); ++j) {
      if (xv[j] == 0.0) continue;
      const double* row = in + j * H;
      for (std::size_t c = 0; c < H; ++c) hv[c] += xv[j] * row[c];
    }
  }
  Vec cat(2 * H);
  for (std::size_t k = 1; k <= L; ++k) {
    const std::size_t W = LayerWidth(p, k);
    const double* wn = p.block("neigh" + std::to_string(k)).data();
    const double* ws = p.block("self" + std::to_string(k)).data();
    const std::size_t below = plan.level[k - 1].size();
    f.mpre[k].assign(below * H, 0.0);
    for (std::size_t j = 0; j < below; ++j) {
      if (!plan.source[k][j]) continue;
      double* m = f.mpre[k].data() + j * H;
      detail::MatVec(wn, H, H, f.h[k - 1].data() + j * H, m);
      for (std::size_t c = 0; c < H; ++c) detail::NoteKink(kink, m[c]);
    }
    const std::size_t n = plan.level[k].size();
    f.pool[k].assign(n * H, 0.0);
    f.pre[k].assign(n * W, 0.0);
    f.h[k].assign(n * W, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* pv = f.pool[k].data() + i * H;
      for (const auto& [j, w] : plan.nbrs[k][i]) {
        const double* m = f.mpre[k].data() + j * H;
        for (std::size_t c = 0; c < H; ++c) pv[c] += w * detail::Relu(m[c]);
      }
      const double* hs = f.h[k - 1].data() + plan.self[k][i] * H;
      std::copy(hs, hs + H, cat.begin());
      std::copy(pv, pv + H, cat.begin() + static_cast<std::ptrdiff_t>(H));
      double* a = f.pre[k].data() + i * W;
      detail::MatVec(ws, W, 2 * H, cat.data(), a);
      double* hv = f.h[k].data() + i * W;
      for (std::size_t c = 0; c < W; ++c) {
        detail::NoteKink(kink, a[c]);
        hv[c] = detail::Relu(a[c]);
      }
    }
  }
  const std::size_t n = plan.level[L].size(), D = p.out;
  f.norm.assign(n, 0.0);
  f.z.assign(n * D, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> hv(f.h[L].data() + i * D, D);
    const double nn = Norm(hv);
    f.norm[i] = nn;
    detail::NoteKink(kink, nn);
    if (nn > 0) {
      for (std::size_t c = 0; c < D; ++c) f.z[i * D + c] = hv[c] / nn;
    }
  }
  f.plan = std::move(plan);
  return f;
}

// Accumulates d(loss)/d(params) into `grad` given d(loss)/dz for every target.
inline void EncodeBackward(const GnnParams& p, const NodeFeatures& x, const GnnForward& f, const Vec& dz, Vec& grad) {
  const GnnPlan& plan = f.plan;
  const std::size_t L = p.layers, H = p.hidden, D = p.out;
  std::vector<Vec> dh(L + 1);
  const std::size_t n = plan.level[L].size();
  dh[L].assign(n * D, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.norm[i] <= 0) continue;
    const double* z = f.z.data() + i * D;
    const double* g = dz.data() + i * D;
    double zg = 0;
    for (std::size_t c = 0; c < D; ++c) zg += z[c] * g[c];
    for (std::size_t c = 0; c < D; ++c) dh[L][i * D + c] = (g[c] - z[c] * zg) / f.norm[i];
  }
  Vec cat(2 * H), dcat(2 * H), da, dm(H);
  for (std::size_t k = L; k >= 1; --k) {
    const std::size_t W = LayerWidth(p, k);
    const ParamBlock& bn = p.info("neigh" + std::to_string(k));
    const ParamBlock& bs = p.info("self" + std::to_string(k));
    const double* wn = p.data.data() + bn.offset;
    const double* ws = p.data.data() + bs.offset;
    double* gwn = grad.data() + bn.offset;
    double* gws = grad.data() + bs.offset;
    const std::size_t below = plan.level[k - 1].size();
    dh[k - 1].assign(below * H, 0.0);
    Vec dmsg(below * H, 0.0);
    da.assign(W, 0.0);
    for (std::size_t i = 0; i < plan.level[k].size(); ++i) {
      const double* a = f.pre[k].data() + i * W;
      const double* g = dh[k].data() + i * W;
      bool any = false;
      for (std::size_t c = 0; c < W; ++c) {
        da[c] = a[c] > 0 ? g[c] : 0.0;
        any |= da[c] != 0.0;
      }
      if (!any) continue;
      const double* hs = f.h[k - 1].data() + plan.self[k][i] * H;
      const double* pv = f.pool[k].data() + i * H;
      std::copy(hs, hs + H, cat.begin());
      std::copy(pv, pv + H, cat.begin() + static_cast<std::ptrdiff_t>(H));
      std::fill(dcat.begin(), dcat.end(), 0.0);
      detail::MatVecBackward(ws, W, 2 * H, cat.data(), da.data(), dcat.data(), gws);
      double* dself = dh[k - 1].data() + plan.self[k][i] * H;
      for (std::size_t c = 0; c < H; ++c) dself[c] += dcat[c];
      for (const auto& [j, w] : plan.nbrs[k][i]) {
        double* d = dmsg.data() + j * H;
        for (std::size_t c = 0; c < H; ++c) d[c] += w * dcat[H + c];
      }
    }
    for (std::size_t j = 0; j < below; ++j) {
      if (!plan.source[k][j]) continue;
      const double* m = f.mpre[k].data() + j * H;
      bool any = false;
      for (std::size_t c = 0; c < H; ++c) {
        dm[c] = m[c] > 0 ? dmsg[j * H + c] : 0.0;
        any |= dm[c] != 0.0;
      }
      if (!any) continue;
      detail::MatVecBackward(wn, H, H, f.h[k - 1].data() + j * H, dm.data(), dh[k - 1].data() + j * H, gwn);
    }
  }
  double* gin = grad.data() + p.info("input").offset;
  for (std::size_t i = 0; i < plan.level[0].size(); ++i) {
    const std::span<const double> xv = x.row(plan.level[0][i]);
    const double* g = dh[0].data() + i * H;
    for (std::size_t j = 0; j < xv.size(); ++j) {
      if (xv[j] == 0.0) continue;
      double* row = gin + j * H;
      for (std::size_t c = 0; c < H; ++c) row[c] += xv[j] * g[c];
    }
  }
}

// Unit embeddings for `nodes` (row i belongs to nodes[i]). Batching does not
// change the result because neighbor samples depend only on (seed, hop, node).
inline std::vector<Vec> EmbedNodes(const GnnParams& p, const NeighborSampler& s, const NodeFeatures& x,
                                   const std::vector<NodeId>& nodes, std::uint64_t seed, std::size_t batch = 256) {
  std::vector<Vec> out;
  out.reserve(nodes.size());
  for (std::size_t lo = 0; lo < nodes.size(); lo += batch) {
    std::vector<NodeId> chunk(nodes.begin() + static_cast<std::ptrdiff_t>(lo),
                              nodes.begin() + static_cast<std::ptrdiff_t>(std::min(nodes.size(), lo + batch)));
    GnnForward f = Encode(p, x, BuildPlan(s, chunk, seed));
    for (NodeId v : chunk) {
      const std::span<const double> e = f.embedding(f.plan.target_index(v));
      out.emplace_back(e.begin(), e.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Losses

// Margin loss over unit embeddings; gradients are accumulated when the
// output spans are non-empty.
inline double UnsupLoss(std::span<const double> zs, std::span<const double> zd, std::span<const double> zn,
                        double delta, HingeMode mode = HingeMode::kMaxMargin, std::span<double> gs = {},
                        std::span<double> gd = {}, std::span<double> gn = {}, double* kink = nullptr) {
  if (zs.size() != zd.size() || zs.size() != zn.size()) {
    Fail(ErrorCode::kShapeMismatch, "hinge loss over embeddings of different widths");
  }
  const double pos = Dot(zs, zd), neg = Dot(zs, zn);
  const double sign = mode == HingeMode::kMaxMargin ? 1.0 : -1.0;
  const double arg = sign * (neg - pos) + (mode == HingeMode::kMaxMargin ? delta : -delta);
  if (kink) *kink = std::min(*kink, std::abs(arg));
  if (arg <= 0) return 0.0;
  if (!gs.empty()) {
    // d/dzs = sign (zn - zd), d/dzd = -sign zs, d/dzn = sign zs
    for (std::size_t c = 0; c < zs.size(); ++c) {
      gs[c] += sign * (zn[c] - zd[c]);
      gd[c] -= sign * zs[c];
      gn[c] += sign * zs[c];
    }
  }
  return arg;
}

struct SiameseCache {
  Vec c;       // [|z1 - z2| ; z1 * z2]
  Vec a;       // hidden pre-activation
  Vec r;       // hidden activation
  double logit_gap = 0;  // logit(same) - logit(different)
  double p_same = 0;
};

// Probability that two unit embeddings belong to one profile. Symmetric in
// (z1, z2) bit for bit.
inline double SiameseHead(const GnnParams& p, std::span<const double> z1, std::span<const double> z2,
                          SiameseCache* cache = nullptr, double* kink = nullptr) {
  if (!p.has_head()) Fail(ErrorCode::kConfig, "gnn: parameters have no Siamese head");
  const std::size_t D = p.out, K = p.head_hidden;
  if (z1.size() != D || z2.size() != D) Fail(ErrorCode::kShapeMismatch, "gnn: embedding width mismatch");
  SiameseCache local;
  SiameseCache& s = cache ? *cache : local;
  s.c.assign(2 * D, 0.0);
  for (std::size_t i = 0; i < D; ++i) {
    s.c[i] = std::abs(z1[i] - z2[i]);
    s.c[D + i] = z1[i] * z2[i];
    detail::NoteKink(kink, s.c[i]);
  }
  s.a.assign(K, 0.0);
  s.r.assign(K, 0.0);
  detail::MatVec(p.block("head_w").data(), K, 2 * D, s.c.data(), s.a.data());
  const std::span<const double> hb = p.block("head_b");
  for (std::size_t i = 0; i < K; ++i) {
    s.a[i] += hb[i];
    // The bias moves this pre-activation even when c is zero.
    if (kink) *kink = std::min(*kink, std::abs(s.a[i]));
    s.r[i] = detail::Relu(s.a[i]);
  }
  double logits[2];
  detail::MatVec(p.block("out_w").data(), 2, K, s.r.data(), logits);
  const std::span<const double> ob = p.block("out_b");
  logits[0] += ob[0];
  logits[1] += ob[1];
  s.logit_gap = logits[1] - logits[0];
  s.p_same = Sigmoid(s.logit_gap);
  return s.p_same;
}

// Negative log likelihood of `same` plus gradients into the head block of
// `grad` and into dz1, dz2.
inline double SiameseNll(const GnnParams& p, std::span<const double> z1, std::span<const double> z2, bool same,
                         Vec* grad, std::span<double> dz1, std::span<double> dz2, double* kink = nullptr) {
  SiameseCache s;
  SiameseHead(p, z1, z2, &s, kink);
  const double loss = same ? Softplus(-s.logit_gap) : Softplus(s.logit_gap);
  if (!grad) return loss;
  const std::size_t D = p.out, K = p.head_hidden;
  const double g = s.p_same - (same ? 1.0 : 0.0);  // d loss / d logit_gap
  const double dl[2] = {-g, g};
  Vec dr(K, 0.0), da(K, 0.0), dc(2 * D, 0.0);
  const ParamBlock& bow = p.info("out_w");
  const ParamBlock& bob = p.info("out_b");
  const ParamBlock& bhw = p.info("head_w");
  const ParamBlock& bhb = p.info("head_b");
  detail::MatVecBackward(p.data.data() + bow.offset, 2, K, s.r.data(), dl, dr.data(), grad->data() + bow.offset);
  (*grad)[bob.offset] += dl[0];
  (*grad)[bob.offset + 1] += dl[1];
  for (std::size_t i = 0; i < K; ++i) {
    da[i] = s.a[i] > 0 ? dr[i] : 0.0;
    (*grad)[bhb.offset + i] += da[i];
  }
  detail::MatVecBackward(p.data.data() + bhw.offset, K, 2 * D, s.c.data(), da.data(), dc.data(),
                         grad->data() + bhw.offset);
  for (std::size_t i = 0; i < D; ++i) {
    const double diff = z1[i] - z2[i];
    const double sg = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
    dz1[i] += sg * dc[i] + z2[i] * dc[D + i];
    dz2[i] += -sg * dc[i] + z1[i] * dc[D + i];
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Gradient checking

struct GradCheckOptions {
  double epsilon = 1e-6;
  std::size_t coords = 200;
  // Points with a non-smooth quantity closer than this to its kink are
  // resampled.
  double kink_tolerance = 1e-5;
  std::size_t max_resamples = 50;
  double jitter = 1e-3;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t checked = 0;
  std::size_t resamples = 0;
};

// loss(x, grad, kink): returns the loss at x; writes the analytic gradient
// into `grad` when it is non-empty and lowers *kink to the distance of the
// nearest non-smooth point when kink is non-null.
using Objective = std::function<double(std::span<const double>, std::span<double>, double*)>;

// Central differences on a subset of coordinates. `ranges` ([begin, end)
// pairs) spreads the subset across parameter blocks; by default the whole
// vector is one range.
inline GradCheckResult GradientCheck(const Objective& f, Vec x, const GradCheckOptions& o,
                                     std::vector<std::pair<std::size_t, std::size_t>> ranges = {}) {
  GradCheckResult r;
  if (x.empty()) return r;
  if (ranges.empty()) ranges.push_back({0, x.size()});
  Rng rng(o.seed);
  for (;;) {
    double kink = std::numeric_limits<double>::infinity();
    f(x, {}, &kink);
    if (kink >= o.kink_tolerance) break;
    if (r.resamples++ >= o.max_resamples) {
      Fail(ErrorCode::kInvalidArgument, "gradient check: no smooth point found near the start point");
    }
    for (double& v : x) v += rng.Uniform(-o.jitter, o.jitter);
  }
  Vec grad(x.size(), 0.0);
  f(x, grad, nullptr);
  std::vector<std::size_t> idx;
  const std::size_t per = std::max<std::size_t>(1, o.coords / ranges.size());
  for (const auto& [b, e] : ranges) {
    std::vector<std::size_t> all(e - b);
    std::iota(all.begin(), all.end(), b);
    if (all.size() > per) {
      for (std::size_t i = 0; i < per; ++i) {
        std::swap(all[i], all[i + static_cast<std::size_t>(rng.Below(all.size() - i))]);
      }
      all.resize(per);
    }
    idx.insert(idx.end(), all.begin(), all.end());
  }
  for (std::size_t i : idx) {
    const double keep = x[i];
    x[i] = keep + o.epsilon;
    const double up = f(x, {}, nullptr);
    x[i] = keep - o.epsilon;
    const double down = f(x, {}, nullptr);
    x[i] = keep;
    const double fd = (up - down) / (2 * o.epsilon);
    const double err = std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    r.max_rel_error = std::max(r.max_rel_error, err);
    ++r.checked;
  }
  return r;
}

inline std::vector<std::pair<std::size_t, std::size_t>> BlockRanges(const GnnParams& p) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const ParamBlock& b : p.blocks) out.push_back({b.offset, b.offset + b.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Unsupervised training

struct Triplet {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  NodeId neg = kNoNode;
};

// Mean margin loss over a batch; accumulates the mean gradient into *grad.
inline double UnsupBatchLoss(const GnnParams& p, const NeighborSampler& s, const NodeFeatures& x,
                             const std::vector<Triplet>& batch, std::uint64_t plan_seed, Vec* grad,
                             double* kink = nullptr) {
  if (batch.empty()) return 0.0;
  std::vector<NodeId> targets;
  for (const Triplet& t : batch) targets.insert(targets.end(), {t.src, t.dst, t.neg});
  GnnForward f = Encode(p, x, BuildPlan(s, targets, plan_seed), kink);
  const std::size_t D = p.out;
  Vec dz(f.z.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  for (const Triplet& t : batch) {
    const std::size_t a = f.plan.target_index(t.src), b = f.plan.target_index(t.dst), c = f.plan.target_index(t.neg);
    // Per-triplet gradients, scaled after the fact so shared rows add up.
    Vec ga(D, 0.0), gb(D, 0.0), gc(D, 0.0);
    loss += UnsupLoss(f.embedding(a), f.embedding(b), f.embedding(c), s.config().delta, s.config().hinge,
                      grad ? std::span<double>(ga) : std::span<double>(), gb, gc, kink);
    if (!grad) continue;
    for (std::size_t i = 0; i < D; ++i) {
      dz[a * D + i] += scale * ga[i];
      dz[b * D + i] += scale * gb[i];
      dz[c * D + i] += scale * gc[i];
    }
  }
  if (grad) EncodeBackward(p, x, f, dz, *grad);
  return loss * scale;
}

struct TrainReport {
  std::vector<double> epoch_loss;
  double grad_check_error = -1;  // negative when skipped
  std::size_t grad_check_coords = 0;
  std::uint64_t params_checksum = 0;
  std::uint64_t seed = 0;
  std::size_t examples = 0;
};

// Author nodes within two hops of v (sharing a paper), excluding v.
inline std::vector<NodeId> TwoHopAuthors(const BipartiteGraph& g, NodeId v) {
  std::vector<NodeId> out;
  for (NodeId paper : g.neighbors(v)) {
    for (NodeId a : g.neighbors(paper)) {
      if (a != v) out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// One epoch of (source, coauthor, far node) triplets: one per author node
// with at least one coauthor, the negative drawn uniformly from author
// nodes outside the source's two-hop neighborhood.
inline std::vector<Triplet> SampleTriplets(const BipartiteGraph& g, std::uint64_t seed) {
  std::vector<NodeId> authors;
  for (NodeId v = 0; v < g.num_author_slots(); ++v) {
    if (g.is_live(v)) authors.push_back(v);
  }
  if (authors.size() < 3) Fail(ErrorCode::kInvalidArgument, "gnn: need at least 3 author nodes to sample negatives");
  Rng rng(seed);
  std::vector<Triplet> out;
  for (NodeId v : authors) {
    const std::vector<NodeId> near = TwoHopAuthors(g, v);
    if (near.empty() || near.size() + 1 >= authors.size()) continue;
    Triplet t{v, rng.Pick(near), kNoNode};
    for (int tries = 0; tries < 64 && t.neg == kNoNode; ++tries) {
      const NodeId u = rng.Pick(authors);
      if (u != v && !std::binary_search(near.begin(), near.end(), u)) t.neg = u;
    }
    if (t.neg != kNoNode) out.push_back(t);
  }
  rng.Shuffle(out);
  return out;
}

namespace detail {

inline void SgdStep(GnnParams& p, const Vec& grad, double lr) {
  for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] -= lr * grad[i];
}

template <typename Example, typename BatchLoss>
TrainReport RunTraining(GnnParams& params, const GnnConfig& c, std::uint64_t seed,
                        const std::function<std::vector<Example>(std::size_t epoch)>& epoch_examples,
                        const BatchLoss& batch_loss) {
  TrainReport report;
  report.seed = seed;
  for (std::size_t e = 0; e < c.epochs; ++e) {
    const std::vector<Example> examples = epoch_examples(e);
    if (examples.empty()) Fail(ErrorCode::kInvalidArgument, "gnn: no training examples");
    if (e == 0 && c.grad_check_coords > 0) {
      const std::vector<Example> probe(examples.begin(),
                                       examples.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(8, examples.size())));
      const std::uint64_t ps = DeriveSeed(seed, "gradcheck");
      GnnParams work = params;
      Objective obj = [&](std::span<const double> xv, std::span<double> g, double* kink) {
        std::copy(xv.begin(), xv.end(), work.data.begin());
        if (g.empty()) return batch_loss(work, probe, ps, nullptr, kink);
        Vec acc(work.data.size(), 0.0);
        const double l = batch_loss(work, probe, ps, &acc, kink);
        std::copy(acc.begin(), acc.end(), g.begin());
        return l;
      };
      GradCheckOptions o;
      o.coords = c.grad_check_coords;
      o.seed = ps;
      const GradCheckResult r = GradientCheck(obj, params.data, o, BlockRanges(params));
      report.grad_check_error = r.max_rel_error;
      report.grad_check_coords = r.checked;
    }
    double sum = 0;
    std::size_t batches = 0;
    Vec grad(params.data.size());
    for (std::size_t lo = 0; lo < examples.size(); lo += c.batch) {
      const std::vector<Example> batch(examples.begin() + static_cast<std::ptrdiff_t>(lo),
                                       examples.begin() + static_cast<std::ptrdiff_t>(std::min(examples.size(), lo + c.batch)));
      std::fill(grad.begin(), grad.end(), 0.0);
      sum += batch_loss(params, batch, DeriveSeed(seed, "plan", {e, batches}), &grad, nullptr);
      SgdStep(params, grad, c.learning_rate);
      ++batches;
    }
    report.examples += examples.size();
    report.epoch_loss.push_back(sum / static_cast<double>(batches));
    if (!AllFinite(params.data)) Fail(ErrorCode::kDataIntegrity, "gnn: training diverged");
  }
  report.params_checksum = params.Checksum();
  return report;
}

}  // namespace detail

struct TrainedGnn {
  GnnParams params;
  TrainReport report;
};

inline TrainedGnn TrainUnsupervised(const BipartiteGraph& g, const NodeFeatures& x, const GnnConfig& c) {
  c.Validate();
  NeighborSampler sampler(g, c);
  TrainedGnn out{GnnParams::Init(x.dim, c, false, DeriveSeed(c.seed, "init")), {}};
  // Fail early on graphs too small to sample from.
  SampleTriplets(g, DeriveSeed(c.seed, "triplets", {0}));
  auto examples = [&](std::size_t e) { return SampleTriplets(g, DeriveSeed(c.seed, "triplets", {e})); };
  auto loss = [&](const GnnParams& p, const std::vector<Triplet>& b, std::uint64_t ps, Vec* grad, double* kink) {
    return UnsupBatchLoss(p, sampler, x, b, ps, grad, kink);
  };
  out.report = detail::RunTraining<Triplet>(out.params, c, c.seed, examples, loss);
  return out;
}

// ---------------------------------------------------------------------------
// Supervised training

struct PairExample {
  NodeId a1 = kNoNode;
  NodeId a2 = kNoNode;
  bool same = false;

  bool operator==(const PairExample& o) const { return a1 == o.a1 && a2 == o.a2 && same == o.same; }
};

// Author nodes of each labeled profile: the node that carries the name on
// each of the profile's papers. A node whose papers span several profiles
// has no single label and is left out.
inline std::map<std::string, std::map<std::string, std::vector<NodeId>>> ProfileNodes(const Labeling& labeling,
                                                                                      const BipartiteGraph& g) {
  std::map<std::string, std::map<std::string, std::vector<NodeId>>> out;
  for (const auto& [name, profiles] : labeling.names) {
    std::map<NodeId, std::set<std::string>> owners;
    for (const auto& [pid, papers] : profiles) {
      for (const std::string& paper : papers) {
        if (auto a = g.AuthorOfInterest(paper, name)) owners[*a].insert(pid);
      }
    }
    auto& slot = out[name];
    for (const auto& [node, pids] : owners) {
      if (pids.size() == 1) slot[*pids.begin()].push_back(node);
    }
  }
  return out;
}

// Positives: every pair of distinct nodes under one profile. Negatives:
// round(ratio * positives), alternating between a node of another profile
// under the same name and a node of a different name.
inline std::vector<PairExample> BuildPairDataset(const Labeling& labeling, const BipartiteGraph& g, double ratio,
                                                 std::uint64_t seed) {
  if (!(ratio >= 0)) Fail(ErrorCode::kConfig, "pair ratio must be nonnegative");
  const auto nodes = ProfileNodes(labeling, g);
  struct Tagged {
    NodeId node;
    std::string name;
    std::string profile;
  };
  std::vector<Tagged> all;
  std::vector<PairExample> out;
  std::vector<std::size_t> anchors;  // index into `all` of each positive's first node
  for (const auto& [name, profiles] : nodes) {
    for (const auto& [pid, list] : profiles) {
      const std::size_t base = all.size();
      for (NodeId v : list) all.push_back({v, name, pid});
      for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
          out.push_back({list[i], list[j], true});
          anchors.push_back(base + i);
        }
      }
    }
  }
  const std::size_t positives = out.size();
  const auto negatives = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives)));
  if (positives == 0 || negatives == 0) return out;
  Rng rng(seed);
  for (std::size_t k = 0; k < negatives; ++k) {
    const Tagged& anchor = all[anchors[k % positives]];
    std::vector<std::size_t> same_name, other_name;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].name == anchor.name) {
        if (all[i].profile != anchor.profile) same_name.push_back(i);
      } else {
        other_name.push_back(i);
      }
    }
    const std::vector<std::size_t>* pool = (k % 2 == 0 && !same_name.empty()) ? &same_name : &other_name;
    if (pool->empty()) pool = &same_name;
    if (pool->empty()) continue;
    out.push_back({anchor.node, all[rng.Pick(*pool)].node, false});
  }
  return out;
}

// Mean negative log likelihood over a batch of pairs.
inline double SupervisedBatchLoss(const GnnParams& p, const NeighborSampler& s, const NodeFeatures& x,
                                  const std::vector<PairExample>& batch, std::uint64_t plan_seed, Vec* grad,
                                  double* kink = nullptr) {
  if (batch.empty()) return 0.0;
  std::vector<NodeId> targets;
  for (const PairExample& e : batch) targets.insert(targets.end(), {e.a1, e.a2});
  GnnForward f = Encode(p, x, BuildPlan(s, targets, plan_seed), kink);
  const std::size_t D = p.out;
  Vec dz(f.z.size(), 0.0);
  Vec local;
  if (grad) local.assign(grad->size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  Vec d1(D), d2(D);
  for (const PairExample& e : batch) {
    const std::size_t a = f.plan.target_index(e.a1), b = f.plan.target_index(e.a2);
    std::fill(d1.begin(), d1.end(), 0.0);
    std::fill(d2.begin(), d2.end(), 0.0);
    loss += SiameseNll(p, f.embedding(a), f.embedding(b), e.same, grad ? &local : nullptr, d1, d2, kink);
    if (!grad) continue;
    for (std::size_t i = 0; i < D; ++i) {
      dz[a * D + i] += scale * d1[i];
      dz[b * D + i] += scale * d2[i];
    }
  }
  if (grad) {
    for (std::size_t i = 0; i < local.size(); ++i) (*grad)[i] += scale * local[i];
    EncodeBackward(p, x, f, dz, *grad);
  }
  return loss * scale;
}

inline TrainedGnn TrainSupervised(const BipartiteGraph& g, const NodeFeatures& x, const std::vector<PairExample>& pairs,
                                  const GnnConfig& c) {
  c.Validate();
  if (pairs.empty()) Fail(ErrorCode::kInvalidArgument, "gnn: empty pair set");
  NeighborSampler sampler(g, c);
  TrainedGnn out{GnnParams::Init(x.dim, c, true, DeriveSeed(c.seed, "init")), {}};
  auto examples = [&](std::size_t e) {
    std::vector<PairExample> shuffled = pairs;
    Rng rng(DeriveSeed(c.seed, "pairs", {e}));
    rng.Shuffle(shuffled);
    return shuffled;
  };
  auto loss = [&](const GnnParams& p, const std::vector<PairExample>& b, std::uint64_t ps, Vec* grad, double* kink) {
    return SupervisedBatchLoss(p, sampler, x, b, ps, grad, kink);
  };
  out.report = detail::RunTraining<PairExample>(out.params, c, c.seed, examples, loss);
  return out;
}

// Probability that a1 and a2 are one person, computed from scratch.
inline double SiameseForward(const GnnParams& p, const NeighborSampler& s, const NodeFeatures& x, NodeId a1,
                             NodeId a2, std::uint64_t seed) {
  const BipartiteGraph& g = s.graph();
  for (NodeId v : {a1, a2}) {
    if (v >= g.num_nodes() || !g.is_author(v)) {
      Fail(ErrorCode::kNotFound, "gnn: " + std::to_string(v) + " is not an author node");
    }
  }
  GnnForward f = Encode(p, x, BuildPlan(s, {a1, a2}, seed));
  return SiameseHead(p, f.embedding(f.plan.target_index(a1)), f.embedding(f.plan.target_index(a2)));
}

// ---------------------------------------------------------------------------
// Similarities for the clustering pass

// Unit embeddings of every author node, keyed by node id.
struct GnnEmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<NodeId, Vec> rows;

  const Vec* find(NodeId v) const {
    auto it = rows.find(v);
    return it == rows.end() ? nullptr : &it->second;
  }
};

inline GnnEmbeddingTable EmbedAuthors(const GnnParams& p, const NeighborSampler& s, const NodeFeatures& x,
                                      std::uint64_t seed) {
  const BipartiteGraph& g = s.graph();
  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < g.num_author_slots(); ++v) nodes.push_back(v);
  std::vector<Vec> z = EmbedNodes(p, s, x, nodes, seed);
  GnnEmbeddingTable t;
  t.dim = p.out;
  for (std::size_t i = 0; i < nodes.size(); ++i) t.rows.emplace(nodes[i], std::move(z[i]));
  return t;
}

// Cosine of unit embeddings; unlocated items score 0.5 as in the other
// embedding similarities.
inline SimilarityFunction GnnCosineSimilarity(const GnnEmbeddingTable& t, std::string name = "gnn-unsup") {
  return {std::move(name), [&t](const AuthorItem& a, const AuthorItem& b) {
            const Vec* za = t.find(a.node);
            const Vec* zb = t.find(b.node);
            if (!za || !zb) return 0.5;
            return Dot(*za, *zb);
          }};
}

// Siamese probability; one node compared with itself scores 1.
inline SimilarityFunction SiameseSimilarity(const GnnParams& p, const GnnEmbeddingTable& t, std::string name) {
  return {std::move(name), [&p, &t](const AuthorItem& a, const AuthorItem& b) {
            if (a.node == b.node && a.node != kNoNode) return 1.0;
            const Vec* za = t.find(a.node);
            const Vec* zb = t.find(b.node);
            if (!za || !zb) return 0.5;
            return SiameseHead(p, *za, *zb);
          }};
}

}  // namespace andis
