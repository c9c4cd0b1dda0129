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

// Author-publication bipartite graph with union-find node merging.
//
// Node ids are dense: author nodes occupy [0, |U|) in sorted (name, org)
// order, paper nodes occupy [|U|, |U| + |V|) in sorted paper-id order. A merge
// folds one author node into another; the surviving (canonical) node is the
// smaller id, so ids never change meaning and lookups resolve through the
// parent table.

#pragma once

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "andis/common.hpp"
#include "andis/corpus.hpp"

namespace andis {

enum class NodeKind { kAuthor, kPaper };

struct AuthorKey {
  std::string name;
  std::string org;
  // Paper id when empty orgs are kept apart per incidence; otherwise empty.
  std::string incidence;

  auto operator<=>(const AuthorKey&) const = default;
};

struct GraphOptions {
  // One node per (name, empty org, paper) instead of one per (name, "").
  bool distinct_empty_org = false;
};

struct MergeRecord {
  std::size_t epoch = 0;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  NodeId canonical = kNoNode;
  std::uint64_t trigger_count = 0;
  bool self_merge = false;
};

class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  static BipartiteGraph Build(const Corpus& corpus, GraphOptions options = {}) {
    BipartiteGraph g;
    g.options_ = options;

    struct Incidence {
      std::string paper;
      AuthorKey key;
    };
    std::vector<Incidence> incidences;
    std::set<AuthorKey> keys;
    for (const auto& [pid, pub] : corpus.pubs) {
      for (const AuthorRef& ref : pub.authors) {
        std::vector<std::string> tokens = FoldedTokens(ref.raw_name);
        if (tokens.empty()) continue;
        AuthorKey key{JoinTokens(tokens), NormalizeOrg(ref.raw_org), {}};
        if (key.org.empty() && options.distinct_empty_org) key.incidence = pid;
        keys.insert(key);
        incidences.push_back({pid, std::move(key)});
      }
    }

    g.authors_.assign(keys.begin(), keys.end());
    for (NodeId i = 0; i < g.authors_.size(); ++i) g.author_index_.emplace(g.authors_[i], i);
    for (const auto& [pid, pub] : corpus.pubs) {
      g.paper_index_.emplace(pid, static_cast<NodeId>(g.authors_.size() + g.papers_.size()));
      g.papers_.push_back(pid);
    }
    const std::size_t n = g.authors_.size() + g.papers_.size();
    g.adj_.assign(n, {});
    g.parent_.resize(g.authors_.size());
    for (NodeId i = 0; i < g.parent_.size(); ++i) g.parent_[i] = i;
    g.paper_authors_.assign(g.papers_.size(), {});

    for (const Incidence& inc : incidences) {
      const NodeId a = g.author_index_.at(inc.key);
      const NodeId p = g.paper_index_.at(inc.paper);
      g.paper_authors_[p - g.authors_.size()].push_back(a);
      g.adj_[a].push_back(p);
      g.adj_[p].push_back(a);
    }
    for (auto& list : g.adj_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    g.RecountEdges();
    return g;
  }

  std::size_t num_nodes() const { return adj_.size(); }
  std::size_t num_author_slots() const { return authors_.size(); }
  std::size_t num_papers() const { return papers_.size(); }
  std::size_t num_edges() const { return edges_; }
  const GraphOptions& options() const { return options_; }

  std::size_t num_live_authors() const {
    std::size_t n = 0;
    for (NodeId i = 0; i < parent_.size(); ++i) n += parent_[i] == i;
    return n;
  }

  bool is_author(NodeId v) const { return v < authors_.size(); }
  bool is_paper(NodeId v) const { return v >= authors_.size() && v < adj_.size(); }
  NodeKind kind(NodeId v) const { return is_author(v) ? NodeKind::kAuthor : NodeKind::kPaper; }

  // Paper nodes are always live; author nodes are live while canonical.
  bool is_live(NodeId v) const { return is_paper(v) || (is_author(v) && parent_[v] == v); }

  const AuthorKey& author_key(NodeId v) const {
    CheckAuthor(v);
    return authors_[v];
  }
  const std::string& author_name(NodeId v) const { return author_key(v).name; }

  const std::string& paper_id(NodeId v) const {
    if (!is_paper(v)) Fail(ErrorCode::kInvalidArgument, "node " + std::to_string(v) + " is not a paper");
    return papers_[v - authors_.size()];
  }

  std::span<const NodeId> neighbors(NodeId v) const { return adj_.at(v); }
  std::size_t degree(NodeId v) const { return adj_.at(v).size(); }

  bool has_edge(NodeId u, NodeId v) const {
    const auto& list = adj_.at(u);
    return std::binary_search(list.begin(), list.end(), v);
  }

  // Canonical representative of an author node (papers resolve to
  // themselves).
  NodeId Resolve(NodeId v) const {
    if (!is_author(v)) return v;
    while (parent_[v] != v) v = parent_[v];
    return v;
  }

  std::optional<NodeId> FindAuthor(const AuthorKey& key) const {
    auto it = author_index_.find(key);
    if (it == author_index_.end()) return std::nullopt;
    return Resolve(it->second);
  }

  std::optional<NodeId> FindPaper(const std::string& paper_id) const {
    auto it = paper_index_.find(paper_id);
    if (it == paper_index_.end()) return std::nullopt;
    return it->second;
  }

  // Live author nodes carrying the name, ascending.
  std::vector<NodeId> AuthorsNamed(const std::string& name) const {
    std::vector<NodeId> out;
    auto it = author_index_.lower_bound(AuthorKey{name, {}, {}});
    for (; it != author_index_.end() && it->first.name == name; ++it) {
      if (is_live(it->second)) out.push_back(it->second);
    }
    return out;
  }

  // Original author nodes folded into `canonical` (including itself).
  std::vector<NodeId> Members(NodeId canonical) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < parent_.size(); ++i) {
      if (Resolve(i) == canonical) out.push_back(i);
    }
    return out;
  }

  // The node standing for `name` on a paper: the first author whose name
  // key equals `name`, else the first whose tokens match in another order.
  std::optional<NodeId> AuthorOfInterest(NodeId paper, const std::string& name) const {
    const auto& list = paper_authors_.at(paper_id_index(paper));
    for (NodeId a : list) {
      if (authors_[a].name == name) return Resolve(a);
    }
    const std::string sorted = SortedTokenKey(name);
    for (NodeId a : list) {
      if (SortedTokenKey(authors_[a].name) == sorted) return Resolve(a);
    }
    return std::nullopt;
  }

  std::optional<NodeId> AuthorOfInterest(const std::string& paper, const std::string& name) const {
    auto p = FindPaper(paper);
    if (!p) return std::nullopt;
    return AuthorOfInterest(*p, name);
  }

  // Folds b into a (or a into b; the smaller canonical id survives). Only
  // author nodes of one name may merge. Merging a node with itself is a
  // logged no-op.
  NodeId Merge(NodeId a, NodeId b, std::size_t epoch = 0, std::uint64_t trigger_count = 0) {
    CheckAuthor(a);
    CheckAuthor(b);
    const NodeId ra = Resolve(a);
    const NodeId rb = Resolve(b);
    if (authors_[ra].name != authors_[rb].name) {
      Fail(ErrorCode::kInvalidArgument, "cannot merge authors with different names: " +
                                            authors_[ra].name + " vs " + authors_[rb].name);
    }
    if (ra == rb) {
      log_.push_back({epoch, a, b, ra, trigger_count, true});
      return ra;
    }
    const NodeId keep = std::min(ra, rb);
    const NodeId gone = std::max(ra, rb);
    parent_[gone] = keep;

    std::vector<NodeId> merged;
    merged.reserve(adj_[keep].size() + adj_[gone].size());
    std::set_union(adj_[keep].begin(), adj_[keep].end(), adj_[gone].begin(), adj_[gone].end(),
                   std::back_inserter(merged));
    for (NodeId p : adj_[gone]) {
      auto& list = adj_[p];
      list.erase(std::lower_bound(list.begin(), list.end(), gone));
      auto pos = std::lower_bound(list.begin(), list.end(), keep);
      if (pos == list.end() || *pos != keep) list.insert(pos, keep);
    }
    edges_ -= adj_[keep].size() + adj_[gone].size() - merged.size();
    adj_[keep] = std::move(merged);
    adj_[gone].clear();
    log_.push_back({epoch, a, b, keep, trigger_count, false});
    return keep;
  }

  const std::vector<MergeRecord>& merge_log() const { return log_; }

  // Component sizes over live nodes, largest first.
  std::vector<std::size_t> ConnectedComponents() const {
    std::vector<std::size_t> sizes;
    std::vector<NodeId> label = ComponentLabels();
    std::map<NodeId, std::size_t> count;
    for (NodeId v = 0; v < label.size(); ++v) {
      if (label[v] != kNoNode) ++count[label[v]];
    }
    for (const auto& [root, n] : count) sizes.push_back(n);
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
  }

  // Component id per node (smallest node id in the component); kNoNode for
  // dead author slots.
  std::vector<NodeId> ComponentLabels() const {
    std::vector<NodeId> label(adj_.size(), kNoNode);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < adj_.size(); ++s) {
      if (!is_live(s) || label[s] != kNoNode) continue;
      label[s] = s;
      stack.push_back(s);
      while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId u : adj_[v]) {
          if (label[u] == kNoNode) {
            label[u] = s;
            stack.push_back(u);
          }
        }
      }
    }
    return label;
  }

  // Groups the given papers by the canonical node standing for `name` on
  // each paper. Papers where the name cannot be located become singletons.
  // Clusters are ordered by their smallest paper id.
  std::vector<std::vector<std::string>> ComponentsToClustering(
      const std::string& name, std::vector<std::string> papers) const {
    std::sort(papers.begin(), papers.end());
    papers.erase(std::unique(papers.begin(), papers.end()), papers.end());
    std::map<NodeId, std::size_t> cluster_of;
    std::vector<std::vector<std::string>> clusters;
    for (const std::string& pid : papers) {
      std::optional<NodeId> a = AuthorOfInterest(pid, name);
      if (!a) {
        clusters.push_back({pid});
        continue;
      }
      auto [it, inserted] = cluster_of.emplace(*a, clusters.size());
      if (inserted) clusters.emplace_back();
      clusters[it->second].push_back(pid);
    }
    return clusters;
  }

  // Every paper adjacent to a live node of that name.
  std::vector<std::vector<std::string>> ComponentsToClustering(const std::string& name) const {
    std::vector<std::string> papers;
    for (NodeId a : AuthorsNamed(name)) {
      for (NodeId p : adj_[a]) papers.push_back(paper_id(p));
    }
    return ComponentsToClustering(name, std::move(papers));
  }

  // Structural equality: same node table, same liveness and adjacency.
  bool SameStructure(const BipartiteGraph& o) const {
    if (authors_ != o.authors_ || papers_ != o.papers_ || adj_ != o.adj_) return false;
    for (NodeId i = 0; i < parent_.size(); ++i) {
      if (Resolve(i) != o.Resolve(i)) return false;
    }
    return true;
  }

  // Plain-text export: node table followed by the edge list.
  //   node <id> author <name> <org|-> [incidence]
  //   node <id> paper <paper id>
  //   alias <id> <canonical>
  //   edge <author id> <paper id>
  std::string ExportText() const {
    std::ostringstream out;
    out << "# andis bipartite graph v1\n";
    out << "# authors " << authors_.size() << " papers " << papers_.size() << " edges " << edges_
        << "\n";
    for (NodeId i = 0; i < authors_.size(); ++i) {
      const AuthorKey& k = authors_[i];
      out << "node " << i << " author " << k.name << ' ' << (k.org.empty() ? "-" : k.org);
      if (!k.incidence.empty()) out << ' ' << k.incidence;
      out << '\n';
    }
    for (std::size_t j = 0; j < papers_.size(); ++j) {
      out << "node " << authors_.size() + j << " paper " << papers_[j] << '\n';
    }
    for (NodeId i = 0; i < parent_.size(); ++i) {
      if (parent_[i] != i) out << "alias " << i << ' ' << Resolve(i) << '\n';
    }
    for (NodeId a = 0; a < authors_.size(); ++a) {
      for (NodeId p : adj_[a]) out << "edge " << a << ' ' << p << '\n';
    }
    return out.str();
  }

  // Inverse of ExportText. Paper author order (used to locate a name on a
  // paper) is restored as ascending node id.
  static BipartiteGraph ImportText(const std::string& text) {
    BipartiteGraph g;
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, NodeId>> aliases;
    std::map<NodeId, AuthorKey> authors;
    std::map<NodeId, std::string> papers;
    std::size_t lineno = 0;
    auto bad = [&](const std::string& why) {
      Fail(ErrorCode::kParse, "graph text line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "node") {
        NodeId id;
        std::string kind;
        if (!(ls >> id >> kind)) bad("malformed node");
        if (kind == "author") {
          AuthorKey k;
          if (!(ls >> k.name >> k.org)) bad("malformed author node");
          if (k.org == "-") k.org.clear();
          ls >> k.incidence;
          authors[id] = k;
        } else if (kind == "paper") {
          std::string pid;
          std::getline(ls >> std::ws, pid);
          if (pid.empty()) bad("paper node without id");
          papers[id] = pid;
        } else {
          bad("unknown node kind " + kind);
        }
      } else if (tag == "alias") {
        NodeId a, c;
        if (!(ls >> a >> c)) bad("malformed alias");
        aliases.emplace_back(a, c);
      } else if (tag == "edge") {
        NodeId a, p;
        if (!(ls >> a >> p)) bad("malformed edge");
        edges.emplace_back(a, p);
      } else {
        bad("unknown record " + tag);
      }
    }
    for (NodeId i = 0; i < authors.size(); ++i) {
      if (!authors.count(i)) bad("author ids are not dense");
      g.authors_.push_back(authors[i]);
      g.author_index_.emplace(authors[i], i);
    }
    const NodeId base = static_cast<NodeId>(g.authors_.size());
    for (NodeId j = 0; j < papers.size(); ++j) {
      if (!papers.count(base + j)) bad("paper ids are not dense");
      g.papers_.push_back(papers[base + j]);
      g.paper_index_.emplace(papers[base + j], base + j);
    }
    g.adj_.assign(g.authors_.size() + g.papers_.size(), {});
    g.parent_.resize(g.authors_.size());
    for (NodeId i = 0; i < g.parent_.size(); ++i) g.parent_[i] = i;
    for (auto [a, c] : aliases) {
      if (a >= g.parent_.size() || c >= g.parent_.size()) bad("alias out of range");
      g.parent_[a] = c;
    }
    g.paper_authors_.assign(g.papers_.size(), {});
    for (auto [a, p] : edges) {
      if (!g.is_author(a) || !g.is_paper(p)) bad("edge endpoints must be author then paper");
      g.adj_[a].push_back(p);
      g.adj_[p].push_back(a);
    }
    // Dead slots keep their original incidences so names still resolve.
    for (NodeId p = base; p < g.adj_.size(); ++p) {
      for (NodeId a : g.adj_[p]) g.paper_authors_[p - base].push_back(a);
    }
    for (auto& list : g.adj_) std::sort(list.begin(), list.end());
    g.RecountEdges();
    return g;
  }

 private:
  void CheckAuthor(NodeId v) const {
    if (!is_author(v)) Fail(ErrorCode::kInvalidArgument, "node " + std::to_string(v) + " is not an author");
  }

  std::size_t paper_id_index(NodeId p) const {
    if (!is_paper(p)) Fail(ErrorCode::kInvalidArgument, "node " + std::to_string(p) + " is not a paper");
    return p - authors_.size();
  }

  void RecountEdges() {
    std::size_t total = 0;
    for (NodeId a = 0; a < authors_.size(); ++a) total += adj_[a].size();
    edges_ = total;
  }

  GraphOptions options_;
  std::vector<AuthorKey> authors_;
  std::map<AuthorKey, NodeId> author_index_;
  std::vector<std::string> papers_;
  std::map<std::string, NodeId> paper_index_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<NodeId> parent_;
  // Original (pre-merge) author nodes of each paper in byline order.
  std::vector<std::vector<NodeId>> paper_authors_;
  std::vector<MergeRecord> log_;
  std::size_t edges_ = 0;
};

// Replays a merge log onto a freshly built graph.
inline void ReplayMerges(BipartiteGraph& g, const std::vector<MergeRecord>& log) {
  for (const MergeRecord& r : log) g.Merge(r.a, r.b, r.epoch, r.trigger_count);
}

}  // namespace andis
