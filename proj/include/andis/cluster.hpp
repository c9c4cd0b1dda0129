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

// Greedy threshold clustering of one name's papers, the text baselines, and
// pairwise precision / recall / F1 scoring.

#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "andis/common.hpp"
#include "andis/corpus.hpp"
#include "andis/graph.hpp"
#include "andis/strsim.hpp"

namespace andis {

enum class Linkage { kSingle, kAverage, kComplete };

inline Linkage ParseLinkage(const std::string& s) {
  if (s == "single") return Linkage::kSingle;
  if (s == "average") return Linkage::kAverage;
  if (s == "complete") return Linkage::kComplete;
  Fail(ErrorCode::kConfig, "unknown linkage '" + s + "' (single|average|complete)");
}

inline const char* LinkageName(Linkage l) {
  switch (l) {
    case Linkage::kSingle: return "single";
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
  }
  return "average";
}

// Processes items 0..n-1 in order. Each item joins the existing cluster with
// the highest linkage score if that score exceeds `theta`, otherwise it opens
// a new cluster. Ties go to the lowest cluster index.
//
// score(i, j) is called with j < i only.
template <typename Score>
std::vector<std::vector<std::size_t>> GreedyCluster(std::size_t n, Score&& score, double theta,
                                                    Linkage linkage) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      double s = 0.0;
      switch (linkage) {
        case Linkage::kSingle:
          s = -std::numeric_limits<double>::infinity();
          for (std::size_t m : clusters[c]) s = std::max(s, static_cast<double>(score(i, m)));
          break;
        case Linkage::kComplete:
          s = std::numeric_limits<double>::infinity();
          for (std::size_t m : clusters[c]) s = std::min(s, static_cast<double>(score(i, m)));
          break;
        case Linkage::kAverage:
          for (std::size_t m : clusters[c]) s += static_cast<double>(score(i, m));
          s /= static_cast<double>(clusters[c].size());
          break;
      }
      if (!best || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    if (best && best_score > theta) {
      clusters[*best].push_back(i);
    } else {
      clusters.push_back({i});
    }
  }
  return clusters;
}

// The author a paper is being clustered for: the name under disambiguation,
// the affiliation on that paper, and the graph node when located.
struct AuthorItem {
  std::string name;
  std::string org;
  NodeId node = kNoNode;
};

// Scorer over author items. Every similarity carries the name-equality
// conjunct; Score() applies it before calling the underlying function.
struct SimilarityFunction {
  std::string name;
  std::function<double(const AuthorItem&, const AuthorItem&)> fn;

  double Score(const AuthorItem& a, const AuthorItem& b) const {
    if (a.name != b.name) return 0.0;
    return fn(a, b);
  }
};

inline SimilarityFunction NameSimilarity() {
  return {"cluster-by-name", [](const AuthorItem&, const AuthorItem&) { return 1.0; }};
}

struct OrgMatchOptions {
  double threshold = 0.9;
  bool plain_jaro = false;
};

// Similarity of two normalized org keys. Two empty orgs count as identical,
// one empty org as no match.
inline double OrgSimilarity(const std::string& a, const std::string& b, bool plain_jaro) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  return plain_jaro ? Jaro(a, b) : JaroWinkler(a, b);
}

inline SimilarityFunction NameOrgSimilarity(OrgMatchOptions options = {}) {
  return {"cluster-by-name-org", [options](const AuthorItem& a, const AuthorItem& b) {
            return OrgSimilarity(a.org, b.org, options.plain_jaro) > options.threshold ? 1.0 : 0.0;
          }};
}

// Items for a name's papers (sorted by id) located in the graph.
inline std::vector<AuthorItem> AuthorItemsFor(const BipartiteGraph& graph, const std::string& name,
                                              const std::vector<std::string>& papers) {
  std::vector<AuthorItem> items;
  items.reserve(papers.size());
  for (const std::string& pid : papers) {
    AuthorItem item{name, {}, kNoNode};
    if (auto node = graph.AuthorOfInterest(pid, name)) {
      item.node = *node;
      item.org = graph.author_key(*node).org;
    }
    items.push_back(std::move(item));
  }
  return items;
}

struct Clustering {
  // name -> clusters -> paper ids
  std::map<std::string, std::vector<std::vector<std::string>>> by_name;
  std::string method;
  double theta = 0.0;
  std::uint64_t seed = 0;

  std::size_t cluster_count() const {
    std::size_t n = 0;
    for (const auto& [name, clusters] : by_name) n += clusters.size();
    return n;
  }

  // Disjoint, nonempty clusters under every name.
  void Validate() const {
    for (const auto& [name, clusters] : by_name) {
      std::set<std::string> seen;
      for (const auto& c : clusters) {
        if (c.empty()) Fail(ErrorCode::kDataIntegrity, "empty cluster under " + name);
        for (const std::string& p : c) {
          if (!seen.insert(p).second) {
            Fail(ErrorCode::kDataIntegrity, "paper " + p + " is in two clusters under " + name);
          }
        }
      }
    }
  }
};

// Clusters one name's papers. Scores between identical graph nodes are
// evaluated once per node pair.
inline std::vector<std::vector<std::string>> ClusterName(const BipartiteGraph& graph,
                                                         const std::string& name,
                                                         std::vector<std::string> papers,
                                                         const SimilarityFunction& sim, double theta,
                                                         Linkage linkage) {
  std::sort(papers.begin(), papers.end());
  papers.erase(std::unique(papers.begin(), papers.end()), papers.end());
  const std::vector<AuthorItem> items = AuthorItemsFor(graph, name, papers);
  std::map<std::pair<NodeId, NodeId>, double> memo;
  auto score = [&](std::size_t i, std::size_t j) {
    const AuthorItem& a = items[i];
    const AuthorItem& b = items[j];
    if (a.node == kNoNode || b.node == kNoNode) return sim.Score(a, b);
    const auto key = std::minmax(a.node, b.node);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double s = sim.Score(a, b);
    memo.emplace(key, s);
    return s;
  };
  auto index_clusters = GreedyCluster(items.size(), score, theta, linkage);
  std::vector<std::vector<std::string>> out;
  for (const auto& c : index_clusters) {
    std::vector<std::string> cluster;
    for (std::size_t i : c) cluster.push_back(papers[i]);
    out.push_back(std::move(cluster));
  }
  return out;
}

inline Clustering ClusterAllNames(const BipartiteGraph& graph, const Labeling& names,
                                  const SimilarityFunction& sim, double theta, Linkage linkage) {
  Clustering out;
  out.method = sim.name;
  out.theta = theta;
  for (const auto& [name, profiles] : names.names) {
    out.by_name[name] = ClusterName(graph, name, names.papers_of(name), sim, theta, linkage);
  }
  return out;
}

// Same JSON shape as the ground truth: name -> cluster index -> paper ids.
inline Json ClusteringToJson(const Clustering& c) {
  Json doc = Json::object();
  for (const auto& [name, clusters] : c.by_name) {
    Json entry = Json::object();
    for (std::size_t i = 0; i < clusters.size(); ++i) entry[std::to_string(i)] = clusters[i];
    doc[name] = std::move(entry);
  }
  return doc;
}

inline void SaveClustering(const Clustering& c, const std::string& path) {
  WriteFile(path, ClusteringToJson(c).dump(1) + "\n");
}

// Reads a predictions file (ground-truth shape) as a clustering.
inline Clustering ClusteringFromLabeling(const Labeling& l, std::string method = "predicted") {
  Clustering c;
  c.method = std::move(method);
  for (const auto& [name, profiles] : l.names) {
    for (const auto& [pid, papers] : profiles) c.by_name[name].push_back(papers);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Pairwise metrics.

struct NameMetrics {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  // No pair predicted together / no pair together in truth.
  bool precision_undefined = false;
  bool recall_undefined = false;
  std::uint64_t predicted_pairs = 0;
  std::uint64_t true_pairs = 0;
  std::uint64_t correct_pairs = 0;
  std::size_t papers = 0;
};

struct PairwiseMetrics {
  std::map<std::string, NameMetrics> per_name;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  NameMetrics micro;
};

inline double F1Score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

inline NameMetrics MetricsFromCounts(std::uint64_t predicted, std::uint64_t truth,
                                     std::uint64_t correct) {
  NameMetrics m;
  m.predicted_pairs = predicted;
  m.true_pairs = truth;
  m.correct_pairs = correct;
  m.precision_undefined = predicted == 0;
  m.recall_undefined = truth == 0;
  m.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 1.0;
  m.recall = truth ? static_cast<double>(correct) / static_cast<double>(truth) : 1.0;
  m.f1 = F1Score(m.precision, m.recall);
  return m;
}

// Scores every name present in `predicted`. Each must exist in `truth` with
// exactly the same paper set; names only in `truth` are not scored.
inline PairwiseMetrics ComputePairwiseMetrics(const Clustering& predicted, const Labeling& truth) {
  predicted.Validate();
  auto pairs = [](std::uint64_t n) { return n * (n ? n - 1 : 0) / 2; };
  PairwiseMetrics out;
  std::uint64_t all_pred = 0, all_true = 0, all_correct = 0;
  for (const auto& [name, clusters] : predicted.by_name) {
    auto tit = truth.names.find(name);
    if (tit == truth.names.end()) {
      Fail(ErrorCode::kDataIntegrity, "name " + name + " is predicted but absent from the truth");
    }
    std::map<std::string, std::size_t> profile_of;
    std::vector<std::uint64_t> profile_sizes;
    for (const auto& [pid, papers] : tit->second) {
      for (const std::string& p : papers) profile_of[p] = profile_sizes.size();
      profile_sizes.push_back(papers.size());
    }
    std::uint64_t pred = 0, correct = 0, tru = 0, covered = 0;
    for (const auto& c : clusters) {
      std::map<std::size_t, std::uint64_t> overlap;
      for (const std::string& p : c) {
        auto it = profile_of.find(p);
        if (it == profile_of.end()) {
          Fail(ErrorCode::kDataIntegrity, "paper " + p + " predicted under " + name + " is not in its truth");
        }
        ++overlap[it->second];
        ++covered;
      }
      pred += pairs(c.size());
      for (const auto& [profile, n] : overlap) correct += pairs(n);
    }
    if (covered != profile_of.size()) {
      Fail(ErrorCode::kDataIntegrity, "prediction for " + name + " does not cover its truth papers");
    }
    for (std::uint64_t s : profile_sizes) tru += pairs(s);
    NameMetrics m = MetricsFromCounts(pred, tru, correct);
    m.papers = profile_of.size();
    out.per_name.emplace(name, m);
    all_pred += pred;
    all_true += tru;
    all_correct += correct;
  }
  if (!out.per_name.empty()) {
    for (const auto& [name, m] : out.per_name) {
      out.macro_precision += m.precision;
      out.macro_recall += m.recall;
      out.macro_f1 += m.f1;
    }
    const double n = static_cast<double>(out.per_name.size());
    out.macro_precision /= n;
    out.macro_recall /= n;
    out.macro_f1 /= n;
  }
  out.micro = MetricsFromCounts(all_pred, all_true, all_correct);
  return out;
}

struct MethodMetrics {
  std::string method;
  PairwiseMetrics metrics;
};

inline constexpr const char* kMacroRow = "__macro__";
inline constexpr const char* kMicroRow = "__micro__";

// method,name,pairwise_precision,pairwise_recall,pairwise_f1 with a macro
// and a micro summary row after each method's per-name rows.
inline std::string MetricsToCsv(const std::vector<MethodMetrics>& rows) {
  std::string out = "method,name,pairwise_precision,pairwise_recall,pairwise_f1\n";
  for (const MethodMetrics& row : rows) {
    for (const auto& [name, m] : row.metrics.per_name) {
      out += row.method + "," + name + "," + FormatFixed(m.precision) + "," + FormatFixed(m.recall) +
             "," + FormatFixed(m.f1) + "\n";
    }
    const PairwiseMetrics& pm = row.metrics;
    out += row.method + "," + kMacroRow + "," + FormatFixed(pm.macro_precision) + "," +
           FormatFixed(pm.macro_recall) + "," + FormatFixed(pm.macro_f1) + "\n";
    out += row.method + "," + kMicroRow + "," + FormatFixed(pm.micro.precision) + "," +
           FormatFixed(pm.micro.recall) + "," + FormatFixed(pm.micro.f1) + "\n";
  }
  return out;
}

// Compact "Method pP pR pF" table of the macro rows.
inline std::string MetricsSummaryTable(const std::vector<MethodMetrics>& rows) {
  std::string out = "method                          pP      pR      pF\n";
  for (const MethodMetrics& row : rows) {
    std::string m = row.method;
    if (m.size() < 30) m += std::string(30 - m.size(), ' ');
    out += m + "  " + FormatFixed(row.metrics.macro_precision, 4) + "  " +
           FormatFixed(row.metrics.macro_recall, 4) + "  " + FormatFixed(row.metrics.macro_f1, 4) +
           "\n";
  }
  return out;
}

struct BaselineOptions {
  Linkage linkage = Linkage::kAverage;
  OrgMatchOptions org;
};

// Binary scores make any threshold in (0, 1) equivalent; 0.5 is used.
inline constexpr double kBinaryTheta = 0.5;

struct BaselineResult {
  Clustering by_name;
  Clustering by_name_org;
  std::vector<MethodMetrics> table;
};

inline BaselineResult RunBaselines(const BipartiteGraph& graph, const Labeling& labeling,
                                   BaselineOptions options = {}) {
  BaselineResult r;
  r.by_name = ClusterAllNames(graph, labeling, NameSimilarity(), kBinaryTheta, options.linkage);
  r.by_name_org =
      ClusterAllNames(graph, labeling, NameOrgSimilarity(options.org), kBinaryTheta, options.linkage);
  r.table.push_back({"ClusterByName", ComputePairwiseMetrics(r.by_name, labeling)});
  r.table.push_back({"ClusterByNameAndOrg", ComputePairwiseMetrics(r.by_name_org, labeling)});
  return r;
}

}  // namespace andis
