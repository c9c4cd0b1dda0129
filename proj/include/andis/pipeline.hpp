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

// Experiment plumbing: a flat key/value configuration, name splits, the
// method dispatcher that turns a config into clusterings and metrics, and
// the run manifest.

#pragma once

#include <charconv>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "andis/cluster.hpp"
#include "andis/common.hpp"
#include "andis/corpus.hpp"
#include "andis/gnn.hpp"
#include "andis/graph.hpp"
#include "andis/stats.hpp"
#include "andis/synth.hpp"
#include "andis/textfeat.hpp"
#include "andis/walks.hpp"

namespace andis {

inline constexpr const char* kToolVersion = "andis 0.1.0";

// ---------------------------------------------------------------------------
// Scalar formatting shared by the config file and report names.

// Shortest text that parses back to the same double.
inline std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) Fail(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buf, end);
}

inline double ParseDouble(const std::string& s, const std::string& key) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
    Fail(ErrorCode::kConfig, key + ": '" + s + "' is not a number");
  }
  return v;
}

inline std::uint64_t ParseUnsigned(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), e, v);
  if (ec != std::errc() || ptr != e || s.empty()) {
    Fail(ErrorCode::kConfig, key + ": '" + s + "' is not a nonnegative integer");
  }
  return v;
}

inline bool ParseBool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  Fail(ErrorCode::kConfig, key + ": '" + s + "' is not a boolean");
}

inline std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Methods

struct MethodSpec {
  enum class Kind { kName, kNameOrg, kRwr, kNode2Vec, kGnnUnsup, kGnnSup };
  Kind kind = Kind::kName;
  GnnArch arch = GnnArch::kPinSage;

  bool supervised() const { return kind == Kind::kGnnSup; }

  std::string label() const {
    switch (kind) {
      case Kind::kName: return "cluster-by-name";
      case Kind::kNameOrg: return "cluster-by-name-org";
      case Kind::kRwr: return "rwr-merge";
      case Kind::kNode2Vec: return "node2vec";
      case Kind::kGnnUnsup: return "gnn-unsup";
      case Kind::kGnnSup: return std::string("gnn-sup:") + GnnArchName(arch);
    }
    return "unknown";
  }

  static MethodSpec Parse(const std::string& s) {
    MethodSpec m;
    if (s == "cluster-by-name") {
      m.kind = Kind::kName;
    } else if (s == "cluster-by-name-org") {
      m.kind = Kind::kNameOrg;
    } else if (s == "rwr-merge") {
      m.kind = Kind::kRwr;
    } else if (s == "node2vec") {
      m.kind = Kind::kNode2Vec;
    } else if (s == "gnn-unsup") {
      m.kind = Kind::kGnnUnsup;
    } else if (s.rfind("gnn-sup:", 0) == 0) {
      m.kind = Kind::kGnnSup;
      m.arch = ParseGnnArch(s.substr(8));
    } else {
      Fail(ErrorCode::kConfig, "unknown method '" + s + "'");
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  std::string pubs;
  std::string truth;
  std::string split_file;
  std::string predictions;  // evaluate only
  std::string method = "cluster-by-name";
  double theta = 0.5;
  std::vector<double> thetas = {0.0, 0.5, 0.8, 0.95};
  Linkage linkage = Linkage::kAverage;
  // "auto" evaluates supervised methods on test names and the rest on all
  // names; "all" and "test" force one or the other.
  std::string eval_names = "auto";
  double train_fraction = 0.75;
  double val_fraction = 0.10;
  bool distinct_empty_org = false;
  OrgMatchOptions org;
  RwrConfig rwr;
  Node2VecConfig n2v;
  SgnsConfig n2v_sgns = DefaultNodeSgns();
  DocModelConfig text;  // shared by title, abstract and org models
  GnnConfig gnn;
  std::size_t gnn_unsup_epochs = 10;
  std::size_t gnn_sup_epochs = 60;
  SynthConfig synth;
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::string out_dir = "out";

  struct Key {
    std::string name;
    std::string help;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
  };

  static const std::vector<Key>& Keys() {
    static const std::vector<Key> keys = BuildKeys();
    return keys;
  }

  static const Key& Find(const std::string& name) {
    for (const Key& k : Keys()) {
      if (k.name == name) return k;
    }
    Fail(ErrorCode::kConfig, "unknown config key '" + name + "'");
  }

  void Set(const std::string& key, const std::string& value) { Find(key).set(*this, value); }
  std::string Get(const std::string& key) const { return Find(key).get(*this); }

  std::map<std::string, std::string> ToMap() const {
    std::map<std::string, std::string> out;
    for (const Key& k : Keys()) out[k.name] = k.get(*this);
    return out;
  }

  // "key = value" per line in registry order.
  std::string ToText() const {
    std::string out;
    for (const Key& k : Keys()) out += k.name + " = " + k.get(*this) + "\n";
    return out;
  }

  // Lines of "key = value"; '#' starts a comment. Unset keys keep defaults.
  static ExperimentConfig FromText(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        Fail(ErrorCode::kParse, "config line " + std::to_string(lineno) + ": expected key = value");
      }
      c.Set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  static ExperimentConfig Load(const std::string& path) { return FromText(ReadFile(path)); }

  MethodSpec method_spec() const { return MethodSpec::Parse(method); }

  FeatureConfig features() const { return {text, text, text}; }

  GnnConfig gnn_config(bool supervised) const {
    GnnConfig g = gnn;
    g.epochs = supervised ? gnn_sup_epochs : gnn_unsup_epochs;
    g.seed = DeriveSeed(seed, supervised ? "gnn-sup" : "gnn-unsup");
    return g;
  }

  void Validate() const {
    method_spec();
    if (eval_names != "auto" && eval_names != "all" && eval_names != "test") {
      Fail(ErrorCode::kConfig, "eval_names must be auto, all or test");
    }
    if (!(train_fraction > 0 && val_fraction >= 0 && train_fraction + val_fraction < 1)) {
      Fail(ErrorCode::kConfig, "split fractions must leave room for test names");
    }
    if (thetas.empty()) Fail(ErrorCode::kConfig, "thetas must not be empty");
    rwr.Validate();
    n2v.Validate();
    n2v_sgns.Validate();
    text.Sgns().Validate();
    gnn.Validate();
    synth.Validate();
    if (gnn_unsup_epochs == 0 || gnn_sup_epochs == 0) Fail(ErrorCode::kConfig, "gnn epochs must be positive");
  }

 private:
  static std::vector<Key> BuildKeys() {
    std::vector<Key> k;
    auto str = [&](const char* name, const char* help, std::string ExperimentConfig::*field) {
      k.push_back({name, help, [field](const ExperimentConfig& c) { return c.*field; },
                   [field](ExperimentConfig& c, const std::string& v) { c.*field = v; }});
    };
    auto real = [&](const char* name, const char* help, auto getter) {
      k.push_back({name, help, [getter](const ExperimentConfig& c) {
                     return FormatDouble(getter(const_cast<ExperimentConfig&>(c)));
                   },
                   [getter, name](ExperimentConfig& c, const std::string& v) { getter(c) = ParseDouble(v, name); }});
    };
    auto count = [&](const char* name, const char* help, auto getter) {
      k.push_back({name, help, [getter](const ExperimentConfig& c) {
                     return std::to_string(getter(const_cast<ExperimentConfig&>(c)));
                   },
                   [getter, name](ExperimentConfig& c, const std::string& v) {
                     getter(c) = static_cast<std::remove_reference_t<decltype(getter(c))>>(ParseUnsigned(v, name));
                   }});
    };
    auto flag = [&](const char* name, const char* help, auto getter) {
      k.push_back({name, help,
                   [getter](const ExperimentConfig& c) {
                     return std::string(getter(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
                   },
                   [getter, name](ExperimentConfig& c, const std::string& v) { getter(c) = ParseBool(v, name); }});
    };
    using C = ExperimentConfig;
    str("pubs", "publications JSON", &C::pubs);
    str("truth", "ground-truth JSON", &C::truth);
    str("split_file", "name split JSON (train/val/test lists); empty = seeded split", &C::split_file);
    str("predictions", "clustering JSON scored by evaluate", &C::predictions);
    k.push_back({"method", "cluster-by-name | cluster-by-name-org | rwr-merge | node2vec | gnn-unsup | gnn-sup:ARCH",
                 [](const C& c) { return c.method; },
                 [](C& c, const std::string& v) {
                   MethodSpec::Parse(v);
                   c.method = v;
                 }});
    real("theta", "clustering threshold for run", [](C& c) -> double& { return c.theta; });
    k.push_back({"thetas", "comma-separated thresholds for sweep",
                 [](const C& c) {
                   std::string s;
                   for (double t : c.thetas) s += (s.empty() ? "" : ",") + FormatDouble(t);
                   return s;
                 },
                 [](C& c, const std::string& v) {
                   c.thetas.clear();
                   for (const std::string& t : SplitList(v)) c.thetas.push_back(ParseDouble(t, "thetas"));
                 }});
    k.push_back({"linkage", "single | average | complete", [](const C& c) { return std::string(LinkageName(c.linkage)); },
                 [](C& c, const std::string& v) { c.linkage = ParseLinkage(v); }});
    str("eval_names", "auto | all | test", &C::eval_names);
    real("train_fraction", "share of names used for training", [](C& c) -> double& { return c.train_fraction; });
    real("val_fraction", "share of names held for validation", [](C& c) -> double& { return c.val_fraction; });
    flag("distinct_empty_org", "keep empty-org author occurrences apart", [](C& c) -> bool& { return c.distinct_empty_org; });
    real("org_threshold", "org similarity needed by cluster-by-name-org", [](C& c) -> double& { return c.org.threshold; });
    flag("plain_jaro", "use Jaro instead of Jaro-Winkler for orgs", [](C& c) -> bool& { return c.org.plain_jaro; });
    real("rwr_alpha", "restart probability", [](C& c) -> double& { return c.rwr.alpha; });
    count("rwr_epochs", "passes over author nodes", [](C& c) -> std::size_t& { return c.rwr.epochs; });
    count("rwr_walk_length", "steps per walk", [](C& c) -> std::uint64_t& { return c.rwr.walk_length; });
    count("rwr_threshold", "visit count needed to merge", [](C& c) -> std::uint64_t& { return c.rwr.threshold; });
    real("n2v_p", "return parameter", [](C& c) -> double& { return c.n2v.p; });
    real("n2v_q", "in-out parameter", [](C& c) -> double& { return c.n2v.q; });
    count("n2v_walk_length", "nodes per walk", [](C& c) -> std::size_t& { return c.n2v.walk_length; });
    count("n2v_walks_per_node", "walks started per node", [](C& c) -> std::size_t& { return c.n2v.walks_per_node; });
    count("n2v_dim", "node embedding width", [](C& c) -> std::size_t& { return c.n2v_sgns.dim; });
    count("n2v_window", "skip-gram window", [](C& c) -> std::size_t& { return c.n2v_sgns.window; });
    count("n2v_negatives", "negatives per example", [](C& c) -> std::size_t& { return c.n2v_sgns.negatives; });
    count("n2v_epochs", "passes over the walks", [](C& c) -> std::size_t& { return c.n2v_sgns.epochs; });
    real("n2v_learning_rate", "initial skip-gram rate", [](C& c) -> double& { return c.n2v_sgns.learning_rate; });
    count("text_dim", "title/abstract/org embedding width", [](C& c) -> std::size_t& { return c.text.dim; });
    count("text_window", "paragraph-vector window", [](C& c) -> std::size_t& { return c.text.window; });
    count("text_negatives", "negatives per example", [](C& c) -> std::size_t& { return c.text.negatives; });
    count("text_epochs", "passes over the documents", [](C& c) -> std::size_t& { return c.text.epochs; });
    real("text_learning_rate", "initial rate", [](C& c) -> double& { return c.text.learning_rate; });
    k.push_back({"gnn_arch", "encoder for gnn-unsup: gcn | graphsage | pinsage | mlp",
                 [](const C& c) { return std::string(GnnArchName(c.gnn.arch)); },
                 [](C& c, const std::string& v) { c.gnn.arch = ParseGnnArch(v); }});
    count("gnn_hidden", "hidden width", [](C& c) -> std::size_t& { return c.gnn.hidden; });
    count("gnn_out", "embedding width", [](C& c) -> std::size_t& { return c.gnn.out; });
    count("gnn_layers", "message-passing layers (1 or 2)", [](C& c) -> std::size_t& { return c.gnn.layers; });
    k.push_back({"gnn_fanouts", "comma-separated neighbors per hop",
                 [](const C& c) {
                   std::string s;
                   for (std::size_t f : c.gnn.fanouts) s += (s.empty() ? "" : ",") + std::to_string(f);
                   return s;
                 },
                 [](C& c, const std::string& v) {
                   c.gnn.fanouts.clear();
                   for (const std::string& t : SplitList(v)) c.gnn.fanouts.push_back(ParseUnsigned(t, "gnn_fanouts"));
                 }});
    count("gnn_gcn_cap", "neighbor cap for gcn", [](C& c) -> std::size_t& { return c.gnn.gcn_cap; });
    count("gnn_head_hidden", "Siamese hidden width", [](C& c) -> std::size_t& { return c.gnn.head_hidden; });
    real("gnn_learning_rate", "gradient step", [](C& c) -> double& { return c.gnn.learning_rate; });
    count("gnn_batch", "examples per step", [](C& c) -> std::size_t& { return c.gnn.batch; });
    count("gnn_unsup_epochs", "unsupervised epochs", [](C& c) -> std::size_t& { return c.gnn_unsup_epochs; });
    count("gnn_sup_epochs", "supervised epochs", [](C& c) -> std::size_t& { return c.gnn_sup_epochs; });
    real("gnn_delta", "margin of the unsupervised loss", [](C& c) -> double& { return c.gnn.delta; });
    k.push_back({"gnn_hinge", "max-margin | paper-literal",
                 [](const C& c) { return std::string(HingeModeName(c.gnn.hinge)); },
                 [](C& c, const std::string& v) { c.gnn.hinge = ParseHingeMode(v); }});
    real("gnn_negative_ratio", "negative pairs per positive", [](C& c) -> double& { return c.gnn.negative_ratio; });
    count("gnn_importance_steps", "pinsage importance walk length", [](C& c) -> std::size_t& { return c.gnn.importance_steps; });
    real("gnn_importance_restart", "pinsage importance restart", [](C& c) -> double& { return c.gnn.importance_restart; });
    count("gnn_grad_check_coords", "coordinates checked before training (0 = off)",
          [](C& c) -> std::size_t& { return c.gnn.grad_check_coords; });
    count("synth_names", "ambiguous names generated", [](C& c) -> std::size_t& { return c.synth.names; });
    count("synth_profiles", "profiles per name", [](C& c) -> std::size_t& { return c.synth.profiles_per_name; });
    count("synth_papers", "papers per profile", [](C& c) -> std::size_t& { return c.synth.papers_per_profile; });
    count("synth_coauthor_pool", "coauthors per profile community",
          [](C& c) -> std::size_t& { return c.synth.coauthor_pool; });
    count("synth_min_coauthors", "fewest coauthors per paper", [](C& c) -> std::size_t& { return c.synth.min_coauthors; });
    count("synth_max_coauthors", "most coauthors per paper", [](C& c) -> std::size_t& { return c.synth.max_coauthors; });
    real("synth_contamination", "chance a coauthor comes from a same-name profile",
         [](C& c) -> double& { return c.synth.contamination; });
    real("synth_org_typo_rate", "chance an affiliation string gets a typo",
         [](C& c) -> double& { return c.synth.org_typo_rate; });
    real("synth_missing_org_rate", "chance an affiliation is dropped",
         [](C& c) -> double& { return c.synth.missing_org_rate; });
    real("synth_missing_abstract_rate", "chance an abstract is dropped",
         [](C& c) -> double& { return c.synth.missing_abstract_rate; });
    count("synth_orgs_per_profile", "affiliations held per profile",
          [](C& c) -> std::size_t& { return c.synth.orgs_per_profile; });
    count("synth_topics", "topic vocabularies", [](C& c) -> std::size_t& { return c.synth.topics; });
    count("seed", "run seed", [](C& c) -> std::uint64_t& { return c.seed; });
    flag("deterministic", "single-threaded, reproducible numerics", [](C& c) -> bool& { return c.deterministic; });
    str("out_dir", "output directory", &C::out_dir);
    return k;
  }
};

// ---------------------------------------------------------------------------
// Name splits

struct NameSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  Json ToJson() const { return {{"train", train}, {"val", val}, {"test", test}}; }

  static NameSplit FromJson(const Json& j) {
    NameSplit s;
    try {
      s.train = j.at("train").get<std::vector<std::string>>();
      s.val = j.value("val", std::vector<std::string>{});
      s.test = j.at("test").get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse, std::string("name split: ") + e.what());
    }
    for (auto* list : {&s.train, &s.val, &s.test}) {
      for (std::string& n : *list) n = NormalizeName(n);
    }
    return s;
  }

  // Seeded shuffle of the sorted names, cut by fractions. With at least two
  // names both train and test are nonempty.
  static NameSplit Make(std::vector<std::string> names, double train_fraction, double val_fraction,
                        std::uint64_t seed) {
    std::sort(names.begin(), names.end());
    Rng rng(DeriveSeed(seed, "split"));
    rng.Shuffle(names);
    const std::size_t n = names.size();
    auto ntrain = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    auto nval = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
    if (n >= 2) ntrain = std::clamp<std::size_t>(ntrain, 1, n - 1);
    nval = std::min(nval, n - std::min(n, ntrain + (n >= 2 ? 1 : 0)));
    NameSplit s;
    s.train.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(std::min(ntrain, n)));
    s.val.assign(names.begin() + static_cast<std::ptrdiff_t>(s.train.size()),
                 names.begin() + static_cast<std::ptrdiff_t>(s.train.size() + nval));
    s.test.assign(names.begin() + static_cast<std::ptrdiff_t>(s.train.size() + nval), names.end());
    for (auto* list : {&s.train, &s.val, &s.test}) std::sort(list->begin(), list->end());
    return s;
  }

  // Lists must be disjoint and name only labeled names.
  void Validate(const Labeling& truth) const {
    std::set<std::string> seen;
    for (const auto* list : {&train, &val, &test}) {
      for (const std::string& n : *list) {
        if (!truth.names.count(n)) Fail(ErrorCode::kDataIntegrity, "split names unknown author " + n);
        if (!seen.insert(n).second) Fail(ErrorCode::kDataIntegrity, "split lists " + n + " twice");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Inputs and results

struct ExperimentInputs {
  Corpus corpus;
  Labeling truth;
  NameSplit split;
  std::uint64_t pubs_checksum = 0;
  std::uint64_t truth_checksum = 0;

  // Node features depend only on the text settings, the seed and the graph
  // build option; several methods over the same inputs share them.
  const NodeFeatures& Features(const ExperimentConfig& c, const BipartiteGraph& graph) const {
    const std::string key = std::to_string(c.seed) + "|" + c.Get("text_dim") + "|" + c.Get("text_window") + "|" +
                            c.Get("text_negatives") + "|" + c.Get("text_epochs") + "|" +
                            c.Get("text_learning_rate") + "|" + c.Get("distinct_empty_org");
    auto it = feature_cache_.find(key);
    if (it == feature_cache_.end()) {
      const FeatureModels models = TrainFeatureModels(corpus, c.features(), DeriveSeed(c.seed, "features"));
      it = feature_cache_.emplace(key, AssembleFeatures(graph, corpus, models)).first;
    }
    return it->second;
  }

 private:
  mutable std::map<std::string, NodeFeatures> feature_cache_;
};

inline ExperimentInputs PrepareInputs(Corpus corpus, Labeling truth, const ExperimentConfig& c) {
  ExperimentInputs in;
  in.corpus = std::move(corpus);
  in.truth = std::move(truth);
  if (!c.split_file.empty()) {
    in.split = NameSplit::FromJson(detail::ParseTopLevelObject(ReadFile(c.split_file), "name split"));
  } else {
    in.split = NameSplit::Make(in.truth.name_keys(), c.train_fraction, c.val_fraction, c.seed);
  }
  in.split.Validate(in.truth);
  in.pubs_checksum = Fnv1a64(PublicationsToJson(in.corpus).dump());
  in.truth_checksum = Fnv1a64(LabelingToJson(in.truth).dump());
  return in;
}

inline ExperimentInputs LoadInputs(const ExperimentConfig& c) {
  if (c.pubs.empty()) Fail(ErrorCode::kConfig, "pubs is not set");
  if (c.truth.empty()) Fail(ErrorCode::kConfig, "truth is not set");
  Corpus corpus = LoadPublications(c.pubs);
  Labeling truth = LoadGroundTruth(c.truth, &corpus);
  ExperimentInputs in = PrepareInputs(std::move(corpus), std::move(truth), c);
  in.pubs_checksum = FileChecksum(c.pubs);
  in.truth_checksum = FileChecksum(c.truth);
  return in;
}

struct SweepPoint {
  double theta = 0;
  Clustering clustering;
  PairwiseMetrics metrics;
};

struct ExperimentResult {
  std::string method;
  std::vector<std::string> eval_names;
  std::vector<SweepPoint> points;
  Json diagnostics = Json::object();

  std::vector<MethodMetrics> MetricsRows(bool label_theta) const {
    std::vector<MethodMetrics> rows;
    for (const SweepPoint& p : points) {
      rows.push_back({label_theta ? method + "@" + FormatDouble(p.theta) : method, p.metrics});
    }
    return rows;
  }
};

namespace detail {

inline Json ReportToJson(const TrainReport& r) {
  return {{"epoch_loss", r.epoch_loss},
          {"grad_check_error", r.grad_check_error},
          {"grad_check_coords", r.grad_check_coords},
          {"params_checksum", HexU64(r.params_checksum)},
          {"seed", r.seed},
          {"examples", r.examples}};
}

}  // namespace detail

// Runs the configured method and clusters the evaluated names at every
// threshold in `thetas`.
inline ExperimentResult RunExperiment(const ExperimentConfig& c, const ExperimentInputs& in,
                                      const std::vector<double>& thetas) {
  c.Validate();
  const MethodSpec spec = c.method_spec();
  ExperimentResult result;
  result.method = spec.label();
  const bool test_only = c.eval_names == "test" || (c.eval_names == "auto" && spec.supervised());
  const Labeling eval = test_only ? in.truth.restricted_to(in.split.test) : in.truth;
  result.eval_names = eval.name_keys();
  const BipartiteGraph graph = BipartiteGraph::Build(in.corpus, {c.distinct_empty_org});

  auto cluster_all = [&](const SimilarityFunction& sim) {
    for (double theta : thetas) {
      SweepPoint p;
      p.theta = theta;
      p.clustering = ClusterAllNames(graph, eval, sim, theta, c.linkage);
      p.clustering.method = result.method;
      p.clustering.seed = c.seed;
      p.metrics = ComputePairwiseMetrics(p.clustering, eval);
      result.points.push_back(std::move(p));
    }
  };

  switch (spec.kind) {
    case MethodSpec::Kind::kName: cluster_all(NameSimilarity()); break;
    case MethodSpec::Kind::kNameOrg: cluster_all(NameOrgSimilarity(c.org)); break;
    case MethodSpec::Kind::kRwr: {
      BipartiteGraph merged = graph;
      RwrConfig rc = c.rwr;
      rc.seed = DeriveSeed(c.seed, "rwr");
      const RwrResult r = RwrMerge(merged, rc);
      result.diagnostics["walks"] = r.walks;
      result.diagnostics["merges"] = r.merges;
      result.diagnostics["live_authors_per_epoch"] = r.live_authors_per_epoch;
      Clustering cl;
      cl.method = result.method;
      cl.seed = c.seed;
      for (const std::string& name : result.eval_names) {
        cl.by_name[name] = merged.ComponentsToClustering(name, eval.papers_of(name));
      }
      // Merging has no threshold; every sweep point shares one clustering.
      const PairwiseMetrics m = ComputePairwiseMetrics(cl, eval);
      for (double theta : thetas) {
        SweepPoint p{theta, cl, m};
        p.clustering.theta = theta;
        result.points.push_back(std::move(p));
      }
      break;
    }
    case MethodSpec::Kind::kNode2Vec: {
      Node2VecConfig nc = c.n2v;
      nc.seed = DeriveSeed(c.seed, "walks");
      const WalkCorpus walks = Node2VecWalks(graph, nc);
      const NodeEmbeddings emb = TrainSkipGram(walks, graph.num_nodes(), c.n2v_sgns, DeriveSeed(c.seed, "skipgram"));
      result.diagnostics["walks"] = walks.walks.size();
      result.diagnostics["epoch_loss"] = emb.epoch_loss;
      cluster_all(EmbeddingSimilarity(emb));
      break;
    }
    case MethodSpec::Kind::kGnnUnsup:
    case MethodSpec::Kind::kGnnSup: {
      const NodeFeatures& x = in.Features(c, graph);
      GnnConfig gc = c.gnn_config(spec.supervised());
      if (spec.supervised()) gc.arch = spec.arch;
      NeighborSampler sampler(graph, gc);
      TrainedGnn trained;
      if (spec.supervised()) {
        const std::vector<PairExample> pairs = BuildPairDataset(in.truth.restricted_to(in.split.train), graph,
                                                                gc.negative_ratio, DeriveSeed(c.seed, "pairs"));
        result.diagnostics["pairs"] = pairs.size();
        trained = TrainSupervised(graph, x, pairs, gc);
      } else {
        trained = TrainUnsupervised(graph, x, gc);
      }
      result.diagnostics["train"] = detail::ReportToJson(trained.report);
      const GnnEmbeddingTable table = EmbedAuthors(trained.params, sampler, x, DeriveSeed(c.seed, "embed"));
      if (spec.supervised()) {
        cluster_all(SiameseSimilarity(trained.params, table, result.method));
      } else {
        cluster_all(GnnCosineSimilarity(table, result.method));
      }
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output files and manifest

struct RunFiles {
  std::map<std::string, std::string> files;  // relative name -> content
};

inline std::string ThetaTag(double theta) { return FormatFixed(theta, 4); }

// Clustering and metrics files for a run (first threshold only) or a sweep
// (every threshold plus a summary table).
inline RunFiles RenderOutputs(const ExperimentResult& r, bool sweep) {
  RunFiles out;
  if (r.points.empty()) Fail(ErrorCode::kInvalidArgument, "no results to write");
  if (!sweep) {
    out.files["clustering.json"] = ClusteringToJson(r.points.front().clustering).dump(1) + "\n";
    out.files["metrics.csv"] = MetricsToCsv(r.MetricsRows(false));
    return out;
  }
  std::string summary = "method,theta,clusters,macro_precision,macro_recall,macro_f1,micro_precision,micro_recall,micro_f1\n";
  for (const SweepPoint& p : r.points) {
    out.files["clustering_theta_" + ThetaTag(p.theta) + ".json"] = ClusteringToJson(p.clustering).dump(1) + "\n";
    summary += r.method + "," + FormatDouble(p.theta) + "," + std::to_string(p.clustering.cluster_count()) + "," +
               FormatFixed(p.metrics.macro_precision) + "," + FormatFixed(p.metrics.macro_recall) + "," +
               FormatFixed(p.metrics.macro_f1) + "," + FormatFixed(p.metrics.micro.precision) + "," +
               FormatFixed(p.metrics.micro.recall) + "," + FormatFixed(p.metrics.micro.f1) + "\n";
  }
  out.files["metrics.csv"] = MetricsToCsv(r.MetricsRows(true));
  out.files["sweep.csv"] = summary;
  return out;
}

inline Json BuildManifest(const std::string& command, const ExperimentConfig& c, const ExperimentInputs& in,
                          const RunFiles& files, double wall_seconds) {
  Json config = Json::object();
  for (const auto& [k, v] : c.ToMap()) config[k] = v;
  Json outputs = Json::object();
  for (const auto& [name, content] : files.files) outputs[name] = HexU64(Fnv1a64(content));
  return {{"format", "andis-manifest"},
          {"version", 1},
          {"tool", kToolVersion},
          {"command", command},
          {"seed", c.seed},
          {"deterministic", c.deterministic},
          {"config", config},
          {"split", in.split.ToJson()},
          {"inputs", {{"pubs", {{"path", c.pubs}, {"checksum", HexU64(in.pubs_checksum)}}},
                      {"truth", {{"path", c.truth}, {"checksum", HexU64(in.truth_checksum)}}}}},
          {"outputs", outputs},
          {"wall_seconds", wall_seconds}};
}

// Config recorded in a manifest, with the name split pinned to the one the
// manifest recorded.
struct ManifestRun {
  std::string command;
  ExperimentConfig config;
  NameSplit split;
  std::uint64_t pubs_checksum = 0;
  std::uint64_t truth_checksum = 0;
};

inline ManifestRun ReadManifest(const std::string& path) {
  const Json j = detail::ParseTopLevelObject(ReadFile(path), "manifest");
  ManifestRun m;
  try {
    if (j.at("format") != "andis-manifest") Fail(ErrorCode::kParse, path + " is not a run manifest");
    m.command = j.at("command").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) m.config.Set(k, v.get<std::string>());
    m.split = NameSplit::FromJson(j.at("split"));
    m.pubs_checksum = std::stoull(j.at("inputs").at("pubs").at("checksum").get<std::string>(), nullptr, 16);
    m.truth_checksum = std::stoull(j.at("inputs").at("truth").at("checksum").get<std::string>(), nullptr, 16);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, "manifest: " + std::string(e.what()));
  }
  return m;
}

inline void WriteRunFiles(const RunFiles& files, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files.files) WriteFile(dir + "/" + name, content);
}

// Whole `run`/`sweep` command: load, run, write outputs and manifest.
// Returns the result for callers that also want it in memory.
inline ExperimentResult ExecuteCommand(const std::string& command, const ExperimentConfig& c,
                                       const NameSplit* pinned_split = nullptr,
                                       const std::pair<std::uint64_t, std::uint64_t>* expect_checksums = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  c.Validate();
  ExperimentInputs in = LoadInputs(c);
  if (expect_checksums &&
      (in.pubs_checksum != expect_checksums->first || in.truth_checksum != expect_checksums->second)) {
    Fail(ErrorCode::kDataIntegrity, "input files changed since the manifest was written");
  }
  if (pinned_split) {
    pinned_split->Validate(in.truth);
    in.split = *pinned_split;
  }
  const bool sweep = command == "sweep";
  const ExperimentResult r = RunExperiment(c, in, sweep ? c.thetas : std::vector<double>{c.theta});
  RunFiles files = RenderOutputs(r, sweep);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest = BuildManifest(command, c, in, files, secs);
  manifest["diagnostics"] = r.diagnostics;
  WriteRunFiles(files, c.out_dir);
  WriteFile(c.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return r;
}

// ---------------------------------------------------------------------------
// Other commands

// Writes publications.json and ground_truth.json into the output directory.
inline SynthData ExecuteSynth(const ExperimentConfig& c) {
  c.synth.Validate();
  SynthData d = SynthGenerate(c.synth, c.seed);
  std::filesystem::create_directories(c.out_dir);
  SavePublications(d.corpus, c.out_dir + "/publications.json");
  SaveLabeling(d.labeling, c.out_dir + "/ground_truth.json");
  return d;
}

// Ground truth is optional for stats; without it the per-profile series stay
// empty.
inline StatsReport ExecuteStats(const ExperimentConfig& c) {
  if (c.pubs.empty()) Fail(ErrorCode::kConfig, "pubs is not set");
  const Corpus corpus = LoadPublications(c.pubs);
  const Labeling truth = c.truth.empty() ? Labeling{} : LoadGroundTruth(c.truth, &corpus);
  const BipartiteGraph graph = BipartiteGraph::Build(corpus, {c.distinct_empty_org});
  StatsReport r = CorpusStats(corpus, truth, graph);
  WriteStats(r, c.out_dir);
  return r;
}

// Scores a predictions file (ground-truth shape) against the truth and
// writes metrics.csv. Only names present in the predictions are scored.
inline PairwiseMetrics ExecuteEvaluate(const ExperimentConfig& c) {
  if (c.predictions.empty()) Fail(ErrorCode::kConfig, "predictions is not set");
  if (c.truth.empty()) Fail(ErrorCode::kConfig, "truth is not set");
  const Labeling pred = LoadGroundTruth(c.predictions, nullptr, {.strict = true});
  const Labeling truth = LoadGroundTruth(c.truth, nullptr);
  const PairwiseMetrics m = ComputePairwiseMetrics(ClusteringFromLabeling(pred), truth);
  std::filesystem::create_directories(c.out_dir);
  WriteFile(c.out_dir + "/metrics.csv", MetricsToCsv({{"predicted", m}}));
  return m;
}

}  // namespace andis
