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

// Dataset statistics: headline counts plus the distributions usually plotted
// for a disambiguation corpus (profiles per name, papers per profile, venues,
// keywords, years, affiliations per profile).

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "andis/corpus.hpp"
#include "andis/graph.hpp"

namespace andis {

// bucket -> count. Buckets are strings so numeric and categorical series
// share one representation.
using Histogram = std::map<std::string, std::uint64_t>;

struct StatsReport {
  std::uint64_t distinct_names = 0;
  std::uint64_t distinct_profiles = 0;
  std::uint64_t publications = 0;
  std::uint64_t noisy_publications = 0;
  std::uint64_t graph_authors = 0;
  std::uint64_t graph_edges = 0;
  std::uint64_t components = 0;
  std::uint64_t largest_component = 0;
  std::uint64_t profile_memberships = 0;

  Histogram profiles_per_name;      // profile count -> names
  Histogram papers_per_profile;     // paper count -> profiles
  Histogram venues;                 // venue -> papers
  Histogram keywords;               // keyword -> occurrences
  Histogram years;                  // year -> papers
  Histogram orgs_per_profile;       // distinct org count -> profiles

  static const std::vector<std::string>& SeriesNames() {
    static const std::vector<std::string> kNames = {"profiles_per_name", "papers_per_profile",
                                                    "venues",            "keywords",
                                                    "years",             "orgs_per_profile"};
    return kNames;
  }

  const Histogram& Series(const std::string& name) const {
    if (name == "profiles_per_name") return profiles_per_name;
    if (name == "papers_per_profile") return papers_per_profile;
    if (name == "venues") return venues;
    if (name == "keywords") return keywords;
    if (name == "years") return years;
    if (name == "orgs_per_profile") return orgs_per_profile;
    Fail(ErrorCode::kNotFound, "unknown stats series " + name);
  }
};

inline std::uint64_t HistogramTotal(const Histogram& h) {
  std::uint64_t total = 0;
  for (const auto& [bucket, n] : h) total += n;
  return total;
}

// Zero-padded numeric bucket so lexical order equals numeric order.
inline std::string NumericBucket(std::uint64_t v) {
  std::string s = std::to_string(v);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

inline StatsReport CorpusStats(const Corpus& corpus, const Labeling& labeling,
                               const BipartiteGraph& graph) {
  StatsReport r;
  r.distinct_names = labeling.names.size();
  r.distinct_profiles = labeling.profile_count();
  r.publications = corpus.size();
  for (const auto& [id, pub] : corpus.pubs) {
    if (pub.noisy) ++r.noisy_publications;
    if (!pub.venue.empty()) ++r.venues[pub.venue];
    for (const std::string& k : pub.keywords) ++r.keywords[k];
    if (pub.year) ++r.years[std::to_string(*pub.year)];
  }
  r.graph_authors = graph.num_live_authors();
  r.graph_edges = graph.num_edges();
  const std::vector<std::size_t> comps = graph.ConnectedComponents();
  r.components = comps.size();
  r.largest_component = comps.empty() ? 0 : comps.front();

  for (const auto& [name, profiles] : labeling.names) {
    ++r.profiles_per_name[NumericBucket(profiles.size())];
    for (const auto& [pid, papers] : profiles) {
      r.profile_memberships += papers.size();
      ++r.papers_per_profile[NumericBucket(papers.size())];
      std::set<std::string> orgs;
      for (const std::string& paper : papers) {
        auto it = corpus.pubs.find(paper);
        if (it == corpus.pubs.end()) continue;
        const std::string sorted = SortedTokenKey(name);
        for (const AuthorRef& a : it->second.authors) {
          std::vector<std::string> tokens = FoldedTokens(a.raw_name);
          if (tokens.empty()) continue;
          const std::string key = JoinTokens(tokens);
          if (key == name || SortedTokenKey(key) == sorted) {
            const std::string org = NormalizeOrg(a.raw_org);
            if (!org.empty()) orgs.insert(org);
            break;
          }
        }
      }
      ++r.orgs_per_profile[NumericBucket(orgs.size())];
    }
  }
  return r;
}

inline Json HistogramToJson(const Histogram& h) {
  Json out = Json::object();
  for (const auto& [bucket, n] : h) out[bucket] = n;
  return out;
}

inline Json StatsToJson(const StatsReport& r) {
  Json doc;
  doc["distinct_author_names"] = r.distinct_names;
  doc["distinct_author_profiles"] = r.distinct_profiles;
  doc["publications"] = r.publications;
  doc["noisy_publications"] = r.noisy_publications;
  doc["graph_author_nodes"] = r.graph_authors;
  doc["graph_edges"] = r.graph_edges;
  doc["connected_components"] = r.components;
  doc["largest_connected_component"] = r.largest_component;
  doc["profile_memberships"] = r.profile_memberships;
  Json series = Json::object();
  for (const std::string& s : StatsReport::SeriesNames()) series[s] = HistogramToJson(r.Series(s));
  doc["histograms"] = std::move(series);
  return doc;
}

inline std::string HistogramToCsv(const Histogram& h) {
  std::string out = "bucket,count\n";
  for (const auto& [bucket, n] : h) {
    std::string b = bucket;
    if (b.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : b) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      b = quoted + "\"";
    }
    out += b + "," + std::to_string(n) + "\n";
  }
  return out;
}

// Writes stats.json plus one <series>.csv per histogram into `dir`.
inline void WriteStats(const StatsReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  WriteFile(dir + "/stats.json", StatsToJson(r).dump(2) + "\n");
  for (const std::string& s : StatsReport::SeriesNames()) {
    WriteFile(dir + "/" + s + ".csv", HistogramToCsv(r.Series(s)));
  }
}

}  // namespace andis
