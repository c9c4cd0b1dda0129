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

// Synthetic labeled corpora.
//
// Every ambiguous name owns several profiles. A profile is a real person:
// it has its own pool of coauthors, a research topic that drives title,
// abstract, venue and keyword vocabulary, and a career sequence of
// affiliations. With zero contamination the coauthor pools of different
// profiles never intersect, so coauthorship alone separates profiles.

#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "andis/common.hpp"
#include "andis/corpus.hpp"
#include "andis/strsim.hpp"

namespace andis {

struct SynthConfig {
  std::size_t names = 20;
  std::size_t profiles_per_name = 3;
  std::size_t papers_per_profile = 15;
  std::size_t coauthor_pool = 8;
  std::size_t min_coauthors = 2;
  std::size_t max_coauthors = 4;
  // Probability that a coauthor slot is filled from another profile's pool
  // under the same name; the ambiguous author's affiliation is borrowed from
  // such a profile with the same probability.
  double contamination = 0.0;
  double org_typo_rate = 0.0;
  double missing_org_rate = 0.0;
  double missing_abstract_rate = 0.0;
  // Affiliations held over a career; papers walk through them in order.
  std::size_t orgs_per_profile = 1;
  std::size_t topics = 12;
  int first_year = 1995;
  int last_year = 2019;

  void Validate() const {
    auto bad = [](const std::string& m) { Fail(ErrorCode::kConfig, "synth: " + m); };
    if (names == 0) bad("names must be positive");
    if (profiles_per_name == 0) bad("profiles_per_name must be positive");
    if (papers_per_profile == 0) bad("papers_per_profile must be positive");
    if (orgs_per_profile == 0) bad("orgs_per_profile must be positive");
    if (min_coauthors > max_coauthors) bad("min_coauthors exceeds max_coauthors");
    if (max_coauthors > 0 && coauthor_pool == 0) bad("coauthor_pool must be positive");
    if (topics < profiles_per_name) bad("topics must be at least profiles_per_name");
    for (double r : {contamination, org_typo_rate, missing_org_rate, missing_abstract_rate}) {
      if (!(r >= 0.0 && r <= 1.0)) bad("rates must lie in [0, 1]");
    }
    if (first_year < kMinYear || last_year > kMaxYear || first_year > last_year) bad("bad year range");
  }
};

struct SynthData {
  Corpus corpus;
  Labeling labeling;
};

namespace detail {

class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {}

  // Pronounceable pseudo-word, unique within this factory.
  std::string Fresh(std::size_t min_syllables, std::size_t max_syllables) {
    static const char* kOnsets[] = {"b", "c", "d", "f", "g", "h", "j", "k", "l", "m",
                                    "n", "p", "r", "s", "t", "v", "w", "z", "br", "ch",
                                    "dr", "gr", "kl", "pr", "sh", "st", "tr", "th"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ei", "ou", "ia", "eo"};
    static const char* kCodas[] = {"", "", "", "n", "r", "l", "s", "m", "k", "x"};
    for (;;) {
      const std::size_t n = min_syllables + rng_.Below(max_syllables - min_syllables + 1);
      std::string w;
      for (std::size_t i = 0; i < n; ++i) {
        w += kOnsets[rng_.Below(std::size(kOnsets))];
        w += kVowels[rng_.Below(std::size(kVowels))];
        if (i + 1 == n) w += kCodas[rng_.Below(std::size(kCodas))];
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

inline std::string Capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

inline std::string MakeOrg(WordFactory& words, Rng& rng) {
  const std::string w = Capitalize(words.Fresh(2, 3));
  const std::string v = Capitalize(words.Fresh(2, 3));
  switch (rng.Below(6)) {
    case 0: return w + " University";
    case 1: return "University of " + w;
    case 2: return w + " Institute of Technology";
    case 3: return "Department of Physics, " + w + " " + v + " University";
    case 4: return w + " National Laboratory";
    default: return w + " " + v + " Research Center";
  }
}

// One random single-letter edit inside the org string.
inline std::string Typo(const std::string& s, Rng& rng) {
  if (s.size() < 2) return s;
  std::string out = s;
  const std::size_t pos = rng.Below(out.size());
  const char letter = static_cast<char>('a' + rng.Below(26));
  switch (rng.Below(3)) {
    case 0: out[pos] = letter; break;
    case 1: out.erase(pos, 1); break;
    default: out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), letter); break;
  }
  return out;
}

inline std::string MakePaperId(Rng& rng) {
  static const char* kHex = "0123456789abcdef";
  std::string id(24, '0');
  for (char& c : id) c = kHex[rng.Below(16)];
  return id;
}

}  // namespace detail

// Deterministic in (config, seed).
inline SynthData SynthGenerate(const SynthConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(DeriveSeed(seed, "synth"));
  detail::WordFactory words(rng);

  struct Person {
    std::string name;
    std::string org;
  };
  struct Profile {
    std::string name_key;
    std::string profile_id;
    std::vector<std::string> raw_names;
    std::vector<std::string> orgs;
    std::vector<Person> pool;
    std::size_t topic = 0;
    int start_year = 0;
  };

  // Topic vocabularies and a shared background vocabulary.
  std::vector<std::vector<std::string>> topic_words(config.topics);
  std::vector<std::vector<std::string>> topic_venues(config.topics);
  for (std::size_t t = 0; t < config.topics; ++t) {
    for (int i = 0; i < 25; ++i) topic_words[t].push_back(words.Fresh(2, 3));
    for (int i = 0; i < 3; ++i) {
      topic_venues[t].push_back((i % 2 ? "Journal of " : "Proceedings of ") +
                                detail::Capitalize(words.Fresh(2, 3)) + " " +
                                detail::Capitalize(topic_words[t][static_cast<std::size_t>(i)]));
    }
  }
  std::vector<std::string> common_words;
  for (int i = 0; i < 40; ++i) common_words.push_back(words.Fresh(1, 2));

  std::set<std::string> used_name_keys;
  auto fresh_person_name = [&]() {
    for (;;) {
      std::string given = detail::Capitalize(words.Fresh(1, 2));
      std::string family = detail::Capitalize(words.Fresh(1, 2));
      std::string raw = given + " " + family;
      if (used_name_keys.insert(NormalizeName(raw)).second) return std::make_pair(given, family);
    }
  };

  std::vector<std::vector<Profile>> by_name(config.names);
  for (std::size_t n = 0; n < config.names; ++n) {
    auto [given, family] = fresh_person_name();
    const std::string key = NormalizeName(given + " " + family);
    std::string upper = given + " " + family;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const std::vector<std::string> variants = {given + " " + family, given + "-" + family,
                                               upper, given + "  " + family};
    std::vector<std::string> name_orgs;  // normalized, across all profiles of this name
    for (std::size_t p = 0; p < config.profiles_per_name; ++p) {
      Profile prof;
      prof.name_key = key;
      prof.profile_id = key + "_p" + std::to_string(p);
      prof.raw_names = variants;
      prof.topic = (n * 5 + p) % config.topics;
      for (std::size_t o = 0; o < config.orgs_per_profile; ++o) {
        // Affiliations under one name stay pairwise dissimilar so that only
        // typos (not coincidence) produce near-duplicate org strings.
        std::string org;
        for (int attempt = 0; attempt < 200; ++attempt) {
          org = detail::MakeOrg(words, rng);
          const std::string norm = NormalizeOrg(org);
          bool ok = true;
          for (const std::string& other : name_orgs) {
            if (JaroWinkler(norm, other) > 0.9) {
              ok = false;
              break;
            }
          }
          if (ok) break;
        }
        name_orgs.push_back(NormalizeOrg(org));
        prof.orgs.push_back(org);
      }
      for (std::size_t c = 0; c < config.coauthor_pool; ++c) {
        auto [cg, cf] = fresh_person_name();
        Person person{cg + " " + cf, rng.Bernoulli(0.5) ? prof.orgs[rng.Below(prof.orgs.size())]
                                                        : detail::MakeOrg(words, rng)};
        prof.pool.push_back(std::move(person));
      }
      const int span = config.last_year - config.first_year;
      prof.start_year = config.first_year + static_cast<int>(rng.Below(static_cast<std::uint64_t>(span / 2 + 1)));
      by_name[n].push_back(std::move(prof));
    }
  }

  SynthData data;
  std::set<std::string> used_ids;
  auto sample_text = [&](const Profile& prof, std::size_t lo, std::size_t hi) {
    const std::size_t len = lo + rng.Below(hi - lo + 1);
    std::string text;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) text += ' ';
      text += rng.Bernoulli(0.7) ? rng.Pick(topic_words[prof.topic]) : rng.Pick(common_words);
    }
    return text;
  };

  for (std::size_t n = 0; n < config.names; ++n) {
    auto& profiles = by_name[n];
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const Profile& prof = profiles[p];
      std::vector<std::string> paper_ids;
      for (std::size_t k = 0; k < config.papers_per_profile; ++k) {
        Publication pub;
        do {
          pub.id = detail::MakePaperId(rng);
        } while (!used_ids.insert(pub.id).second);
        pub.title = detail::Capitalize(sample_text(prof, 6, 10));
        if (!rng.Bernoulli(config.missing_abstract_rate)) pub.abstract = sample_text(prof, 30, 50);
        pub.venue = rng.Pick(topic_venues[prof.topic]);
        const int career = std::max<int>(1, config.last_year - prof.start_year);
        pub.year = std::min(config.last_year,
                            prof.start_year + static_cast<int>((k * static_cast<std::size_t>(career)) /
                                                               config.papers_per_profile));
        for (int kw = 0; kw < 3; ++kw) pub.keywords.push_back(rng.Pick(topic_words[prof.topic]));

        // The ambiguous author.
        AuthorRef focus;
        focus.raw_name = rng.Pick(prof.raw_names);
        const std::size_t org_index = (k * prof.orgs.size()) / config.papers_per_profile;
        focus.raw_org = prof.orgs[org_index];
        // Contamination also lends the author another same-name profile's
        // affiliation.
        if (config.contamination > 0 && profiles.size() > 1 && rng.Bernoulli(config.contamination)) {
          std::size_t other = rng.Below(profiles.size() - 1);
          if (other >= p) ++other;
          focus.raw_org = rng.Pick(profiles[other].orgs);
        }
        if (rng.Bernoulli(config.org_typo_rate)) focus.raw_org = detail::Typo(focus.raw_org, rng);
        if (rng.Bernoulli(config.missing_org_rate)) focus.raw_org.clear();

        // Coauthors, mostly from the profile's own pool.
        const std::size_t want =
            config.min_coauthors + rng.Below(config.max_coauthors - config.min_coauthors + 1);
        std::vector<std::size_t> order(prof.pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.Shuffle(order);
        std::set<std::string> chosen;
        for (std::size_t slot = 0; slot < std::min(want, order.size()); ++slot) {
          const Person* person = &prof.pool[order[slot]];
          if (profiles.size() > 1 && rng.Bernoulli(config.contamination)) {
            std::size_t other = rng.Below(profiles.size() - 1);
            if (other >= p) ++other;
            person = &rng.Pick(profiles[other].pool);
          }
          if (!chosen.insert(person->name).second) continue;
          pub.authors.push_back({person->name, person->org});
        }
        const std::size_t at = rng.Below(pub.authors.size() + 1);
        pub.authors.insert(pub.authors.begin() + static_cast<std::ptrdiff_t>(at), focus);

        paper_ids.push_back(pub.id);
        data.corpus.pubs.emplace(pub.id, std::move(pub));
      }
      std::sort(paper_ids.begin(), paper_ids.end());
      data.labeling.names[prof.name_key][prof.profile_id] = std::move(paper_ids);
    }
  }
  data.corpus.report.records = data.corpus.pubs.size();
  return data;
}

}  // namespace andis
