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

// Publication records, WhoIsWho-layout ingestion, name/org normalization and
// ground-truth labelings.
//
// Publications file layout:
//   { "<paper id>": { "id": ..., "title": ..., "authors": [{"name", "org"}],
//                     "venue": ..., "year": ..., "keywords": [...],
//                     "abstract": ... }, ... }
// Ground-truth layout:
//   { "<author name>": { "<profile id>": ["<paper id>", ...], ... }, ... }

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "andis/common.hpp"
#include "json.hpp"

namespace andis {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Normalization.

namespace detail {

// ASCII replacement for a Latin-1 / Latin Extended-A code point, or nullptr
// when the code point has no letter equivalent.
inline const char* FoldCodePoint(char32_t cp) {
  static const char* kLatin1[64] = {
      "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
      "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "ss",
      "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
      "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "y"};
  struct Range {
    char32_t first;
    char32_t last;
    const char* ascii;
  };
  static const Range kExtendedA[] = {
      {0x100, 0x105, "a"}, {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"},
      {0x112, 0x11B, "e"}, {0x11C, 0x123, "g"}, {0x124, 0x127, "h"},
      {0x128, 0x131, "i"}, {0x132, 0x133, "ij"}, {0x134, 0x135, "j"},
      {0x136, 0x138, "k"}, {0x139, 0x142, "l"}, {0x143, 0x14B, "n"},
      {0x14C, 0x151, "o"}, {0x152, 0x153, "oe"}, {0x154, 0x159, "r"},
      {0x15A, 0x161, "s"}, {0x162, 0x167, "t"}, {0x168, 0x173, "u"},
      {0x174, 0x175, "w"}, {0x176, 0x178, "y"}, {0x179, 0x17E, "z"},
      {0x17F, 0x17F, "s"}};
  if (cp >= 0xC0 && cp <= 0xFF) return kLatin1[cp - 0xC0];
  for (const Range& r : kExtendedA) {
    if (cp >= r.first && cp <= r.last) return r.ascii;
  }
  return nullptr;
}

// Decodes one UTF-8 sequence starting at s[i]; invalid bytes decode as
// U+FFFD and consume one byte.
inline char32_t DecodeUtf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

}  // namespace detail

// Lowercases, folds accented Latin letters to ASCII and splits on every
// other character. Returns the alphanumeric tokens in order.
inline std::vector<std::string> FoldedTokens(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = detail::DecodeUtf8(raw, i);
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') {
        current.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        current.push_back(c);
      } else {
        flush();
      }
    } else if (const char* ascii = detail::FoldCodePoint(cp)) {
      current += ascii;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline std::string JoinTokens(const std::vector<std::string>& tokens, char sep = '_') {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

// "M. Giffels" -> "m_giffels". Throws when nothing alphanumeric remains.
inline std::string NormalizeName(std::string_view raw) {
  std::string key = JoinTokens(FoldedTokens(raw));
  if (key.empty()) {
    Fail(ErrorCode::kInvalidArgument,
         "author name is empty after normalization: '" + std::string(raw) + "'");
  }
  return key;
}

// Same rules as NormalizeName; the empty key is a valid, distinguished value.
inline std::string NormalizeOrg(std::string_view raw) {
  return JoinTokens(FoldedTokens(raw));
}

// Name key with its tokens sorted, used to recognise reordered spellings
// ("ming_li" vs "li_ming") when locating an author inside a paper.
inline std::string SortedTokenKey(std::string_view key) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : key) {
    if (c == '_') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  std::sort(tokens.begin(), tokens.end());
  return JoinTokens(tokens);
}

// ---------------------------------------------------------------------------
// Records.

struct AuthorRef {
  std::string raw_name;
  std::string raw_org;

  bool operator==(const AuthorRef&) const = default;
};

struct Publication {
  std::string id;
  std::string title;
  std::vector<AuthorRef> authors;
  std::string venue;
  std::optional<int> year;
  std::vector<std::string> keywords;
  std::string abstract;
  // Kept but flagged: missing authors, dropped author entries, bad year, ...
  bool noisy = false;

  bool operator==(const Publication&) const = default;
};

inline constexpr int kMinYear = 1000;
inline constexpr int kMaxYear = 3000;

struct LoadReport {
  std::size_t records = 0;
  std::size_t noisy = 0;
  std::size_t malformed = 0;
  std::vector<std::string> warnings;
};

struct Corpus {
  std::map<std::string, Publication> pubs;
  LoadReport report;

  std::size_t size() const { return pubs.size(); }
  bool contains(const std::string& id) const { return pubs.count(id) > 0; }
  const Publication& at(const std::string& id) const {
    auto it = pubs.find(id);
    if (it == pubs.end()) Fail(ErrorCode::kNotFound, "unknown paper id: " + id);
    return it->second;
  }
};

namespace detail {

inline void Warn(LoadReport& report, std::string message) {
  constexpr std::size_t kMaxWarnings = 200;
  if (report.warnings.size() < kMaxWarnings) report.warnings.push_back(std::move(message));
}

inline Publication ParsePublicationRecord(const std::string& key, const Json& rec,
                                          LoadReport& report) {
  Publication pub;
  pub.id = key;
  auto flag = [&](const std::string& why) {
    pub.noisy = true;
    Warn(report, key + ": " + why);
  };
  if (!rec.is_object()) {
    ++report.malformed;
    flag("record is not an object");
    return pub;
  }
  if (auto it = rec.find("id"); it != rec.end()) {
    if (!it->is_string() || it->get<std::string>() != key) flag("id field differs from key");
  }
  if (auto it = rec.find("title"); it != rec.end()) {
    if (it->is_string()) pub.title = it->get<std::string>();
    else if (!it->is_null()) flag("title is not a string");
  }
  if (auto it = rec.find("authors"); it != rec.end() && it->is_array()) {
    for (const Json& a : *it) {
      if (!a.is_object()) {
        flag("author entry is not an object");
        continue;
      }
      AuthorRef ref;
      if (auto n = a.find("name"); n != a.end() && n->is_string()) ref.raw_name = n->get<std::string>();
      if (auto o = a.find("org"); o != a.end() && o->is_string()) ref.raw_org = o->get<std::string>();
      if (FoldedTokens(ref.raw_name).empty()) {
        flag("author entry without a usable name dropped");
        continue;
      }
      pub.authors.push_back(std::move(ref));
    }
    if (pub.authors.empty()) flag("no authors");
  } else {
    flag("missing authors");
  }
  if (auto it = rec.find("venue"); it != rec.end() && it->is_string()) {
    pub.venue = it->get<std::string>();
  }
  if (auto it = rec.find("year"); it != rec.end() && !it->is_null()) {
    std::optional<long long> y;
    if (it->is_number_integer()) {
      y = it->get<long long>();
    } else if (it->is_number_float()) {
      y = static_cast<long long>(it->get<double>());
    } else if (it->is_string()) {
      try {
        std::size_t used = 0;
        const std::string s = it->get<std::string>();
        long long v = std::stoll(s, &used);
        if (used == s.size()) y = v;
      } catch (const std::exception&) {
      }
    }
    if (y && *y >= kMinYear && *y <= kMaxYear) {
      pub.year = static_cast<int>(*y);
    } else {
      flag("year missing or out of range");
    }
  }
  if (auto it = rec.find("keywords"); it != rec.end() && it->is_array()) {
    for (const Json& k : *it) {
      if (k.is_string() && !k.get<std::string>().empty()) pub.keywords.push_back(k.get<std::string>());
    }
  }
  if (auto it = rec.find("abstract"); it != rec.end() && it->is_string()) {
    pub.abstract = it->get<std::string>();
  }
  return pub;
}

// Parses text while rejecting duplicate keys in the top-level object, which
// nlohmann::json would otherwise silently collapse.
inline Json ParseTopLevelObject(const std::string& text, const std::string& what) {
  std::set<std::string> seen;
  std::string duplicate;
  auto callback = [&](int depth, Json::parse_event_t event, Json& parsed) {
    if (event == Json::parse_event_t::key && depth == 1 && duplicate.empty()) {
      std::string k = parsed.get<std::string>();
      if (!seen.insert(k).second) duplicate = k;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text, callback);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kParse, what + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) Fail(ErrorCode::kParse, what + ": top-level value is not an object");
  if (!duplicate.empty()) Fail(ErrorCode::kDataIntegrity, what + ": duplicate key '" + duplicate + "'");
  return doc;
}

}  // namespace detail

inline Corpus ParsePublications(const std::string& text) {
  Json doc = detail::ParseTopLevelObject(text, "publications");
  Corpus corpus;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    Publication pub = detail::ParsePublicationRecord(it.key(), it.value(), corpus.report);
    ++corpus.report.records;
    if (pub.noisy) ++corpus.report.noisy;
    corpus.pubs.emplace(pub.id, std::move(pub));
  }
  return corpus;
}

inline Corpus LoadPublications(const std::string& path) {
  return ParsePublications(ReadFile(path));
}

inline Json PublicationToJson(const Publication& pub) {
  Json rec = Json::object();
  rec["id"] = pub.id;
  rec["title"] = pub.title;
  Json authors = Json::array();
  for (const AuthorRef& a : pub.authors) authors.push_back({{"name", a.raw_name}, {"org", a.raw_org}});
  rec["authors"] = std::move(authors);
  rec["venue"] = pub.venue;
  if (pub.year) rec["year"] = *pub.year;
  rec["keywords"] = pub.keywords;
  if (!pub.abstract.empty()) rec["abstract"] = pub.abstract;
  return rec;
}

inline Json PublicationsToJson(const Corpus& corpus) {
  Json doc = Json::object();
  for (const auto& [id, pub] : corpus.pubs) doc[id] = PublicationToJson(pub);
  return doc;
}

inline void SavePublications(const Corpus& corpus, const std::string& path) {
  WriteFile(path, PublicationsToJson(corpus).dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// Ground-truth labelings.

// Normalized name -> profile id -> sorted paper ids.
struct Labeling {
  std::map<std::string, std::map<std::string, std::vector<std::string>>> names;
  std::vector<std::string> warnings;

  bool operator==(const Labeling& o) const { return names == o.names; }

  std::size_t profile_count() const {
    std::size_t n = 0;
    for (const auto& [name, profiles] : names) n += profiles.size();
    return n;
  }

  // Sorted union of the name's profiles; empty for an unknown name.
  std::vector<std::string> papers_of(const std::string& name) const {
    std::vector<std::string> out;
    auto it = names.find(name);
    if (it == names.end()) return out;
    for (const auto& [pid, papers] : it->second) out.insert(out.end(), papers.begin(), papers.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<std::string> name_keys() const {
    std::vector<std::string> out;
    for (const auto& [name, profiles] : names) out.push_back(name);
    return out;
  }

  // Restriction to a subset of names (unknown names are ignored).
  Labeling restricted_to(const std::vector<std::string>& keep) const {
    Labeling out;
    for (const std::string& n : keep) {
      if (auto it = names.find(n); it != names.end()) out.names.emplace(n, it->second);
    }
    return out;
  }
};

struct GroundTruthOptions {
  // Fail instead of warn-and-drop on unknown papers or overlapping profiles.
  bool strict = false;
};

// `corpus` may be null, in which case paper existence is not checked.
inline Labeling ParseGroundTruth(const std::string& text, const Corpus* corpus,
                                 GroundTruthOptions options = {}) {
  Json doc = detail::ParseTopLevelObject(text, "ground truth");
  Labeling labeling;
  auto problem = [&](const std::string& msg) {
    if (options.strict) Fail(ErrorCode::kDataIntegrity, "ground truth: " + msg);
    labeling.warnings.push_back(msg);
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string name = NormalizeName(it.key());
    if (!it.value().is_object()) Fail(ErrorCode::kParse, "ground truth: entry for '" + it.key() + "' is not an object");
    auto& profiles = labeling.names[name];
    for (auto pit = it.value().begin(); pit != it.value().end(); ++pit) {
      if (!pit.value().is_array()) {
        Fail(ErrorCode::kParse, "ground truth: profile '" + pit.key() + "' is not an array");
      }
      std::string profile_id = pit.key();
      while (profiles.count(profile_id)) profile_id += "'";
      std::vector<std::string> papers;
      for (const Json& p : pit.value()) {
        if (!p.is_string()) Fail(ErrorCode::kParse, "ground truth: paper id is not a string");
        std::string pid = p.get<std::string>();
        if (corpus && !corpus->contains(pid)) {
          problem("paper '" + pid + "' of " + name + "/" + profile_id + " is not in the corpus");
          continue;
        }
        papers.push_back(std::move(pid));
      }
      std::sort(papers.begin(), papers.end());
      papers.erase(std::unique(papers.begin(), papers.end()), papers.end());
      profiles.emplace(profile_id, std::move(papers));
    }
    // Profiles under one name must be disjoint; later profiles lose shared papers.
    std::set<std::string> seen;
    for (auto& [pid, papers] : profiles) {
      std::vector<std::string> kept;
      for (const std::string& paper : papers) {
        if (seen.insert(paper).second) {
          kept.push_back(paper);
        } else {
          problem("paper '" + paper + "' appears in several profiles of " + name);
        }
      }
      papers = std::move(kept);
    }
    std::erase_if(profiles, [](const auto& kv) { return kv.second.empty(); });
    if (profiles.empty()) labeling.names.erase(name);
  }
  return labeling;
}

inline Labeling LoadGroundTruth(const std::string& path, const Corpus* corpus,
                                GroundTruthOptions options = {}) {
  return ParseGroundTruth(ReadFile(path), corpus, options);
}

inline Json LabelingToJson(const Labeling& labeling) {
  Json doc = Json::object();
  for (const auto& [name, profiles] : labeling.names) {
    Json entry = Json::object();
    for (const auto& [pid, papers] : profiles) entry[pid] = papers;
    doc[name] = std::move(entry);
  }
  return doc;
}

inline void SaveLabeling(const Labeling& labeling, const std::string& path) {
  WriteFile(path, LabelingToJson(labeling).dump(1) + "\n");
}

}  // namespace andis
