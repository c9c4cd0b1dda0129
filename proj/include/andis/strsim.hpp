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

// Jaro and Jaro-Winkler string similarity.

#pragma once

#include <algorithm>
#include <string_view>
#include <vector>

namespace andis {

struct StringSimilarity {
  double score = 0.0;
  // Set when both inputs were empty and the score is 1 by convention.
  bool both_empty = false;
};

// Jaro similarity. Characters match when equal and no further apart than
// floor(max(|a|, |b|) / 2) - 1 positions; half the out-of-order matches
// count as transpositions.
inline StringSimilarity JaroDetailed(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return {1.0, true};
  if (a.empty() || b.empty()) return {0.0, false};

  std::size_t window = std::max(a.size(), b.size()) / 2;
  window = window > 0 ? window - 1 : 0;

  std::vector<char> matched_a(a.size(), 0);
  std::vector<char> matched_b(b.size(), 0);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(i + window + 1, b.size());
    for (std::size_t j = lo; j < hi; ++j) {
      if (!matched_b[j] && a[i] == b[j]) {
        matched_a[i] = matched_b[j] = 1;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return {0.0, false};

  std::size_t half_transpositions = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!matched_a[i]) continue;
    while (!matched_b[k]) ++k;
    if (a[i] != b[k]) ++half_transpositions;
    ++k;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions / 2);
  const double score = (m / static_cast<double>(a.size()) +
                        m / static_cast<double>(b.size()) + (m - t) / m) /
                       3.0;
  return {score, false};
}

inline double Jaro(std::string_view a, std::string_view b) {
  return JaroDetailed(a, b).score;
}

// Jaro-Winkler: Jaro plus a common-prefix boost (scale 0.1, prefix capped at
// four characters).
inline StringSimilarity JaroWinklerDetailed(std::string_view a, std::string_view b) {
  constexpr double kScale = 0.1;
  constexpr std::size_t kMaxPrefix = 4;
  StringSimilarity jaro = JaroDetailed(a, b);
  if (jaro.both_empty) return jaro;
  std::size_t prefix = 0;
  const std::size_t limit = std::min({a.size(), b.size(), kMaxPrefix});
  while (prefix < limit && a[prefix] == b[prefix]) ++prefix;
  jaro.score += static_cast<double>(prefix) * kScale * (1.0 - jaro.score);
  return jaro;
}

inline double JaroWinkler(std::string_view a, std::string_view b) {
  return JaroWinklerDetailed(a, b).score;
}

}  // namespace andis
