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

// Shared plumbing: error type, seeded randomness, dense vector helpers and
// checksums. Everything here is header-only and free of global state.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace andis {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kDataIntegrity,
  kNotFound,
  kConfig,
  kShapeMismatch,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDataIntegrity: return "data_integrity";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
  }
  return "unknown";
}

// Process exit status used by the CLI for each error class.
inline int ErrorExitStatus(ErrorCode code) {
  return 10 + static_cast<int>(code);
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// ---------------------------------------------------------------------------
// Seeds and random numbers.
//
// All randomness derives from one 64-bit run seed. Components derive their
// own streams with DeriveSeed so that adding a consumer never perturbs the
// draws seen by another. Uniform helpers are written out explicitly instead
// of using <random> distributions, whose output is implementation-defined.

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t Fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t DeriveSeed(std::uint64_t base,
                                std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = SplitMix64(base);
  for (std::uint64_t p : parts) h = SplitMix64(h ^ SplitMix64(p + 0x51ed2701ULL));
  return h;
}

inline std::uint64_t DeriveSeed(std::uint64_t base, std::string_view tag,
                                std::initializer_list<std::uint64_t> parts = {}) {
  std::uint64_t h = SplitMix64(base ^ Fnv1a64(tag));
  for (std::uint64_t p : parts) h = SplitMix64(h ^ SplitMix64(p + 0x51ed2701ULL));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(Below(v.size()))];
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Dense vector helpers.

using Vec = std::vector<double>;

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

// Cosine similarity; a zero vector on either side scores 0.
inline double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kShapeMismatch, "cosine: dimension mismatch");
  }
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(Dot(a, b) / (na * nb), -1.0, 1.0);
}

inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double Softplus(double x) {
  if (x > 30) return x;
  if (x < -30) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline std::uint64_t ChecksumDoubles(std::span<const double> v,
                                     std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline std::string HexU64(std::uint64_t v) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// File helpers.

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open file for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path);
}

inline std::uint64_t FileChecksum(const std::string& path) {
  return Fnv1a64(ReadFile(path));
}

// Fixed-point rendering used by every report writer so outputs are
// byte-stable.
inline std::string FormatFixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace andis
