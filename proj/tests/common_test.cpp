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

#include "andis/common.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace andis {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.Next(), b.Next());
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t x = rng.Below(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleIsPermutation) {
  Rng rng(11);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.Shuffle(v);
  std::set<int> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 50u);
}

TEST(DeriveSeed, DistinctPartsGiveDistinctSeeds) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t e = 0; e < 10; ++e) {
    for (std::uint64_t n = 0; n < 100; ++n) seeds.insert(DeriveSeed(5, {e, n}));
  }
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(DeriveSeed(5, "walks"), DeriveSeed(5, "gnn"));
  EXPECT_EQ(DeriveSeed(5, "walks", {1}), DeriveSeed(5, "walks", {1}));
}

TEST(VectorMath, CosineCases) {
  Vec a = {1, 2, 3};
  Vec neg = {-1, -2, -3};
  Vec orth = {3, 0, -1};
  Vec zero = {0, 0, 0};
  EXPECT_DOUBLE_EQ(Cosine(a, a), 1.0);
  EXPECT_DOUBLE_EQ(Cosine(a, neg), -1.0);
  EXPECT_NEAR(Cosine(a, orth), 0.0, 1e-15);
  EXPECT_EQ(Cosine(a, zero), 0.0);
  Vec short_vec = {1, 2};
  EXPECT_THROW(Cosine(a, short_vec), Error);
}

TEST(VectorMath, SigmoidAndSoftplusAreStable) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(800.0), 1.0, 1e-15);
  EXPECT_NEAR(Sigmoid(-800.0), 0.0, 1e-15);
  EXPECT_NEAR(Softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(Softplus(800.0), 800.0, 1e-9);
  EXPECT_TRUE(std::isfinite(Softplus(-800.0)));
  for (double x : {-5.0, -0.3, 0.7, 4.0}) {
    EXPECT_NEAR(Softplus(x), std::log1p(std::exp(x)), 1e-12);
  }
}

TEST(Errors, ExitStatusIsOffsetByTen) {
  EXPECT_EQ(ErrorExitStatus(ErrorCode::kIo), 10);
  EXPECT_STREQ(ErrorCodeName(ErrorCode::kConfig), "config_error");
  try {
    Fail(ErrorCode::kParse, "boom");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_STREQ(e.what(), "boom");
  }
}

TEST(Format, FixedDigits) {
  EXPECT_EQ(FormatFixed(0.5), "0.500000");
  EXPECT_EQ(FormatFixed(1.0 / 3.0, 4), "0.3333");
  EXPECT_EQ(HexU64(255), "00000000000000ff");
}

}  // namespace
}  // namespace andis
