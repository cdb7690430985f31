// Copyright 2026 The riskenv Authors
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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "riskenv/kernels.hpp"

using namespace riskenv;
using namespace riskenv::kernels;

namespace
{

std::vector<MotionToken> random_tokens(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fwd(0.0, 5.0), lat(-0.4, 0.4), turn(-0.3, 0.3);
  std::vector<MotionToken> out(n);
  for (auto & t : out) t = {fwd(rng), lat(rng), turn(rng)};
  return out;
}

}  // namespace

TEST(CornerTable, DistanceMatchesCornerDistance)
{
  const auto toks = random_tokens(50, 1);
  const CornerTable table(toks);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    for (std::size_t j = 0; j < toks.size(); ++j) {
      EXPECT_NEAR(table.distance(i, table, j), corner_distance(toks[i], toks[j]), 1e-12);
    }
    EXPECT_NEAR(table.distance(i, token_corners(toks[0])), corner_distance(toks[i], toks[0]), 1e-12);
  }
}

TEST(Kernels, CountWithinSerialEqualsOmpAndBruteForce)
{
  const auto toks = random_tokens(3000, 2);
  const CornerTable pool(toks);
  std::vector<std::uint8_t> active(toks.size());
  std::mt19937_64 rng(3);
  for (auto & a : active) a = rng() % 4 != 0;
  std::vector<int> cand;
  for (int i = 0; i < 64; ++i) cand.push_back(static_cast<int>(rng() % toks.size()));
  std::vector<int> a(cand.size()), b(cand.size());
  serial::count_within(pool, active, cand, 0.3, a);
  omp::count_within(pool, active, cand, 0.3, b);
  EXPECT_EQ(a, b);
  for (std::size_t c = 0; c < cand.size(); ++c) {
    int want = 0;
    for (std::size_t p = 0; p < toks.size(); ++p) {
      want += active[p] && corner_distance(toks[cand[c]], toks[p]) <= 0.3;
    }
    EXPECT_EQ(a[c], want);
  }
}

TEST(Kernels, ClearWithinSerialEqualsOmp)
{
  const auto toks = random_tokens(4000, 4);
  const CornerTable pool(toks);
  std::vector<std::uint8_t> a(toks.size(), 1), b(toks.size(), 1);
  for (int center : {0, 17, 999, 3999}) {
    const int na = serial::clear_within(pool, a, center, 0.4);
    const int nb = omp::clear_within(pool, b, center, 0.4);
    EXPECT_EQ(na, nb);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a[center], 0);
  }
}

TEST(Kernels, NearestSerialEqualsOmpAndBruteForce)
{
  const auto vocab = random_tokens(1024, 5);
  const auto queries = random_tokens(2000, 6);
  const CornerTable v(vocab), q(queries);
  std::vector<Nearest> a(queries.size()), b(queries.size());
  serial::nearest(v, q, a);
  omp::nearest(v, q, b);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    EXPECT_EQ(a[i].index, b[i].index);
    EXPECT_EQ(a[i].distance, b[i].distance);
    int best = 0;
    for (std::size_t j = 1; j < vocab.size(); ++j) {
      if (corner_distance(queries[i], vocab[j]) < corner_distance(queries[i], vocab[best])) best = static_cast<int>(j);
    }
    EXPECT_NEAR(corner_distance(queries[i], vocab[a[i].index]), corner_distance(queries[i], vocab[best]), 1e-12);
  }
}

TEST(Kernels, NearestTieGoesToLowestIndex)
{
  const std::vector<MotionToken> vocab{{1, 0, 0}, {2, 0, 0}, {1, 0, 0}};
  const std::vector<MotionToken> q{{1, 0, 0}, {1.5, 0, 0}};
  const CornerTable v(vocab), qt(q);
  std::vector<Nearest> a(2), b(2);
  serial::nearest(v, qt, a);
  omp::nearest(v, qt, b);
  EXPECT_EQ(a[0].index, 0);
  EXPECT_EQ(a[1].index, 0);
  EXPECT_EQ(b[0].index, 0);
  EXPECT_EQ(b[1].index, 0);
}
