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

#include "riskenv/kernels.hpp"

#include <cmath>

namespace riskenv::kernels
{

CornerTable::CornerTable(std::span<const MotionToken> tokens, const VehicleDims & box)
: n_(tokens.size())
{
  for (int c = 0; c < 4; ++c) {
    x_[c].resize(n_);
    y_[c].resize(n_);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const auto corners = token_corners(tokens[i], box);
    for (int c = 0; c < 4; ++c) {
      x_[c][i] = corners[c].x;
      y_[c][i] = corners[c].y;
    }
  }
}

double CornerTable::distance(std::size_t i, const CornerTable & other, std::size_t j) const
{
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double dx = x_[c][i] - other.x_[c][j];
    const double dy = y_[c][i] - other.y_[c][j];
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return 0.25 * sum;
}

double CornerTable::distance(std::size_t i, const std::array<Vec2, 4> & corners) const
{
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double dx = x_[c][i] - corners[c].x;
    const double dy = y_[c][i] - corners[c].y;
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return 0.25 * sum;
}

namespace
{
int count_one(
  const CornerTable & pool, std::span<const std::uint8_t> active, int center, double eps)
{
  int n = 0;
  const std::size_t size = pool.size();
  for (std::size_t p = 0; p < size; ++p) {
    if (active[p] && pool.distance(static_cast<std::size_t>(center), pool, p) <= eps) ++n;
  }
  return n;
}

Nearest nearest_one(const CornerTable & vocab, const CornerTable & queries, std::size_t q)
{
  Nearest best;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    const double d = vocab.distance(v, queries, q);
    if (best.index < 0 || d < best.distance) {
      best.index = static_cast<int>(v);
      best.distance = d;
    }
  }
  return best;
}
}  // namespace

namespace serial
{
void count_within(
  const CornerTable & pool, std::span<const std::uint8_t> active,
  std::span<const int> candidates, double eps, std::span<int> counts)
{
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    counts[c] = count_one(pool, active, candidates[c], eps);
  }
}

int clear_within(const CornerTable & pool, std::span<std::uint8_t> active, int center, double eps)
{
  int cleared = 0;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    if (active[p] && pool.distance(static_cast<std::size_t>(center), pool, p) <= eps) {
      active[p] = 0;
      ++cleared;
    }
  }
  return cleared;
}

void nearest(const CornerTable & vocab, const CornerTable & queries, std::span<Nearest> out)
{
  for (std::size_t q = 0; q < queries.size(); ++q) out[q] = nearest_one(vocab, queries, q);
}
}  // namespace serial

namespace omp
{
void count_within(
  const CornerTable & pool, std::span<const std::uint8_t> active,
  std::span<const int> candidates, double eps, std::span<int> counts)
{
  const long size = static_cast<long>(pool.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto center = static_cast<std::size_t>(candidates[c]);
    int n = 0;
#pragma omp parallel for reduction(+ : n) schedule(static)
    for (long p = 0; p < size; ++p) {
      if (active[p] && pool.distance(center, pool, static_cast<std::size_t>(p)) <= eps) ++n;
    }
    counts[c] = n;
  }
}

int clear_within(const CornerTable & pool, std::span<std::uint8_t> active, int center, double eps)
{
  const long size = static_cast<long>(pool.size());
  int cleared = 0;
#pragma omp parallel for reduction(+ : cleared) schedule(static)
  for (long p = 0; p < size; ++p) {
    if (active[p] &&
        pool.distance(static_cast<std::size_t>(center), pool, static_cast<std::size_t>(p)) <= eps) {
      active[p] = 0;
      ++cleared;
    }
  }
  return cleared;
}

void nearest(const CornerTable & vocab, const CornerTable & queries, std::span<Nearest> out)
{
  const long n = static_cast<long>(queries.size());
#pragma omp parallel for schedule(static)
  for (long q = 0; q < n; ++q) out[q] = nearest_one(vocab, queries, static_cast<std::size_t>(q));
}
}  // namespace omp

}  // namespace riskenv::kernels
