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

#ifndef RISKENV_KERNELS_HPP_
#define RISKENV_KERNELS_HPP_

// Data-parallel inner loops of the vocabulary machinery. Every kernel has a
// serial reference in `serial::` and an OpenMP version in `omp::` with the
// same signature; tests require identical outputs from both.

#include <cstdint>
#include <span>
#include <vector>

#include "riskenv/geometry.hpp"

namespace riskenv::kernels
{

/// Structure-of-arrays table of reference-box corners, one row per token.
class CornerTable
{
public:
  CornerTable() = default;
  explicit CornerTable(std::span<const MotionToken> tokens, const VehicleDims & box = kTokenBox);

  std::size_t size() const { return n_; }
  /// Mean corner distance between rows i and j of two tables.
  double distance(std::size_t i, const CornerTable & other, std::size_t j) const;
  double distance(std::size_t i, const std::array<Vec2, 4> & corners) const;

private:
  std::size_t n_ = 0;
  std::vector<double> x_[4];
  std::vector<double> y_[4];
};

struct Nearest
{
  int index = -1;
  double distance = 0.0;
};

namespace serial
{
/// counts[c] = number of rows p in `pool` with active[p] != 0 and
/// corner distance(candidates[c], p) <= eps.
void count_within(
  const CornerTable & pool, std::span<const std::uint8_t> active,
  std::span<const int> candidates, double eps, std::span<int> counts);

/// Clears active[p] for every pool row within eps of pool row `center`.
/// Returns the number of rows cleared.
int clear_within(
  const CornerTable & pool, std::span<std::uint8_t> active, int center, double eps);

/// Exhaustive nearest row of `vocab` for each query; ties go to the lowest index.
void nearest(const CornerTable & vocab, const CornerTable & queries, std::span<Nearest> out);
}  // namespace serial

namespace omp
{
void count_within(
  const CornerTable & pool, std::span<const std::uint8_t> active,
  std::span<const int> candidates, double eps, std::span<int> counts);
int clear_within(
  const CornerTable & pool, std::span<std::uint8_t> active, int center, double eps);
void nearest(const CornerTable & vocab, const CornerTable & queries, std::span<Nearest> out);
}  // namespace omp

}  // namespace riskenv::kernels

#endif  // RISKENV_KERNELS_HPP_
