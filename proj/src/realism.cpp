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

#include "riskenv/realism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskenv/error.hpp"
#include "riskenv/geometry.hpp"

namespace riskenv
{

Histogram Histogram::uniform(double lo, double hi, double width)
{
  Histogram h;
  const int n = static_cast<int>(std::lround((hi - lo) / width));
  for (int i = 0; i <= n; ++i) h.edges.push_back(lo + i * width);
  h.counts.assign(n, 0);
  return h;
}

void Histogram::add(double v)
{
  if (!std::isfinite(v) || counts.empty()) return;
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  long bin = static_cast<long>(it - edges.begin()) - 1;
  bin = std::clamp<long>(bin, 0, static_cast<long>(counts.size()) - 1);
  ++counts[bin];
}

void Histogram::merge(const Histogram & other)
{
  if (edges != other.edges) throw ValidationError("cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

std::int64_t Histogram::total() const
{
  std::int64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::vector<double> Histogram::density() const
{
  std::vector<double> d(counts.size(), 0.0);
  const auto n = total();
  if (n == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d[i] = static_cast<double>(counts[i]) / (static_cast<double>(n) * (edges[i + 1] - edges[i]));
  }
  return d;
}

std::optional<double> wasserstein1(const Histogram & a, const Histogram & b)
{
  if (a.edges != b.edges) throw ValidationError("histogram bin edges do not match reference");
  const auto na = a.total();
  const auto nb = b.total();
  if (na == 0 || nb == 0) return std::nullopt;
  double ca = 0.0;
  double cb = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    ca += static_cast<double>(a.counts[i]) / static_cast<double>(na);
    cb += static_cast<double>(b.counts[i]) / static_cast<double>(nb);
    // the last bin closes both CDFs at 1
    if (i + 1 < a.counts.size()) w += std::abs(ca - cb) * (a.edges[i + 1] - a.edges[i]);
  }
  return w;
}

std::array<const Histogram *, 5> MetricHistograms::all() const
{
  return {&distance, &speed, &yield_distance, &yield_speed, &pet};
}

std::array<Histogram *, 5> MetricHistograms::all()
{
  return {&distance, &speed, &yield_distance, &yield_speed, &pet};
}

void MetricHistograms::merge(const MetricHistograms & other)
{
  auto mine = all();
  auto theirs = other.all();
  for (std::size_t i = 0; i < mine.size(); ++i) mine[i]->merge(*theirs[i]);
}

namespace
{
bool in_entry_region(const SceneConfig & scene, double x, double y)
{
  for (const EntryZone & z : scene.entry_zones) {
    if (point_in_polygon(z.region, {x, y})) return true;
  }
  return false;
}

double speed_at(const JointTrajectory & jt, int i, int t)
{
  if (t < 1 || !jt.present(i, t) || !jt.present(i, t - 1)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::hypot(jt.at(i, t, 0) - jt.at(i, t - 1, 0), jt.at(i, t, 1) - jt.at(i, t - 1, 1)) /
         jt.dt();
}
}  // namespace

void accumulate_metrics(
  const JointTrajectory & jt, const SceneConfig & scene, int first_step,
  std::span<const WindowPet> windows, MetricHistograms & out)
{
  for (int t = std::max(0, first_step); t < jt.steps(); ++t) {
    for (int i = 0; i < jt.agents(); ++i) {
      if (!jt.present(i, t)) continue;
      const double xi = jt.at(i, t, 0);
      const double yi = jt.at(i, t, 1);
      double nearest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < jt.agents(); ++j) {
        if (j == i || !jt.present(j, t)) continue;
        nearest = std::min(nearest, std::hypot(jt.at(j, t, 0) - xi, jt.at(j, t, 1) - yi));
      }
      if (std::isfinite(nearest)) out.distance.add(nearest);

      const double v = speed_at(jt, i, t);
      if (std::isnan(v)) continue;
      out.speed.add(v);

      if (v >= kYieldSpeed || !in_entry_region(scene, xi, yi)) continue;
      int conflict = -1;
      double conflict_dist = kYieldRange;
      for (int j = 0; j < jt.agents(); ++j) {
        if (j == i || !jt.present(j, t)) continue;
        const double xj = jt.at(j, t, 0);
        const double yj = jt.at(j, t, 1);
        if (!scene.circulating.contains(xj, yj)) continue;
        const double d = std::hypot(xj - xi, yj - yi);
        if (d <= conflict_dist) {
          conflict_dist = d;
          conflict = j;
        }
      }
      if (conflict < 0) continue;
      out.yield_distance.add(conflict_dist);
      const double vc = speed_at(jt, conflict, t);
      if (!std::isnan(vc)) out.yield_speed.add(vc);
    }
  }
  for (const WindowPet & w : windows) {
    if (w.pet) out.pet.add(*w.pet);
  }
}

MetricHistograms recording_metrics(const Recording & rec, const SceneConfig & scene)
{
  MetricHistograms m;
  const JointTrajectory jt = to_joint(rec);
  std::vector<VehicleDims> dims;
  for (const auto & tr : rec.tracks) dims.push_back(tr.dims);
  const auto windows =
    window_pets(jt, dims, grid_for(scene.bounds, scene.grid_cell), scene.horizon_steps);
  accumulate_metrics(jt, scene, 0, windows, m);
  return m;
}

RealismReport realism_report(
  std::span<const EpisodeLog> logs, const MetricHistograms & reference, const SceneConfig & scene)
{
  if (logs.empty()) throw ValidationError("realism report needs at least one episode log");
  RealismReport report;
  for (const EpisodeLog & log : logs) {
    accumulate_metrics(log.joint, scene, log.warmup_steps, log.window_pets, report.produced);
    ++report.episodes;
    if (log.crashed()) ++report.crashes;
  }
  report.crash_rate = static_cast<double>(report.crashes) / report.episodes;
  const auto produced = report.produced.all();
  const auto ref = reference.all();
  for (std::size_t i = 0; i < produced.size(); ++i) {
    report.wasserstein[i] = wasserstein1(*produced[i], *ref[i]);
  }
  return report;
}

}  // namespace riskenv
