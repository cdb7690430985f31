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

#include "riskenv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "riskenv/error.hpp"
#include "riskenv/rng.hpp"

namespace riskenv
{

void SyntheticWorldParams::validate() const
{
  if (!(ring_radius > 0.0)) throw ValidationError("ring radius must be positive");
  if (arms < 2) throw ValidationError("at least two arms are required");
  if (!(nominal_speed > 0.0) || !(ring_speed > 0.0)) {
    throw ValidationError("speeds must be positive");
  }
  if (!(gap_threshold >= 0.0)) throw ValidationError("gap threshold must be non-negative");
  if (!(arrival_rate >= 0.0)) throw ValidationError("arrival rate must be non-negative");
  if (!(lateral_noise >= 0.0) || !(heading_noise >= 0.0) || !(speed_spread >= 0.0) ||
      speed_spread >= 1.0) {
    throw ValidationError("noise scales must be non-negative (speed spread below 1)");
  }
  if (!(yield_distance > ring_radius + lane_offset) || !(spawn_distance > yield_distance + 10.0) ||
      !(exit_distance > yield_distance + 10.0)) {
    throw ValidationError("arm distances must satisfy ring < yield line < spawn/exit");
  }
  if (!(duration > 0.0) || !(warmup >= 0.0)) throw ValidationError("duration must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
}

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kJoinAngle = 0.35;  // ring angle between an arm axis and its merge points
constexpr double kPathStep = 0.25;

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

double wrap_positive(double a)
{
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

double arm_angle(const SyntheticWorldParams & p, int arm) { return 2.0 * kPi * arm / p.arms; }
Vec2 axis(double phi) { return {std::cos(phi), std::sin(phi)}; }
Vec2 perp(double phi) { return {-std::sin(phi), std::cos(phi)}; }

struct Path
{
  std::vector<Vec2> pts;
  std::vector<double> s;
  std::vector<double> speed;  // desired speed at each point
  double stop_s = 0.0;        // arc length of the yield line
  double ring_s0 = 0.0;
  double ring_a0 = 0.0;
  double ring_sweep = 0.0;
  double radius = 0.0;

  double length() const { return s.back(); }

  void append(Vec2 q, double v)
  {
    if (!pts.empty()) {
      const double d = norm(q - pts.back());
      if (d < 1e-9) return;
      s.push_back(s.back() + d);
    } else {
      s.push_back(0.0);
    }
    pts.push_back(q);
    speed.push_back(v);
  }

  std::size_t segment(double at) const
  {
    at = std::clamp(at, 0.0, length());
    const auto it = std::upper_bound(s.begin(), s.end(), at);
    std::size_t i = static_cast<std::size_t>(it - s.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, pts.size() - 2);
  }

  Vec2 point(double at) const
  {
    const std::size_t i = segment(at);
    const double u = std::clamp((at - s[i]) / (s[i + 1] - s[i]), 0.0, 1.0);
    return pts[i] + u * (pts[i + 1] - pts[i]);
  }

  double heading(double at) const
  {
    const std::size_t i = segment(at);
    const Vec2 d = pts[i + 1] - pts[i];
    return std::atan2(d.y, d.x);
  }

  double desired_speed(double at) const { return speed[segment(at)]; }

  /// Arc length at which the path crosses ring angle theta, if it does.
  std::optional<double> ring_crossing(double theta) const
  {
    const double d = wrap_positive(theta - ring_a0);
    if (d > ring_sweep + 1e-9) return std::nullopt;
    return ring_s0 + radius * d;
  }
};

void append_line(Path & path, Vec2 a, Vec2 b, double v)
{
  const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / kPathStep)));
  for (int i = 0; i <= n; ++i) path.append(a + (static_cast<double>(i) / n) * (b - a), v);
}

void append_bezier(Path & path, Vec2 a, Vec2 ta, Vec2 b, Vec2 tb, double v)
{
  const double c = 0.4 * norm(b - a);
  const Vec2 p1 = a + c * ta;
  const Vec2 p2 = b - c * tb;
  const int n = std::max(4, static_cast<int>(std::ceil(1.5 * norm(b - a) / kPathStep)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double u = 1.0 - t;
    path.append(
      (u * u * u) * a + (3.0 * u * u * t) * p1 + (3.0 * u * t * t) * p2 + (t * t * t) * b, v);
  }
}

Path build_path(const SyntheticWorldParams & p, int from, int to)
{
  const double R = p.ring_radius;
  const double fa = arm_angle(p, from);
  const double fb = arm_angle(p, to);
  Path path;
  path.radius = R;

  const Vec2 spawn = p.spawn_distance * axis(fa) + p.lane_offset * perp(fa);
  const Vec2 yield = p.yield_distance * axis(fa) + p.lane_offset * perp(fa);
  append_line(path, spawn, yield, p.nominal_speed);
  path.stop_s = path.length();

  const double a0 = fa + kJoinAngle;
  const double a1 = a0 + wrap_positive(fb - kJoinAngle - a0);
  const Vec2 enter = R * axis(a0);
  append_bezier(path, yield, -1.0 * axis(fa), enter, perp(a0), p.ring_speed);

  path.ring_s0 = path.length();
  path.ring_a0 = wrap_positive(a0);
  path.ring_sweep = a1 - a0;
  const int n = std::max(1, static_cast<int>(std::ceil(R * (a1 - a0) / kPathStep)));
  for (int i = 1; i <= n; ++i) {
    path.append(R * axis(a0 + (a1 - a0) * i / n), p.ring_speed);
  }

  const Vec2 depart = p.yield_distance * axis(fb) - p.lane_offset * perp(fb);
  append_bezier(path, R * axis(a1), perp(a1), depart, axis(fb), p.ring_speed);
  append_line(path, depart, p.exit_distance * axis(fb) - p.lane_offset * perp(fb), p.nominal_speed);
  return path;
}

struct Driver
{
  double v0_scale;
  double headway;
  double min_gap;
  double gap;
};

struct Vehicle
{
  int id;
  int path;
  double s;
  double v;
  double lat = 0.0;
  double jitter = 0.0;
  bool accepted = false;
  Driver driver;
  Track track;
  Vec2 pos{};
  double heading = 0.0;
};

constexpr double kAccel = 1.8;
constexpr double kComfort = 2.5;
constexpr double kMaxBrake = 8.0;
constexpr double kLookahead = 40.0;
constexpr double kLaneHalfWidth = 1.5;
constexpr double kSpawnClearance = 8.0;

double idm(double v, double v0, double gap, double dv, const Driver & d)
{
  const double free = 1.0 - std::pow(v / std::max(v0, 0.1), 4.0);
  if (!std::isfinite(gap)) return kAccel * free;
  const double s_star =
    d.min_gap + std::max(0.0, v * d.headway + v * dv / (2.0 * std::sqrt(kAccel * kComfort)));
  const double g = std::max(gap, 0.1);
  return kAccel * (free - (s_star / g) * (s_star / g));
}

/// Time to cover `dist` accelerating at kAccel from v up to vmax.
double earliest_arrival(double v, double vmax, double dist)
{
  const double ramp = (vmax * vmax - v * v) / (2.0 * kAccel);
  if (dist <= ramp) return (std::sqrt(v * v + 2.0 * kAccel * dist) - v) / kAccel;
  return (vmax - v) / kAccel + (dist - ramp) / vmax;
}

}  // namespace

SceneConfig roundabout_scene(const SyntheticWorldParams & p)
{
  p.validate();
  SceneConfig scene;
  scene.dt = p.dt;
  const double half = p.exit_distance + 8.0;
  scene.bounds = Rect{-half, -half, half, half};
  scene.circulating = RingRegion{{0.0, 0.0}, p.ring_radius - 3.0, p.ring_radius + 3.0};
  for (int a = 0; a < p.arms; ++a) {
    const double phi = arm_angle(p, a);
    const Vec2 u = axis(phi);
    const Vec2 n = perp(phi);
    const Vec2 spawn = p.spawn_distance * u + p.lane_offset * n;
    EntryZone zone;
    zone.pose = VehicleState::from_heading(spawn.x, spawn.y, phi + kPi);
    // approach region from the yield line back 20 m, counter-clockwise order
    const double d0 = p.yield_distance - 2.0;
    const double d1 = p.yield_distance + 20.0;
    const double l0 = p.lane_offset - 2.0;
    const double l1 = p.lane_offset + 2.0;
    for (auto [d, l] : {std::pair{d0, l0}, {d1, l0}, {d1, l1}, {d0, l1}}) {
      const Vec2 q = d * u + l * n;
      zone.region.push_back(q);
    }
    scene.entry_zones.push_back(zone);

    Polygon exit;
    const double e0 = p.exit_distance - 14.0;
    const double e1 = p.exit_distance + 8.0;
    const double m0 = -p.lane_offset - 5.0;
    const double m1 = -p.lane_offset + 2.5;
    for (auto [d, l] : {std::pair{e0, m0}, {e1, m0}, {e1, m1}, {e0, m1}}) {
      const Vec2 q = d * u + l * n;
      exit.push_back(q);
    }
    scene.exit_zones.push_back(exit);
  }
  scene.validate();
  return scene;
}

Recording gen_synthetic(const SyntheticWorldParams & p)
{
  p.validate();
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> inter(p.arrival_rate > 0.0 ? p.arrival_rate : 1.0);

  std::vector<std::vector<Path>> paths(p.arms);
  for (int a = 0; a < p.arms; ++a) {
    for (int b = 0; b < p.arms; ++b) {
      paths[a].push_back(a == b ? Path{} : build_path(p, a, b));
    }
  }
  auto path_of = [&](const Vehicle & v) -> const Path & {
    return paths[v.path / p.arms][v.path % p.arms];
  };

  const int sub = std::max(1, static_cast<int>(std::lround(p.dt / 0.1)));
  const double h = p.dt / sub;
  const long warm = std::lround(p.warmup / p.dt) * sub;
  const long total = warm + std::lround(p.duration / p.dt) * sub;
  const VehicleDims dims;

  // drivers get more aggressive as the threshold shrinks
  const double aggr = std::clamp(1.0 - p.gap_threshold / 4.0, 0.0, 1.0);
  auto draw_driver = [&]() {
    Driver d;
    d.v0_scale = (1.0 + 0.15 * aggr) * (1.0 + p.speed_spread * (2.0 * unit(rng) - 1.0));
    d.headway = std::max(0.3, (1.6 - 1.1 * aggr) * (0.85 + 0.3 * unit(rng)));
    d.min_gap = 2.0 - 1.2 * aggr;
    d.gap = p.gap_threshold * (0.8 + 0.4 * unit(rng));
    return d;
  };

  std::vector<double> next_arrival(p.arms);
  std::vector<int> pending(p.arms, 0);
  for (int a = 0; a < p.arms; ++a) {
    next_arrival[a] = p.arrival_rate > 0.0 ? inter(rng) : std::numeric_limits<double>::infinity();
  }

  Recording rec;
  rec.dt = p.dt;
  std::vector<Vehicle> live;
  int next_id = 1;
  const double lat_tau = 3.0;
  const double jit_tau = 1.0;

  auto place = [&](Vehicle & v) {
    const Path & path = path_of(v);
    const double hd = path.heading(v.s);
    const Vec2 c = path.point(v.s) + v.lat * Vec2{-std::sin(hd), std::cos(hd)};
    v.pos = c;
    v.heading = hd + v.jitter;
  };

  for (long n = 0; n <= total; ++n) {
    const double t = n * h;

    for (int a = 0; a < p.arms; ++a) {
      while (next_arrival[a] <= t) {
        ++pending[a];
        next_arrival[a] += inter(rng);
      }
      if (pending[a] == 0) continue;
      const Path & any = paths[a][(a + 1) % p.arms];
      const Vec2 spawn = any.pts.front();
      bool clear = true;
      for (const Vehicle & v : live) {
        if (norm(v.pos - spawn) < kSpawnClearance) clear = false;
      }
      if (!clear) continue;
      --pending[a];
      const int to = (a + 1 + static_cast<int>(unit(rng) * (p.arms - 1))) % p.arms;
      Vehicle v{next_id++, a * p.arms + to, 0.0, 0.0, 0.0, 0.0, false, draw_driver(), {}, {}, 0.0};
      v.v = p.nominal_speed * v.driver.v0_scale;
      v.lat = p.lateral_noise * normal(rng);
      v.jitter = p.heading_noise * normal(rng);
      v.track.id = v.id;
      v.track.dims = dims;
      place(v);
      live.push_back(std::move(v));
    }

    // path-based leader search: hit[i][j] is the lookahead distance at which
    // j sits on i's path
    const std::size_t nv = live.size();
    std::vector<double> hit(nv * nv, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < nv; ++i) {
      const Path & path = path_of(live[i]);
      for (std::size_t j = 0; j < nv; ++j) {
        if (j == i || norm(live[j].pos - live[i].pos) > kLookahead + 2.0) continue;
        for (double d = 1.0; d <= kLookahead && live[i].s + d <= path.length(); d += 1.0) {
          if (norm(path.point(live[i].s + d) - live[j].pos) < kLaneHalfWidth) {
            hit[i * nv + j] = d;
            break;
          }
        }
      }
    }
    auto stage = [&](const Vehicle & v) {
      const Path & path = path_of(v);
      return v.s < path.stop_s ? 0 : (v.s < path.ring_s0 ? 1 : 2);
    };
    // when two vehicles see each other, circulating traffic goes first,
    // otherwise the one with the other closer ahead yields
    auto yields_to = [&](std::size_t i, std::size_t j) {
      const double dij = hit[i * nv + j];
      const double dji = hit[j * nv + i];
      if (!std::isfinite(dij)) return false;
      if (!std::isfinite(dji)) return true;
      const int si = stage(live[i]);
      const int sj = stage(live[j]);
      if (si != sj) return si < sj;
      return dij != dji ? dij < dji : live[i].id > live[j].id;
    };

    std::vector<double> acc(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      Vehicle & me = live[i];
      const Path & path = path_of(me);
      double v0 = path.desired_speed(me.s);
      for (double ahead : {10.0, 20.0}) v0 = std::min(v0, path.desired_speed(me.s + ahead));
      v0 *= me.driver.v0_scale;

      double gap = std::numeric_limits<double>::infinity();
      double lead_v = 0.0;
      for (std::size_t j = 0; j < nv; ++j) {
        if (j == i || !yields_to(i, j)) continue;
        const double g = hit[i * nv + j] - dims.length;
        if (g < gap) {
          gap = g;
          lead_v = live[j].v * std::max(0.0, std::cos(live[j].heading - me.heading));
        }
      }

      if (!me.accepted && me.s < path.stop_s) {
        const double to_line = path.stop_s - me.s - 0.5 * dims.length;
        if (to_line < 15.0) {
          // gap acceptance against circulating traffic at the merge point
          const double theta = path.ring_a0;
          const double reach = path.ring_s0 - me.s;
          const double t_self = earliest_arrival(me.v, std::max(me.v, p.ring_speed), reach);
          bool ok = true;
          for (std::size_t j = 0; j < live.size() && ok; ++j) {
            // same approach lane: handled by car following
            if (j == i || live[j].path / p.arms == me.path / p.arms) continue;
            const auto cross = path_of(live[j]).ring_crossing(theta);
            if (!cross) continue;
            const double dist = *cross - live[j].s;
            if (dist < -(dims.length + 1.0)) continue;
            if (dist <= 0.0) {
              ok = false;
              continue;
            }
            const Vehicle & o = live[j];
            // queued drivers that have not committed will yield themselves
            if (!o.accepted && o.s < path_of(o).stop_s) continue;
            const double tta = earliest_arrival(o.v, std::max(o.v, p.ring_speed), dist);
            if (tta < 12.0 && std::abs(tta - t_self) < me.driver.gap) ok = false;
          }
          me.accepted = ok;
        }
        if (!me.accepted) {
          const double g = std::max(0.0, to_line) + me.driver.min_gap - 0.5;
          if (g < gap) {
            gap = g;
            lead_v = 0.0;
          }
        }
      }
      acc[i] = std::clamp(idm(me.v, v0, gap, me.v - lead_v, me.driver), -kMaxBrake, kAccel);
    }

    for (std::size_t i = 0; i < live.size(); ++i) {
      Vehicle & v = live[i];
      v.v = std::max(0.0, v.v + acc[i] * h);
      v.s += v.v * h;
      v.lat += -v.lat / lat_tau * h + p.lateral_noise * std::sqrt(2.0 * h / lat_tau) * normal(rng);
      v.jitter +=
        -v.jitter / jit_tau * h + p.heading_noise * std::sqrt(2.0 * h / jit_tau) * normal(rng);
      place(v);
    }

    const bool frame = n >= warm && (n - warm) % sub == 0;
    const int frame_no = static_cast<int>((n - warm) / sub);
    for (auto it = live.begin(); it != live.end();) {
      if (it->s >= path_of(*it).length()) {
        if (!it->track.states.empty()) rec.tracks.push_back(std::move(it->track));
        it = live.erase(it);
        continue;
      }
      if (frame) {
        if (it->track.states.empty()) it->track.first_frame = frame_no;
        it->track.states.push_back(VehicleState::from_heading(it->pos.x, it->pos.y, it->heading));
      }
      ++it;
    }
  }
  for (Vehicle & v : live) {
    if (!v.track.states.empty()) rec.tracks.push_back(std::move(v.track));
  }
  std::sort(rec.tracks.begin(), rec.tracks.end(), [](const Track & a, const Track & b) {
    return a.id < b.id;
  });
  return rec;
}

std::vector<Recording> gen_synthetic_dataset(
  const SyntheticWorldParams & base, const std::vector<double> & thresholds)
{
  std::vector<Recording> out;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    SyntheticWorldParams p = base;
    p.gap_threshold = thresholds[i];
    p.seed = derive_seed(base.seed, {i});
    out.push_back(gen_synthetic(p));
  }
  return out;
}

}  // namespace riskenv
