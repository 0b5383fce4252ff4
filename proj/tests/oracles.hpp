// Reference implementations used only by tests. Each one is written from the
// quantity's definition and avoids the library's code paths.
#ifndef PATHFORGE_TESTS_ORACLES_HPP
#define PATHFORGE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/pairing.hpp"

namespace oracle {

using pathforge::DescriptorVector;
using pathforge::Environment;
using pathforge::Obstacle;
using pathforge::Point;

// Distance to a closed segment: min of the two endpoint distances and, when
// the perpendicular foot falls inside, the perpendicular height.
inline double seg_dist(Point p, Point a, Point b) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double da = std::sqrt((p.x - a.x) * (p.x - a.x) + (p.y - a.y) * (p.y - a.y));
  const double db = std::sqrt((p.x - b.x) * (p.x - b.x) + (p.y - b.y) * (p.y - b.y));
  double best = std::min(da, db);
  const double len2 = ex * ex + ey * ey;
  if (len2 == 0.0) return da;
  const double s = ((p.x - a.x) * ex + (p.y - a.y) * ey);
  if (s > 0.0 && s < len2) {
    const double h = std::abs((p.x - a.x) * ey - (p.y - a.y) * ex) / std::sqrt(len2);
    best = std::min(best, h);
  }
  return best;
}

// Minimum over n + 1 evenly spaced samples of the segment.
inline double sampled_seg_dist(Point p, Point a, Point b, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double x = a.x + t * (b.x - a.x), y = a.y + t * (b.y - a.y);
    best = std::min(best, std::hypot(p.x - x, p.y - y));
  }
  return best;
}

inline double boundary_dist(Point p, const Obstacle& o) {
  double best = std::numeric_limits<double>::infinity();
  const auto& v = o.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, seg_dist(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

inline double env_clearance(Point p, const Environment& env) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : env.obstacles) best = std::min(best, boundary_dist(p, o));
  return best;
}

// Winding number; nonzero means inside. Boundary points are not handled here.
inline int winding_number(Point p, const Obstacle& o) {
  int wn = 0;
  const auto& v = o.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i], b = v[(i + 1) % v.size()];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

inline bool inside_any(Point p, const Environment& env) {
  for (const auto& o : env.obstacles)
    if (winding_number(p, o) != 0) return true;
  return false;
}

// Signed heading difference, wrapped and taken unsigned.
inline double heading_turn(Point p0, Point p1, Point p2) {
  const double h1 = std::atan2(p1.y - p0.y, p1.x - p0.x);
  const double h2 = std::atan2(p2.y - p1.y, p2.x - p1.x);
  double d = h2 - h1;
  while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
  while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
  return std::abs(d) * 180.0 / std::numbers::pi;
}

// Descriptor formulas evaluated literally on the waypoint list.
inline DescriptorVector descriptors(const std::vector<Point>& raw, const Environment& env) {
  DescriptorVector d;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (const Point p : raw) {
    const double c = env_clearance(p, env);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  d.min_clearance = lo;
  d.max_clearance = hi;
  d.avg_clearance = sum / static_cast<double>(raw.size());
  for (std::size_t j = 1; j < raw.size(); ++j)
    d.path_length += std::sqrt((raw[j].x - raw[j - 1].x) * (raw[j].x - raw[j - 1].x) +
                               (raw[j].y - raw[j - 1].y) * (raw[j].y - raw[j - 1].y));
  std::vector<Point> pts;
  for (const Point p : raw)
    if (pts.empty() || pts.back().x != p.x || pts.back().y != p.y) pts.push_back(p);
  for (std::size_t j = 2; j < pts.size(); ++j) {
    const double th = heading_turn(pts[j - 2], pts[j - 1], pts[j]);
    d.smoothness += th;
    if (th > 90.0) ++d.sharp_turns;
    d.max_angle = std::max(d.max_angle, th);
  }
  return d;
}

// True when every sample along ab (spacing <= step) is outside all
// obstacles and at least `inflation` from every boundary.
inline bool sampled_segment_free(Point a, Point b, const Environment& env, double inflation, double step = 0.05) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    if (inside_any(p, env)) return false;
    if (!env.obstacles.empty() && env_clearance(p, env) < inflation) return false;
  }
  return true;
}

// 4-connected flood fill over cell centres; start and goal join the lattice
// through any free straight link to a centre within 1.5 cells.
inline bool flood_fill_reachable(const Environment& env, double cell, double inflation) {
  const int nx = static_cast<int>(std::floor(env.width / cell));
  const int ny = static_cast<int>(std::floor(env.height / cell));
  auto centre = [&](int i, int j) { return Point{(i + 0.5) * cell, (j + 0.5) * cell}; };
  auto ok_point = [&](Point p) {
    return !inside_any(p, env) && (env.obstacles.empty() || env_clearance(p, env) >= inflation);
  };
  std::vector<char> free(static_cast<std::size_t>(nx * ny)), seen(free.size(), 0), goal_link(free.size(), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) free[j * nx + i] = ok_point(centre(i, j));
  if (sampled_segment_free(env.start, env.goal, env, inflation)) return true;
  std::deque<int> q;
  auto near = [&](Point p, int i, int j) { return std::hypot(centre(i, j).x - p.x, centre(i, j).y - p.y) <= 1.5 * cell; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      if (!free[k]) continue;
      if (near(env.goal, i, j) && sampled_segment_free(centre(i, j), env.goal, env, inflation)) goal_link[k] = 1;
      if (near(env.start, i, j) && sampled_segment_free(env.start, centre(i, j), env, inflation)) {
        seen[k] = 1;
        q.push_back(k);
      }
    }
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    const int k = q.front();
    q.pop_front();
    if (goal_link[k]) return true;
    const int i = k % nx, j = k / nx;
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d], b = j + dj[d];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      const int m = b * nx + a;
      if (seen[m] || !free[m]) continue;
      if (!sampled_segment_free(centre(i, j), centre(a, b), env, inflation)) continue;
      seen[m] = 1;
      q.push_back(m);
    }
  }
  return false;
}

// Step-by-step greedy: scan every pair of still-unused paths, keep the
// largest distance, first (i, j) in lexicographic order on ties.
inline std::vector<std::pair<std::size_t, std::size_t>> reference_greedy(
    const std::vector<pathforge::NormalizedVector>& v, unsigned k) {
  std::vector<char> used(v.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  while (out.size() < k) {
    double best = -1.0;
    std::optional<std::pair<std::size_t, std::size_t>> pick;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        if (used[i] || used[j]) continue;
        double s = 0.0;
        for (std::size_t f = 0; f < v[i].size(); ++f) s += (v[i][f] - v[j][f]) * (v[i][f] - v[j][f]);
        const double dist = std::sqrt(s);
        if (dist > best) {
          best = dist;
          pick = {i, j};
        }
      }
    if (!pick) break;
    used[pick->first] = used[pick->second] = 1;
    out.push_back(*pick);
  }
  return out;
}

// Random simple polygon: star-shaped around c with sorted bearings.
inline Obstacle random_star(std::mt19937_64& g, Point c, double r_min, double r_max, int n) {
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), rad(r_min, r_max);
  std::vector<double> a(n);
  for (auto& x : a) x = ang(g);
  std::sort(a.begin(), a.end());
  Obstacle o;
  for (double t : a) {
    const double r = rad(g);
    o.vertices.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return o;
}

inline Obstacle square(double x0, double y0, double x1, double y1) {
  return Obstacle{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

}  // namespace oracle

#endif  // PATHFORGE_TESTS_ORACLES_HPP
