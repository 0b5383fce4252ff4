#ifndef PATHFORGE_ENVGEN_HPP
#define PATHFORGE_ENVGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/rng.hpp"

namespace pathforge {

enum class StartGoalPolicy { corners, random_free };

inline StartGoalPolicy parse_start_goal_policy(std::string_view s) {
  if (s == "corners") return StartGoalPolicy::corners;
  if (s == "random_free") return StartGoalPolicy::random_free;
  throw Error(errc::kInvalidInput, "unknown start/goal policy '" + std::string(s) + "'");
}

/// Generator knobs. `density` scales how much of the admissible wall budget a
/// family uses; `corridor_width` is the narrowest passage the generator leaves.
struct EnvGenConfig {
  Family family = Family::maze;
  double width = 50.0;
  double height = 50.0;
  double density = 0.5;
  double corridor_width = 3.0;
  std::uint64_t seed = 0;
  StartGoalPolicy start_goal_policy = StartGoalPolicy::corners;
  // Regeneration budget: attempt k reseeds with derive_seed(seed, k).
  unsigned max_attempts = 64;
  // Clearance a feasible route must keep; matches the planner's default inflation.
  double feasibility_clearance = 0.25;
};

inline void check_config(const EnvGenConfig& cfg) {
  if (!(cfg.width > 0.0) || !(cfg.height > 0.0) || !std::isfinite(cfg.width) ||
      !std::isfinite(cfg.height))
    throw Error(errc::kInvalidInput, "workspace width and height must be positive and finite");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0))
    throw Error(errc::kInvalidInput, "density must lie in (0, 1]");
  if (!(cfg.corridor_width > 0.0 && cfg.corridor_width < std::min(cfg.width, cfg.height) / 4.0))
    throw Error(errc::kInvalidInput, "corridor_width must lie in (0, min(width, height) / 4)");
  if (cfg.max_attempts == 0) throw Error(errc::kInvalidInput, "max_attempts must be positive");
}

/// Lists every broken Environment invariant; empty means valid.
inline std::vector<std::string> validate(const Environment& env) {
  std::vector<std::string> out;
  auto fmt_point = [](Point p) {
    std::ostringstream s;
    s << '(' << p.x << ", " << p.y << ')';
    return s.str();
  };
  if (!(env.width > 0.0) || !(env.height > 0.0) || !std::isfinite(env.width) ||
      !std::isfinite(env.height)) {
    out.push_back("bounds: width and height must be positive and finite");
    return out;
  }
  for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
    const auto& o = env.obstacles[k];
    if (o.vertices.size() < 3) {
      out.push_back("obstacle " + std::to_string(k) + " has fewer than 3 vertices");
      continue;
    }
    bool finite = true;
    for (std::size_t j = 0; j < o.vertices.size(); ++j) {
      const Point v = o.vertices[j];
      if (!is_finite(v)) {
        out.push_back("obstacle " + std::to_string(k) + " vertex " + std::to_string(j) +
                      " is not finite");
        finite = false;
      } else if (!env.in_bounds(v)) {
        out.push_back("bounds: obstacle " + std::to_string(k) + " vertex " + std::to_string(j) +
                      ' ' + fmt_point(v) + " lies outside the workspace");
      }
    }
    if (finite && !is_simple(o))
      out.push_back("obstacle " + std::to_string(k) + " is not a simple polygon");
  }
  auto check_endpoint = [&](const char* name, Point p) {
    if (!is_finite(p)) {
      out.push_back(std::string(name) + " is not finite");
      return;
    }
    if (!env.in_bounds(p)) out.push_back(std::string(name) + ' ' + fmt_point(p) + " lies outside the workspace");
    for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
      const auto& o = env.obstacles[k];
      if (o.vertices.size() < 3) continue;
      if (point_in_obstacle(p, o))
        out.push_back(std::string(name) + ' ' + fmt_point(p) + " lies inside obstacle " + std::to_string(k));
      else if (dist_point_obstacle(p, o) == 0.0)
        out.push_back(std::string(name) + ' ' + fmt_point(p) + " lies on the boundary of obstacle " +
                      std::to_string(k));
    }
  };
  check_endpoint("start", env.start);
  check_endpoint("goal", env.goal);
  return out;
}

/// Conservative connectivity certificate: a 4-connected lattice of spacing
/// `cell` whose nodes and edges are collision-free at `inflation`, with start
/// and goal wired to every lattice node they can see inside their own cell
/// neighbourhood. True means a collision-free start->goal polyline exists.
inline bool free_path_exists(const Environment& env, double cell, double inflation) {
  const ObstacleIndex obs(env.obstacles);
  if (!obs.point_free(env.start, inflation) || !obs.point_free(env.goal, inflation)) return false;
  if (obs.segment_free(env.start, env.goal, inflation)) return true;
  const int nx = std::max(1, static_cast<int>(std::floor(env.width / cell)));
  const int ny = std::max(1, static_cast<int>(std::floor(env.height / cell)));
  const double cw = env.width / nx;
  const double ch = env.height / ny;
  auto center = [&](int i, int j) { return Point{(i + 0.5) * cw, (j + 0.5) * ch}; };
  const auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
  std::vector<signed char> free_node(static_cast<std::size_t>(nx) * ny, -1);
  auto node_free = [&](int i, int j) {
    auto& s = free_node[idx(i, j)];
    if (s < 0) s = obs.point_free(center(i, j), inflation) ? 1 : 0;
    return s == 1;
  };
  auto endpoint_links = [&](Point p) {
    std::vector<std::pair<int, int>> links;
    const int ci = std::clamp(static_cast<int>(p.x / cw), 0, nx - 1);
    const int cj = std::clamp(static_cast<int>(p.y / ch), 0, ny - 1);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int i = ci + di, j = cj + dj;
        if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
        if (node_free(i, j) && obs.segment_free(p, center(i, j), inflation)) links.emplace_back(i, j);
      }
    return links;
  };
  const auto from = endpoint_links(env.start);
  const auto to = endpoint_links(env.goal);
  if (from.empty() || to.empty()) return false;
  std::vector<char> target(free_node.size(), 0);
  for (auto [i, j] : to) target[idx(i, j)] = 1;
  std::vector<char> seen(free_node.size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (auto [i, j] : from) {
    if (target[idx(i, j)]) return true;
    seen[idx(i, j)] = 1;
    queue.emplace_back(i, j);
  }
  constexpr int kDi[4] = {1, -1, 0, 0};
  constexpr int kDj[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int ni = i + kDi[k], nj = j + kDj[k];
      if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
      if (seen[idx(ni, nj)] || !node_free(ni, nj)) continue;
      if (!obs.segment_free(center(i, j), center(ni, nj), inflation)) continue;
      if (target[idx(ni, nj)]) return true;
      seen[idx(ni, nj)] = 1;
      queue.emplace_back(ni, nj);
    }
  }
  return false;
}

namespace detail {

struct PlacementFailure {
  std::string constraint;
};

inline Obstacle rectangle(double x0, double y0, double x1, double y1) {
  return Obstacle{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// Annulus sector between bearings a0 < a1 (radians), discretized at 64
// vertices per full turn.
inline Obstacle arc_band(Point c, double r_in, double r_out, double a0, double a1) {
  constexpr double kStep = 2.0 * std::numbers::pi / 64.0;
  const double span = a1 - a0;
  const int k = std::max(2, static_cast<int>(std::ceil(span / kStep)));
  Obstacle o;
  o.vertices.reserve(2 * (k + 1));
  for (int i = 0; i <= k; ++i) {
    const double a = a0 + span * i / k;
    o.vertices.push_back({c.x + r_out * std::cos(a), c.y + r_out * std::sin(a)});
  }
  for (int i = k; i >= 0; --i) {
    const double a = a0 + span * i / k;
    o.vertices.push_back({c.x + r_in * std::cos(a), c.y + r_in * std::sin(a)});
  }
  return o;
}

inline std::vector<Obstacle> make_rings(const EnvGenConfig& cfg, Rng& rng) {
  constexpr double kThickness = 0.6;
  const double c = cfg.corridor_width;
  const Point center{cfg.width / 2.0, cfg.height / 2.0};
  const double r_first = 1.5 * c;
  const double r_last = std::min(cfg.width, cfg.height) / 2.0 - c - kThickness;
  const double pitch = c + kThickness;
  if (r_last <= r_first) throw PlacementFailure{"rings: workspace too small for one ring"};
  const int max_rings = static_cast<int>(std::floor((r_last - r_first) / pitch)) + 1;
  const int n = std::clamp(static_cast<int>(std::lround(cfg.density * max_rings)), 1, max_rings);
  std::vector<Obstacle> out;
  for (int k = 0; k < n; ++k) {
    const double r = n == 1 ? 0.5 * (r_first + r_last) : r_first + (r_last - r_first) * k / (n - 1);
    const double r_in = r - kThickness / 2.0;
    const double r_out = r + kThickness / 2.0;
    const double gap_len = c * rng.uniform(1.5, 2.0);
    const double gap = 2.0 * std::asin(std::min(1.0, gap_len / (2.0 * r_in)));
    const int gaps = 1 + static_cast<int>(rng.below(2));
    std::vector<double> starts;
    const double first = rng.uniform(0.0, 2.0 * std::numbers::pi);
    starts.push_back(first);
    if (gaps == 2) starts.push_back(first + std::numbers::pi + rng.uniform(-0.5, 0.5));
    // Wall arcs run from the end of one gap to the start of the next.
    for (std::size_t g = 0; g < starts.size(); ++g) {
      const double a0 = starts[g] + gap;
      const double a1 = g + 1 < starts.size() ? starts[g + 1] : starts[0] + 2.0 * std::numbers::pi;
      if (a1 - a0 > 1e-6) out.push_back(arc_band(center, r_in, r_out, a0, a1));
    }
  }
  return out;
}

// Horizontal zig-zag wall from x0 to x1 around baseline y, thickened vertically.
inline Obstacle zigzag_piece(double x0, double x1, double y, double amplitude, double half_wave,
                             double phase, double thickness) {
  auto wave = [&](double x) {
    // Triangle wave of period 2 * half_wave, range [-amplitude, amplitude].
    const double u = (x + phase) / half_wave;
    const double f = u - 2.0 * std::floor(u / 2.0);
    return y + amplitude * (f <= 1.0 ? (2.0 * f - 1.0) : (3.0 - 2.0 * f));
  };
  std::vector<double> xs{x0};
  const double first = std::ceil((x0 + phase) / half_wave) * half_wave - phase;
  for (double x = first; x < x1; x += half_wave)
    if (x > x0 + 1e-9 && x < x1 - 1e-9) xs.push_back(x);
  xs.push_back(x1);
  Obstacle o;
  for (double x : xs) o.vertices.push_back({x, wave(x) + thickness / 2.0});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) o.vertices.push_back({*it, wave(*it) - thickness / 2.0});
  return o;
}

inline std::vector<Obstacle> make_waves(const EnvGenConfig& cfg, Rng& rng) {
  constexpr double kThickness = 0.6;
  const double c = cfg.corridor_width;
  const double amplitude = 0.5 * c;
  const double half_wave = 1.5 * c;
  const double extent = 2.0 * amplitude + kThickness;
  const double lo = 2.0 * c + extent / 2.0;
  const double hi = cfg.height - 2.0 * c - extent / 2.0;
  if (hi < lo) throw PlacementFailure{"waves: workspace too small for one band"};
  const double pitch = extent + 1.5 * c;
  const int max_bands = static_cast<int>(std::floor((hi - lo) / pitch)) + 1;
  const int n = std::clamp(static_cast<int>(std::lround(cfg.density * max_bands)), 1, max_bands);
  std::vector<Obstacle> out;
  for (int k = 0; k < n; ++k) {
    const double y = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1);
    const double gap = c * rng.uniform(1.5, 2.0);
    // Staggered: even bands open on the left half, odd bands on the right half.
    const double half_lo = (k % 2 == 0) ? 0.1 * cfg.width : 0.5 * cfg.width;
    const double gap_x0 = rng.uniform(half_lo, half_lo + 0.4 * cfg.width - gap);
    const double phase = rng.uniform(0.0, 2.0 * half_wave);
    if (gap_x0 > kThickness) out.push_back(zigzag_piece(0.0, gap_x0, y, amplitude, half_wave, phase, kThickness));
    if (cfg.width - (gap_x0 + gap) > kThickness)
      out.push_back(zigzag_piece(gap_x0 + gap, cfg.width, y, amplitude, half_wave, phase, kThickness));
  }
  return out;
}

/// Grid maze carved by randomized depth-first search. Cells are indexed
/// (i, j) with i along x. `open_east[i][j]` / `open_north[i][j]` flag removed walls.
struct MazeGrid {
  int nx = 0;
  int ny = 0;
  std::vector<char> open_east;   // wall between (i, j) and (i + 1, j)
  std::vector<char> open_north;  // wall between (i, j) and (i, j + 1)

  std::size_t at(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx + i; }
};

inline MazeGrid carve_maze(int nx, int ny, double extra_open_fraction, Rng& rng) {
  MazeGrid g{nx, ny, std::vector<char>(static_cast<std::size_t>(nx) * ny, 0),
             std::vector<char>(static_cast<std::size_t>(nx) * ny, 0)};
  std::vector<char> visited(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[g.at(0, 0)] = 1;
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    std::vector<int> dirs;
    if (i + 1 < nx && !visited[g.at(i + 1, j)]) dirs.push_back(0);
    if (i > 0 && !visited[g.at(i - 1, j)]) dirs.push_back(1);
    if (j + 1 < ny && !visited[g.at(i, j + 1)]) dirs.push_back(2);
    if (j > 0 && !visited[g.at(i, j - 1)]) dirs.push_back(3);
    if (dirs.empty()) {
      stack.pop_back();
      continue;
    }
    const int d = dirs[rng.below(dirs.size())];
    int ni = i, nj = j;
    switch (d) {
      case 0: g.open_east[g.at(i, j)] = 1; ni = i + 1; break;
      case 1: g.open_east[g.at(i - 1, j)] = 1; ni = i - 1; break;
      case 2: g.open_north[g.at(i, j)] = 1; nj = j + 1; break;
      default: g.open_north[g.at(i, j - 1)] = 1; nj = j - 1; break;
    }
    visited[g.at(ni, nj)] = 1;
    stack.emplace_back(ni, nj);
  }
  // Knock out extra walls to create loops (more distinct routes per maze).
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx && !g.open_east[g.at(i, j)] && rng.uniform01() < extra_open_fraction)
        g.open_east[g.at(i, j)] = 1;
      if (j + 1 < ny && !g.open_north[g.at(i, j)] && rng.uniform01() < extra_open_fraction)
        g.open_north[g.at(i, j)] = 1;
    }
  return g;
}

inline constexpr double kMazeWallThickness = 0.5;

inline std::pair<int, int> maze_dims(const EnvGenConfig& cfg) {
  const double target = 1.3 * (cfg.corridor_width + kMazeWallThickness);
  return {std::max(2, static_cast<int>(std::floor(cfg.width / target))),
          std::max(2, static_cast<int>(std::floor(cfg.height / target)))};
}

inline std::vector<Obstacle> maze_walls(const MazeGrid& g, double width, double height) {
  const double cw = width / g.nx;
  const double ch = height / g.ny;
  const double h = kMazeWallThickness / 2.0;
  std::vector<Obstacle> out;
  // Vertical walls on x = i * cw, merged along runs of closed cells.
  for (int i = 1; i < g.nx; ++i) {
    int j = 0;
    while (j < g.ny) {
      if (g.open_east[g.at(i - 1, j)]) {
        ++j;
        continue;
      }
      const int j0 = j;
      while (j < g.ny && !g.open_east[g.at(i - 1, j)]) ++j;
      out.push_back(rectangle(i * cw - h, std::max(0.0, j0 * ch - h), i * cw + h,
                              std::min(height, j * ch + h)));
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    int i = 0;
    while (i < g.nx) {
      if (g.open_north[g.at(i, j - 1)]) {
        ++i;
        continue;
      }
      const int i0 = i;
      while (i < g.nx && !g.open_north[g.at(i, j - 1)]) ++i;
      out.push_back(rectangle(std::max(0.0, i0 * cw - h), j * ch - h, std::min(width, i * cw + h),
                              j * ch + h));
    }
  }
  return out;
}

inline std::vector<Obstacle> make_random(const EnvGenConfig& cfg, Rng& rng, Point start, Point goal) {
  const double c = cfg.corridor_width;
  const double target = cfg.density * 0.2 * cfg.width * cfg.height;
  std::vector<Obstacle> out;
  std::vector<Box> boxes;
  double covered = 0.0;
  constexpr int kBudget = 4000;
  int tries = 0;
  // Stop once the next rectangle of mean size would overshoot the target by
  // more than half, so a tiny density places nothing.
  const double half_mean_area = 0.5 * (1.5 * c) * (1.5 * c);
  while (covered + half_mean_area < target) {
    if (++tries > kBudget)
      throw PlacementFailure{"random: coverage target unreachable within the placement budget "
                             "(density too high for corridor_width)"};
    const double w = rng.uniform(0.5 * c, 2.5 * c);
    const double h = rng.uniform(0.5 * c, 2.5 * c);
    const double theta = rng.uniform(0.0, std::numbers::pi / 2.0);
    const Point ctr{rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height)};
    const double cs = std::cos(theta), sn = std::sin(theta);
    Obstacle o;
    for (auto [sx, sy] : {std::pair{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}) {
      const double lx = sx * w / 2.0, ly = sy * h / 2.0;
      o.vertices.push_back({ctr.x + cs * lx - sn * ly, ctr.y + sn * lx + cs * ly});
    }
    const Box b = o.bounds();
    if (b.min_x < 0.0 || b.min_y < 0.0 || b.max_x > cfg.width || b.max_y > cfg.height) continue;
    if (b.distance_to(start) < c || b.distance_to(goal) < c) continue;
    bool clash = false;
    for (const auto& other : boxes)
      if (b.overlaps(other, c)) {
        clash = true;
        break;
      }
    if (clash) continue;
    boxes.push_back(b);
    out.push_back(std::move(o));
    covered += w * h;
  }
  return out;
}

inline std::pair<Point, Point> corner_endpoints(const EnvGenConfig& cfg) {
  const double inset = cfg.corridor_width;
  if (cfg.family == Family::rings)
    return {{cfg.width / 2.0, cfg.height / 2.0}, {cfg.width - inset, cfg.height - inset}};
  if (cfg.family == Family::maze) {
    const auto [nx, ny] = maze_dims(cfg);
    const double cw = cfg.width / nx, ch = cfg.height / ny;
    return {{cw / 2.0, ch / 2.0}, {cfg.width - cw / 2.0, cfg.height - ch / 2.0}};
  }
  return {{inset, inset}, {cfg.width - inset, cfg.height - inset}};
}

inline std::pair<Point, Point> random_endpoints(const EnvGenConfig& cfg, std::span<const Obstacle> obs,
                                                Rng& rng) {
  const double need = cfg.corridor_width / 2.0;
  const double sep = 0.5 * std::max(cfg.width, cfg.height);
  auto draw = [&]() -> std::optional<Point> {
    for (int t = 0; t < 2000; ++t) {
      const Point p{rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height)};
      if (point_is_free(p, obs, need)) return p;
    }
    return std::nullopt;
  };
  for (int t = 0; t < 200; ++t) {
    const auto s = draw();
    const auto g = draw();
    if (!s || !g) break;
    if (distance(*s, *g) >= sep) return {*s, *g};
  }
  throw PlacementFailure{"start/goal: no free pair with clearance >= corridor_width/2 and "
                         "separation >= 0.5*max(width, height)"};
}

}  // namespace detail

inline std::string environment_id(Family family, std::uint64_t seed) {
  return std::string(to_string(family)) + "-" + std::to_string(seed);
}

/// Deterministic environment for `cfg`; regenerates with derived seeds until
/// the layout is valid, the endpoints are well placed and a route exists.
inline Environment generate(const EnvGenConfig& cfg) {
  check_config(cfg);
  std::string last_failure = "none";
  for (unsigned attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Rng rng(derive_seed(cfg.seed, attempt), std::string("envgen:") + std::string(to_string(cfg.family)));
    Environment env;
    env.id = environment_id(cfg.family, cfg.seed);
    env.width = cfg.width;
    env.height = cfg.height;
    env.family = cfg.family;
    env.seed = cfg.seed;
    try {
      const auto corners = detail::corner_endpoints(cfg);
      switch (cfg.family) {
        case Family::rings: env.obstacles = detail::make_rings(cfg, rng); break;
        case Family::waves: env.obstacles = detail::make_waves(cfg, rng); break;
        case Family::maze: {
          const auto [nx, ny] = detail::maze_dims(cfg);
          const auto grid = detail::carve_maze(nx, ny, 0.5 * (1.0 - cfg.density), rng);
          env.obstacles = detail::maze_walls(grid, cfg.width, cfg.height);
          break;
        }
        case Family::random:
          env.obstacles = detail::make_random(cfg, rng, corners.first, corners.second);
          break;
      }
      if (cfg.start_goal_policy == StartGoalPolicy::corners) {
        env.start = corners.first;
        env.goal = corners.second;
      } else {
        std::tie(env.start, env.goal) = detail::random_endpoints(cfg, env.obstacles, rng);
      }
    } catch (const detail::PlacementFailure& f) {
      last_failure = f.constraint;
      continue;
    }
    if (auto v = validate(env); !v.empty()) {
      last_failure = "validity: " + v.front();
      continue;
    }
    const double need = cfg.corridor_width / 2.0;
    const std::span<const Obstacle> obs(env.obstacles);
    if (clearance(env.start, obs) < need || clearance(env.goal, obs) < need) {
      last_failure = "start/goal clearance below corridor_width/2";
      continue;
    }
    if (distance(env.start, env.goal) < 0.5 * std::max(env.width, env.height)) {
      last_failure = "start/goal separation below 0.5*max(width, height)";
      continue;
    }
    if (!free_path_exists(env, cfg.corridor_width / 4.0, cfg.feasibility_clearance)) {
      last_failure = "feasibility: no collision-free start-goal route";
      continue;
    }
    return env;
  }
  throw Error(errc::kGenerationFailed, "environment generation failed after " +
                                           std::to_string(cfg.max_attempts) +
                                           " attempts; last failed constraint: " + last_failure);
}

}  // namespace pathforge

#endif  // PATHFORGE_ENVGEN_HPP
