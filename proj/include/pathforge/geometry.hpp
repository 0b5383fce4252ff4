#ifndef PATHFORGE_GEOMETRY_HPP
#define PATHFORGE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathforge/error.hpp"

namespace pathforge {

/// Workspace location in grid units.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) noexcept = default;
};

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) noexcept { return norm(b - a); }
inline bool is_finite(Point p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void expand(Point p) noexcept {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }

  /// Euclidean distance from a point to the box (0 inside).
  double distance_to(Point p) const noexcept {
    const double dx = std::max({min_x - p.x, 0.0, p.x - max_x});
    const double dy = std::max({min_y - p.y, 0.0, p.y - max_y});
    return std::hypot(dx, dy);
  }

  bool overlaps(const Box& o, double margin) const noexcept {
    return min_x - margin <= o.max_x && o.min_x <= max_x + margin && min_y - margin <= o.max_y &&
           o.min_y <= max_y + margin;
  }
};

/// Closed polygonal wall; the ring closes implicitly from the last vertex back
/// to the first.
struct Obstacle {
  std::vector<Point> vertices;

  std::size_t edge_count() const noexcept { return vertices.size(); }
  Point edge_begin(std::size_t i) const noexcept { return vertices[i]; }
  Point edge_end(std::size_t i) const noexcept { return vertices[(i + 1) % vertices.size()]; }

  Box bounds() const noexcept {
    Box b;
    for (const auto& v : vertices) b.expand(v);
    return b;
  }

  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

enum class Family { rings, waves, maze, random };

inline std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::rings: return "rings";
    case Family::waves: return "waves";
    case Family::maze: return "maze";
    case Family::random: return "random";
  }
  return "random";
}

inline Family parse_family(std::string_view s) {
  if (s == "rings") return Family::rings;
  if (s == "waves") return Family::waves;
  if (s == "maze") return Family::maze;
  if (s == "random") return Family::random;
  throw Error(errc::kInvalidInput, "unknown environment family '" + std::string(s) + "'");
}

/// Bounded workspace [0, width] x [0, height] with walls and endpoints.
struct Environment {
  std::string id;
  double width = 50.0;
  double height = 50.0;
  std::vector<Obstacle> obstacles;
  Point start;
  Point goal;
  Family family = Family::random;
  std::uint64_t seed = 0;

  bool in_bounds(Point p) const noexcept {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }

  friend bool operator==(const Environment&, const Environment&) = default;
};

/// Distance from p to the closed segment ab (to a itself when a == b).
inline double dist_point_segment(Point p, Point a, Point b) noexcept {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Unsigned distance from p to the obstacle boundary.
inline double dist_point_obstacle(Point p, const Obstacle& o) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < o.edge_count(); ++i)
    best = std::min(best, dist_point_segment(p, o.edge_begin(i), o.edge_end(i)));
  return best;
}

/// Distance from p to the nearest obstacle boundary; +inf without obstacles.
inline double clearance(Point p, std::span<const Obstacle> obstacles) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) best = std::min(best, dist_point_obstacle(p, o));
  return best;
}

namespace detail {

inline int orientation(Point a, Point b, Point c) noexcept {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Point a, Point b, Point p) noexcept {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// True when the closed segments ab and cd share at least one point.
inline bool segments_intersect(Point a, Point b, Point c, Point d) noexcept {
  using detail::on_segment;
  using detail::orientation;
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline double dist_segment_segment(Point a, Point b, Point c, Point d) noexcept {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({dist_point_segment(a, c, d), dist_point_segment(b, c, d),
                   dist_point_segment(c, a, b), dist_point_segment(d, a, b)});
}

/// Strict interior test by ray crossing. Points on the boundary are outside.
inline bool point_in_obstacle(Point p, const Obstacle& o) noexcept {
  const std::size_t n = o.edge_count();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = o.edge_begin(i);
    const Point b = o.edge_end(i);
    if (detail::orientation(a, b, p) == 0 && detail::on_segment(a, b, p)) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

namespace detail {

// segment_hits_obstacle without the bounding-box rejection.
inline bool segment_hits_polygon(Point a, Point b, const Obstacle& o, double inflation) noexcept {
  if (point_in_obstacle(a, o) || point_in_obstacle(b, o)) return true;
  for (std::size_t i = 0; i < o.edge_count(); ++i) {
    const double d = dist_segment_segment(a, b, o.edge_begin(i), o.edge_end(i));
    if (d == 0.0 || d < inflation) return true;
  }
  return false;
}

}  // namespace detail

/// Collision test for a straight move: true iff ab touches the boundary of o,
/// starts or ends strictly inside it, or passes closer than `inflation` to it.
inline bool segment_hits_obstacle(Point a, Point b, const Obstacle& o, double inflation) noexcept {
  if (o.edge_count() == 0) return false;
  Box seg;
  seg.expand(a);
  seg.expand(b);
  if (!seg.overlaps(o.bounds(), inflation)) return false;
  return detail::segment_hits_polygon(a, b, o, inflation);
}

/// Unsigned angle in degrees between p0->p1 and p1->p2.
inline double turn_angle(Point p0, Point p1, Point p2) {
  const Point u = p1 - p0;
  const Point v = p2 - p1;
  if ((u.x == 0.0 && u.y == 0.0) || (v.x == 0.0 && v.y == 0.0))
    throw Error(errc::kDegenerateAngle,
                "turn_angle needs distinct consecutive points; deduplicate the path first");
  const double c = cross(u, v);
  const double d = dot(u, v);
  // Exact axis cases keep the 0 / 90 / 180 boundaries free of rounding.
  if (c == 0.0) return d > 0.0 ? 0.0 : 180.0;
  if (d == 0.0) return 90.0;
  return std::atan2(std::abs(c), d) * 180.0 / std::numbers::pi;
}

/// Non-self-intersecting check: non-adjacent edges must be disjoint and
/// adjacent edges may only share their common vertex.
inline bool is_simple(const Obstacle& o) noexcept {
  const std::size_t n = o.edge_count();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (o.edge_begin(i) == o.edge_end(i)) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = o.edge_begin(i);
    const Point b = o.edge_end(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = o.edge_begin(j);
      const Point d = o.edge_end(j);
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (!adjacent) {
        if (segments_intersect(a, b, c, d)) return false;
        continue;
      }
      // Adjacent edges overlap only if they are collinear and fold back.
      const Point shared = (j == i + 1) ? b : a;
      const Point other_i = (j == i + 1) ? a : b;
      const Point other_j = (j == i + 1) ? d : c;
      if (detail::orientation(other_i, shared, other_j) == 0 &&
          dot(other_i - shared, other_j - shared) > 0.0)
        return false;
    }
  }
  return true;
}

inline bool segment_is_free(Point a, Point b, std::span<const Obstacle> obstacles,
                            double inflation) noexcept {
  for (const auto& o : obstacles)
    if (segment_hits_obstacle(a, b, o, inflation)) return false;
  return true;
}

inline bool point_is_free(Point p, std::span<const Obstacle> obstacles, double inflation) noexcept {
  for (const auto& o : obstacles) {
    if (point_in_obstacle(p, o)) return false;
    const double d = dist_point_obstacle(p, o);
    if (d == 0.0 || d < inflation) return false;
  }
  return true;
}

/// Obstacle view with cached bounding boxes for repeated collision queries.
/// Does not own the obstacles; they must outlive the index.
class ObstacleIndex {
 public:
  explicit ObstacleIndex(std::span<const Obstacle> obstacles) : obstacles_(obstacles) {
    boxes_.reserve(obstacles.size());
    for (const auto& o : obstacles) boxes_.push_back(o.bounds());
  }

  bool segment_free(Point a, Point b, double inflation) const noexcept {
    Box seg;
    seg.expand(a);
    seg.expand(b);
    for (std::size_t k = 0; k < obstacles_.size(); ++k) {
      if (!seg.overlaps(boxes_[k], inflation)) continue;
      if (detail::segment_hits_polygon(a, b, obstacles_[k], inflation)) return false;
    }
    return true;
  }

  bool point_free(Point p, double inflation) const noexcept {
    for (std::size_t k = 0; k < obstacles_.size(); ++k) {
      if (boxes_[k].distance_to(p) > inflation) continue;
      const auto& o = obstacles_[k];
      if (point_in_obstacle(p, o)) return false;
      const double d = dist_point_obstacle(p, o);
      if (d == 0.0 || d < inflation) return false;
    }
    return true;
  }

  std::span<const Obstacle> obstacles() const noexcept { return obstacles_; }

 private:
  std::span<const Obstacle> obstacles_;
  std::vector<Box> boxes_;
};

}  // namespace pathforge

#endif  // PATHFORGE_GEOMETRY_HPP
