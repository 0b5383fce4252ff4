#ifndef PATHFORGE_DESCRIPTORS_HPP
#define PATHFORGE_DESCRIPTORS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/planner.hpp"

namespace pathforge {

/// The seven per-path metrics, in canonical record order.
enum class DescriptorId : int {
  min_clearance = 0,
  max_clearance,
  avg_clearance,
  path_length,
  smoothness,
  sharp_turns,
  max_angle,
};

inline constexpr std::size_t kDescriptorCount = 7;

inline constexpr std::array<DescriptorId, kDescriptorCount> kAllDescriptors = {
    DescriptorId::min_clearance, DescriptorId::max_clearance, DescriptorId::avg_clearance,
    DescriptorId::path_length,   DescriptorId::smoothness,    DescriptorId::sharp_turns,
    DescriptorId::max_angle};

/// Record field name.
constexpr std::string_view field_name(DescriptorId d) noexcept {
  constexpr std::array<std::string_view, kDescriptorCount> names = {
      "min_clearance", "max_clearance", "avg_clearance", "path_length",
      "smoothness",    "sharp_turns",   "max_angle"};
  return names[static_cast<std::size_t>(d)];
}

inline std::optional<DescriptorId> descriptor_from_field(std::string_view s) noexcept {
  for (auto d : kAllDescriptors)
    if (field_name(d) == s) return d;
  return std::nullopt;
}

inline DescriptorId parse_descriptor(std::string_view s) {
  if (auto d = descriptor_from_field(s)) return *d;
  throw Error(errc::kInvalidInput, "unknown descriptor '" + std::string(s) + "'");
}

struct DescriptorVector {
  double min_clearance = 0.0;
  double max_clearance = 0.0;
  double avg_clearance = 0.0;
  double path_length = 0.0;
  double smoothness = 0.0;
  unsigned sharp_turns = 0;
  double max_angle = 0.0;

  double get(DescriptorId d) const noexcept {
    switch (d) {
      case DescriptorId::min_clearance: return min_clearance;
      case DescriptorId::max_clearance: return max_clearance;
      case DescriptorId::avg_clearance: return avg_clearance;
      case DescriptorId::path_length: return path_length;
      case DescriptorId::smoothness: return smoothness;
      case DescriptorId::sharp_turns: return static_cast<double>(sharp_turns);
      case DescriptorId::max_angle: return max_angle;
    }
    return 0.0;
  }

  void set(DescriptorId d, double v) noexcept {
    switch (d) {
      case DescriptorId::min_clearance: min_clearance = v; break;
      case DescriptorId::max_clearance: max_clearance = v; break;
      case DescriptorId::avg_clearance: avg_clearance = v; break;
      case DescriptorId::path_length: path_length = v; break;
      case DescriptorId::smoothness: smoothness = v; break;
      case DescriptorId::sharp_turns: sharp_turns = static_cast<unsigned>(std::lround(v)); break;
      case DescriptorId::max_angle: max_angle = v; break;
    }
  }

  std::array<double, kDescriptorCount> as_array() const noexcept {
    std::array<double, kDescriptorCount> out{};
    for (auto d : kAllDescriptors) out[static_cast<std::size_t>(d)] = get(d);
    return out;
  }

  friend bool operator==(const DescriptorVector&, const DescriptorVector&) = default;
};

struct ClearanceStats {
  double min = 0.0;
  double max = 0.0;
  double avg = 0.0;
};

struct AngleStats {
  double smoothness = 0.0;
  unsigned sharp_turns = 0;
  double max_angle = 0.0;
};

struct DescriptorOptions {
  // > 0 inserts extra clearance samples along segments at this spacing.
  // Off by default: benchmark builds measure clearance at waypoints only.
  double densify_spacing = 0.0;
};

/// Points inserted every `spacing` along each segment (endpoints kept).
inline std::vector<Point> densify(std::span<const Point> pts, double spacing) {
  if (pts.empty() || !(spacing > 0.0)) return {pts.begin(), pts.end()};
  std::vector<Point> out{pts.front()};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Point a = pts[i - 1];
    const Point b = pts[i];
    const int k = std::max(1, static_cast<int>(std::ceil(distance(a, b) / spacing)));
    for (int s = 1; s <= k; ++s) out.push_back(a + (static_cast<double>(s) / k) * (b - a));
  }
  return out;
}

/// Nearest-obstacle distance statistics over the waypoints.
inline ClearanceStats clearance_stats(std::span<const Point> pts, std::span<const Obstacle> obstacles) {
  if (obstacles.empty())
    throw Error(errc::kClearanceUndefined, "clearance is undefined in an environment without obstacles");
  if (pts.empty()) throw Error(errc::kInvalidInput, "clearance needs at least one path point");
  ClearanceStats s{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double sum = 0.0;
  for (const Point p : pts) {
    const double c = clearance(p, obstacles);
    s.min = std::min(s.min, c);
    s.max = std::max(s.max, c);
    sum += c;
  }
  // Rounding in the sum can push the mean an ulp past the extremes.
  s.avg = std::clamp(sum / static_cast<double>(pts.size()), s.min, s.max);
  return s;
}

inline ClearanceStats clearance_stats(const Path& path, const Environment& env,
                                      const DescriptorOptions& opt = {}) {
  if (opt.densify_spacing > 0.0) {
    const auto dense = densify(path.points, opt.densify_spacing);
    return clearance_stats(dense, env.obstacles);
  }
  return clearance_stats(path.points, env.obstacles);
}

inline double path_length(std::span<const Point> pts) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
  return total;
}

inline double path_length(const Path& path) noexcept { return path_length(path.points); }

/// Drops consecutive exact duplicates.
inline std::vector<Point> collapse_duplicates(std::span<const Point> pts) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point p : pts)
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  return out;
}

/// Turn-angle statistics; a turn counts as sharp only above 90 degrees.
inline AngleStats angle_stats(std::span<const Point> raw) {
  const auto pts = collapse_duplicates(raw);
  AngleStats s;
  for (std::size_t j = 2; j < pts.size(); ++j) {
    const double theta = turn_angle(pts[j - 2], pts[j - 1], pts[j]);
    s.smoothness += theta;
    if (theta > 90.0) ++s.sharp_turns;
    s.max_angle = std::max(s.max_angle, theta);
  }
  return s;
}

inline AngleStats angle_stats(const Path& path) { return angle_stats(path.points); }

inline DescriptorVector compute(const Path& path, const Environment& env, const DescriptorOptions& opt = {}) {
  if (path.points.size() < 2) throw Error(errc::kInvalidInput, "a path needs at least two points");
  const auto c = clearance_stats(path, env, opt);
  const auto a = angle_stats(path);
  DescriptorVector d;
  d.min_clearance = c.min;
  d.max_clearance = c.max;
  d.avg_clearance = c.avg;
  d.path_length = path_length(path);
  d.smoothness = a.smoothness;
  d.sharp_turns = a.sharp_turns;
  d.max_angle = a.max_angle;
  return d;
}

}  // namespace pathforge

#endif  // PATHFORGE_DESCRIPTORS_HPP
