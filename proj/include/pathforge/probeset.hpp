#ifndef PATHFORGE_PROBESET_HPP
#define PATHFORGE_PROBESET_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/planner.hpp"
#include "pathforge/rng.hpp"

namespace pathforge {

inline constexpr std::size_t kProbeTiers = 3;

struct ProbeSpec {
  DescriptorId descriptor = DescriptorId::smoothness;
  std::array<double, kProbeTiers> thresholds{};
  unsigned pairs_per_threshold = 50;
};

/// Default tier gaps per descriptor.
inline ProbeSpec default_probe_spec(DescriptorId d) {
  ProbeSpec s;
  s.descriptor = d;
  switch (d) {
    case DescriptorId::min_clearance:
    case DescriptorId::max_clearance: s.thresholds = {1.0, 2.0, 3.0}; break;
    case DescriptorId::avg_clearance: s.thresholds = {1.0, 2.5, 5.0}; break;
    case DescriptorId::path_length: s.thresholds = {50.0, 75.0, 100.0}; break;
    case DescriptorId::smoothness: s.thresholds = {100.0, 200.0, 300.0}; break;
    case DescriptorId::sharp_turns: s.thresholds = {1.0, 2.0, 3.0}; break;
    case DescriptorId::max_angle: s.thresholds = {30.0, 60.0, 90.0}; break;
  }
  return s;
}

inline void check_probe_spec(const ProbeSpec& s) {
  if (!(s.thresholds[0] > 0.0)) throw Error(errc::kInvalidInput, "probe thresholds must be positive");
  for (std::size_t k = 1; k < kProbeTiers; ++k)
    if (!(s.thresholds[k] > s.thresholds[k - 1]))
      throw Error(errc::kInvalidInput, "probe thresholds must be strictly increasing");
}

struct PoolEntry {
  Path path;
  DescriptorVector descriptors;
};

struct ProbePair {
  std::size_t first = 0;   // pool index shown as Path 1
  std::size_t second = 0;  // pool index shown as Path 2
  double gap = 0.0;        // |m(first) - m(second)|
  int smaller = 0;         // 1 or 2: side with the lower descriptor value
};

struct ProbeSet {
  ProbeSpec spec;
  std::array<std::vector<ProbePair>, kProbeTiers> tiers;
};

/// For each tier, a seeded sample without replacement of same-environment
/// pairs whose gap strictly exceeds the tier threshold. Tiers draw
/// independently, so one pair can appear in several tiers.
inline ProbeSet generate_probe_pairs(const std::vector<PoolEntry>& pool, const ProbeSpec& spec,
                                     std::uint64_t seed) {
  check_probe_spec(spec);
  const DescriptorId m = spec.descriptor;
  struct Candidate {
    std::size_t i, j;
    double gap;
  };
  std::vector<Candidate> all;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i].path.env_id != pool[j].path.env_id) continue;
      const double g = std::abs(pool[i].descriptors.get(m) - pool[j].descriptors.get(m));
      if (g > spec.thresholds[0]) all.push_back({i, j, g});
    }

  std::array<std::vector<Candidate>, kProbeTiers> eligible;
  for (const auto& c : all)
    for (std::size_t k = 0; k < kProbeTiers; ++k)
      if (c.gap > spec.thresholds[k]) eligible[k].push_back(c);

  bool short_fall = false;
  for (const auto& e : eligible) short_fall = short_fall || e.size() < spec.pairs_per_threshold;
  if (short_fall) {
    std::string msg = "probe quota of " + std::to_string(spec.pairs_per_threshold) + " pairs per tier for " +
                      std::string(field_name(m)) + " unreachable; eligible pairs per tier:";
    for (std::size_t k = 0; k < kProbeTiers; ++k) msg += " " + std::to_string(eligible[k].size());
    throw Error(errc::kQuotaUnreachable, msg);
  }

  ProbeSet out;
  out.spec = spec;
  for (std::size_t k = 0; k < kProbeTiers; ++k) {
    auto& e = eligible[k];
    Rng rng(seed, "probe:" + std::string(field_name(m)) + ":tier" + std::to_string(k + 1));
    for (std::size_t t = 0; t < spec.pairs_per_threshold; ++t) {
      const std::size_t r = t + static_cast<std::size_t>(rng.below(e.size() - t));
      std::swap(e[t], e[r]);
      const Candidate c = e[t];
      ProbePair p;
      const bool flip = rng.coin();
      p.first = flip ? c.j : c.i;
      p.second = flip ? c.i : c.j;
      p.gap = c.gap;
      p.smaller = pool[p.first].descriptors.get(m) < pool[p.second].descriptors.get(m) ? 1 : 2;
      out.tiers[k].push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Segment-complexity cases around a single central obstacle.

enum class SegmentKind { point, line, curve };

inline std::string_view to_string(SegmentKind k) noexcept {
  switch (k) {
    case SegmentKind::point: return "point";
    case SegmentKind::line: return "line";
    case SegmentKind::curve: return "curve";
  }
  return "point";
}

inline SegmentKind parse_segment_kind(std::string_view s) {
  if (s == "point") return SegmentKind::point;
  if (s == "line") return SegmentKind::line;
  if (s == "curve") return SegmentKind::curve;
  throw Error(errc::kInvalidInput, "unknown segment kind '" + std::string(s) + "' (expected point, line or curve)");
}

struct SegmentField {
  double width = 50.0;
  double height = 50.0;
  double obstacle_size = 10.0;  // side of the centred square
  unsigned curve_steps = 64;

  Obstacle obstacle() const {
    const double cx = width / 2, cy = height / 2, h = obstacle_size / 2;
    return Obstacle{{{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}}};
  }

  Environment environment() const {
    Environment e;
    e.id = "segment-field";
    e.width = width;
    e.height = height;
    e.obstacles = {obstacle()};
    e.start = {0.0, 0.0};
    e.goal = {width, height};
    e.family = Family::random;
    return e;
  }
};

struct SegmentCase {
  SegmentKind kind = SegmentKind::point;
  std::vector<Point> control;  // 1, 2 or 3 points
  double clearance = 0.0;

  friend bool operator==(const SegmentCase&, const SegmentCase&) = default;
};

inline Point quadratic_point(Point a, Point c, Point b, double t) noexcept {
  const double u = 1.0 - t;
  return (u * u) * a + (2.0 * u * t) * c + (t * t) * b;
}

/// The drawn geometry: the point itself, the segment, or the curve at `steps` intervals.
inline std::vector<Point> segment_polyline(const SegmentCase& s, unsigned steps = 64) {
  if (s.kind != SegmentKind::curve) return s.control;
  std::vector<Point> out;
  out.reserve(steps + 1);
  for (unsigned i = 0; i <= steps; ++i)
    out.push_back(quadratic_point(s.control[0], s.control[1], s.control[2], static_cast<double>(i) / steps));
  return out;
}

/// Point clearance, or the smaller endpoint clearance for lines and curves.
inline double segment_clearance(const SegmentCase& s, const Obstacle& o) {
  if (s.kind == SegmentKind::point) return dist_point_obstacle(s.control.front(), o);
  return std::min(dist_point_obstacle(s.control.front(), o), dist_point_obstacle(s.control.back(), o));
}

inline bool segment_case_free(const SegmentCase& s, const Obstacle& o, unsigned steps) {
  const auto pts = segment_polyline(s, steps);
  const std::vector<Obstacle> one{o};
  if (pts.size() == 1) return point_is_free(pts.front(), one, 0.0) && dist_point_obstacle(pts.front(), o) > 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (segment_hits_obstacle(pts[i - 1], pts[i], o, 0.0)) return false;
  return true;
}

inline std::vector<SegmentCase> generate_segment_cases(SegmentKind kind, unsigned count, std::uint64_t seed,
                                                       const SegmentField& field = {}) {
  const Obstacle o = field.obstacle();
  Rng rng(seed, "segments:" + std::string(to_string(kind)));
  const std::size_t arity = kind == SegmentKind::point ? 1 : kind == SegmentKind::line ? 2 : 3;
  std::vector<SegmentCase> out;
  out.reserve(count);
  const std::uint64_t budget = 1000ULL * std::max(1u, count);
  for (std::uint64_t tries = 0; out.size() < count; ++tries) {
    if (tries >= budget)
      throw Error(errc::kGenerationFailed, "could not place " + std::to_string(count) + " collision-free " +
                                               std::string(to_string(kind)) + " cases");
    SegmentCase s;
    s.kind = kind;
    for (std::size_t k = 0; k < arity; ++k)
      s.control.push_back({rng.uniform(0.0, field.width), rng.uniform(0.0, field.height)});
    if (!segment_case_free(s, o, field.curve_steps)) continue;
    s.clearance = segment_clearance(s, o);
    out.push_back(std::move(s));
  }
  return out;
}

struct SegmentPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double gap = 0.0;
  int closer = 0;  // 1 or 2
};

/// In index order, pairs each unpaired case with the unpaired case farthest
/// from it in clearance (lowest index on ties). Zero-gap pairs are consumed
/// but not emitted.
inline std::vector<SegmentPair> pair_segments(const std::vector<SegmentCase>& cases) {
  if (cases.size() < 2 || cases.size() % 2 != 0)
    throw Error(errc::kInvalidInput, "pair_segments needs an even number of cases, at least two");
  std::vector<bool> used(cases.size(), false);
  std::vector<SegmentPair> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (used[i]) continue;
    std::size_t best = cases.size();
    double best_gap = -1.0;
    for (std::size_t j = i + 1; j < cases.size(); ++j) {
      if (used[j]) continue;
      const double g = std::abs(cases[i].clearance - cases[j].clearance);
      if (g > best_gap) {
        best_gap = g;
        best = j;
      }
    }
    used[i] = used[best] = true;
    if (best_gap == 0.0) continue;
    out.push_back({i, best, best_gap, cases[i].clearance < cases[best].clearance ? 1 : 2});
  }
  return out;
}

}  // namespace pathforge

#endif  // PATHFORGE_PROBESET_HPP
