#ifndef PATHFORGE_PLANNER_HPP
#define PATHFORGE_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pathforge/envgen.hpp"
#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/parallel.hpp"
#include "pathforge/rng.hpp"

namespace pathforge {

/// Waypoint sequence from env.start to env.goal.
struct Path {
  std::string id;
  std::string env_id;
  std::uint64_t planner_seed = 0;
  std::int64_t run_index = -1;
  std::vector<Point> points;

  friend bool operator==(const Path&, const Path&) = default;
};

struct PlannerConfig {
  double step_size = 2.0;
  unsigned max_iterations = 20000;
  double goal_tolerance = 0.0;
  double inflation = 0.25;
  std::uint64_t seed = 0;
};

struct PlanFailure {
  enum class Reason { iterations_exhausted };
  Reason reason = Reason::iterations_exhausted;
  unsigned iterations = 0;
};

using PlanResult = std::variant<Path, PlanFailure>;

/// Extension point for alternative sampling-based planners.
class PathPlanner {
 public:
  virtual ~PathPlanner() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual PlanResult plan(const Environment& env, const PlannerConfig& cfg) const = 0;
};

namespace detail {

/// Uniform-grid bucket index for nearest-neighbour queries over a growing
/// point set. Ties resolve to the lowest insertion index.
class NearestIndex {
 public:
  NearestIndex(double width, double height, double cell)
      : cell_(cell),
        nx_(std::max(1, static_cast<int>(std::ceil(width / cell)))),
        ny_(std::max(1, static_cast<int>(std::ceil(height / cell)))),
        buckets_(static_cast<std::size_t>(nx_) * ny_) {}

  void insert(Point p, std::size_t id) { buckets_[bucket(p)].push_back({p, id}); }

  std::size_t nearest(Point q) const noexcept {
    const auto [ci, cj] = cell_of(q);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_id = std::numeric_limits<std::size_t>::max();
    const int max_ring = std::max(nx_, ny_);
    for (int r = 0; r <= max_ring; ++r) {
      for (int j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        const bool edge_row = (j == cj - r || j == cj + r);
        for (int i = ci - r; i <= ci + r; i += (edge_row ? 1 : 2 * r)) {
          if (i >= 0 && i < nx_) {
            for (const auto& e : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
              const double d = distance(q, e.p);
              if (d < best || (d == best && e.id < best_id)) {
                best = d;
                best_id = e.id;
              }
            }
          }
          if (r == 0) break;
        }
      }
      // Everything beyond ring r is at least r * cell away.
      if (best_id != std::numeric_limits<std::size_t>::max() && best < r * cell_) break;
    }
    return best_id;
  }

 private:
  struct Entry {
    Point p;
    std::size_t id;
  };

  std::pair<int, int> cell_of(Point p) const noexcept {
    return {std::clamp(static_cast<int>(std::floor(p.x / cell_)), 0, nx_ - 1),
            std::clamp(static_cast<int>(std::floor(p.y / cell_)), 0, ny_ - 1)};
  }
  std::size_t bucket(Point p) const noexcept {
    const auto [i, j] = cell_of(p);
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  double cell_;
  int nx_;
  int ny_;
  std::vector<std::vector<Entry>> buckets_;
};

struct Tree {
  std::vector<Point> nodes;
  std::vector<std::size_t> parent;
  NearestIndex index;

  Tree(Point root, double width, double height, double cell) : index(width, height, cell) { add(root, 0); }

  std::size_t add(Point p, std::size_t par) {
    nodes.push_back(p);
    parent.push_back(par);
    index.insert(p, nodes.size() - 1);
    return nodes.size() - 1;
  }

  // Root-to-node chain.
  std::vector<Point> branch(std::size_t node) const {
    std::vector<Point> out;
    for (std::size_t n = node;; n = parent[n]) {
      out.push_back(nodes[n]);
      if (n == 0) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

enum class Extend { trapped, advanced, reached };

}  // namespace detail

/// Bidirectional RRT (RRT-Connect): grow one tree toward a uniform free
/// sample, then greedily connect the other tree to the new node; swap roles
/// each iteration. The raw tree path is returned without smoothing.
class RrtConnect final : public PathPlanner {
 public:
  std::string_view name() const noexcept override { return "rrt_connect"; }

  PlanResult plan(const Environment& env, const PlannerConfig& cfg) const override {
    if (auto v = validate(env); !v.empty())
      throw Error(errc::kInvalidEnvironment, "cannot plan in invalid environment: " + v.front());
    if (!(cfg.step_size > 0.0) || !(cfg.step_size < std::min(env.width, env.height)))
      throw Error(errc::kInvalidInput, "step_size must lie in (0, min(width, height))");
    if (!(cfg.inflation >= 0.0) || !std::isfinite(cfg.inflation) || !(cfg.goal_tolerance >= 0.0))
      throw Error(errc::kInvalidInput, "inflation and goal_tolerance must be non-negative");
    if (env.start == env.goal) throw Error(errc::kInvalidInput, "start and goal coincide");

    const ObstacleIndex world(env.obstacles);
    const double infl = cfg.inflation;
    auto make_path = [&](std::vector<Point> pts) {
      Path p;
      p.env_id = env.id;
      p.planner_seed = cfg.seed;
      for (const Point& q : pts)
        if (p.points.empty() || !(p.points.back() == q)) p.points.push_back(q);
      return p;
    };

    if (distance(env.start, env.goal) <= cfg.step_size && world.segment_free(env.start, env.goal, infl))
      return make_path({env.start, env.goal});

    Rng rng(cfg.seed, "planner:rrt_connect");
    auto sample = [&] {
      Point p{};
      for (int t = 0; t < 1000; ++t) {
        p = {rng.uniform(0.0, env.width), rng.uniform(0.0, env.height)};
        if (world.point_free(p, infl)) break;
      }
      return p;
    };

    detail::Tree from_start(env.start, env.width, env.height, cfg.step_size);
    detail::Tree from_goal(env.goal, env.width, env.height, cfg.step_size);

    // Returns the status and the index of the node nearest the target after the step.
    auto extend = [&](detail::Tree& t, Point target) -> std::pair<detail::Extend, std::size_t> {
      const std::size_t near = t.index.nearest(target);
      const Point from = t.nodes[near];
      const double d = distance(from, target);
      if (d == 0.0) return {detail::Extend::reached, near};
      const bool reach = d <= cfg.step_size;
      const Point to = reach ? target : from + (cfg.step_size / d) * (target - from);
      if (!world.segment_free(from, to, infl)) return {detail::Extend::trapped, near};
      const std::size_t id = t.add(to, near);
      return {reach ? detail::Extend::reached : detail::Extend::advanced, id};
    };

    detail::Tree* active = &from_start;
    detail::Tree* other = &from_goal;
    for (unsigned it = 0; it < cfg.max_iterations; ++it) {
      const Point q = sample();
      const auto [status, node] = extend(*active, q);
      if (status != detail::Extend::trapped) {
        const Point q_new = active->nodes[node];
        std::pair<detail::Extend, std::size_t> c{detail::Extend::advanced, 0};
        while (c.first == detail::Extend::advanced) c = extend(*other, q_new);
        std::optional<std::size_t> meet_other;
        if (c.first == detail::Extend::reached) {
          meet_other = c.second;
        } else if (cfg.goal_tolerance > 0.0) {
          const std::size_t n = other->index.nearest(q_new);
          if (distance(other->nodes[n], q_new) <= cfg.goal_tolerance &&
              world.segment_free(other->nodes[n], q_new, infl))
            meet_other = n;
        }
        if (meet_other) {
          const bool active_is_start = active == &from_start;
          const std::size_t s_node = active_is_start ? node : *meet_other;
          const std::size_t g_node = active_is_start ? *meet_other : node;
          auto pts = from_start.branch(s_node);
          auto tail = from_goal.branch(g_node);
          pts.insert(pts.end(), tail.rbegin(), tail.rend());
          return make_path(std::move(pts));
        }
      }
      std::swap(active, other);
    }
    return PlanFailure{PlanFailure::Reason::iterations_exhausted, cfg.max_iterations};
  }
};

inline PlanResult plan(const Environment& env, const PlannerConfig& cfg) { return RrtConnect{}.plan(env, cfg); }

inline std::string path_id(const std::string& env_id, std::uint64_t run) {
  return env_id + "-r" + std::to_string(run);
}

/// `runs` independent plans with seeds derive_seed(cfg.seed, i); failures are
/// dropped and successes keep run order.
inline std::vector<Path> sample_paths(const Environment& env, const PlannerConfig& cfg, unsigned runs,
                                      unsigned jobs = 1, const PathPlanner& planner = RrtConnect{}) {
  if (runs == 0) throw Error(errc::kInvalidInput, "runs must be at least 1");
  std::vector<std::optional<Path>> slots(runs);
  parallel_for(runs, jobs, [&](std::size_t i) {
    PlannerConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, i);
    auto r = planner.plan(env, run_cfg);
    if (auto* p = std::get_if<Path>(&r)) {
      p->run_index = static_cast<std::int64_t>(i);
      p->id = path_id(env.id, i);
      slots[i] = std::move(*p);
    }
  });
  std::vector<Path> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

}  // namespace pathforge

#endif  // PATHFORGE_PLANNER_HPP
