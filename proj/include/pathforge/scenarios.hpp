#ifndef PATHFORGE_SCENARIOS_HPP
#define PATHFORGE_SCENARIOS_HPP

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/error.hpp"

namespace pathforge {

enum class Direction { ignore, minimize, maximize };

inline std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::minimize: return "minimize";
    case Direction::maximize: return "maximize";
    case Direction::ignore: return "ignore";
  }
  return "ignore";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "minimize") return Direction::minimize;
  if (s == "maximize") return Direction::maximize;
  if (s == "ignore") return Direction::ignore;
  throw Error(errc::kInvalidInput, "unknown optimization direction '" + std::string(s) + "'");
}

struct Scenario {
  int id = 0;
  std::string text;
  std::array<Direction, kDescriptorCount> directions{};

  Direction direction(DescriptorId d) const noexcept { return directions[static_cast<std::size_t>(d)]; }
  bool requires_descriptor(DescriptorId d) const noexcept { return direction(d) != Direction::ignore; }

  std::vector<DescriptorId> required() const {
    std::vector<DescriptorId> out;
    for (auto d : kAllDescriptors)
      if (requires_descriptor(d)) out.push_back(d);
    return out;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Minimum absolute gap for a descriptor difference to count as visible.
struct SignificanceThresholds {
  double clearance = 0.8;
  double path_length = 50.0;
  double smoothness = 90.0;
  double sharp_turns = 1.0;
  double max_angle = 30.0;

  double of(DescriptorId d) const noexcept {
    switch (d) {
      case DescriptorId::min_clearance:
      case DescriptorId::max_clearance:
      case DescriptorId::avg_clearance: return clearance;
      case DescriptorId::path_length: return path_length;
      case DescriptorId::smoothness: return smoothness;
      case DescriptorId::sharp_turns: return sharp_turns;
      case DescriptorId::max_angle: return max_angle;
    }
    return 0.0;
  }

  friend bool operator==(const SignificanceThresholds&, const SignificanceThresholds&) = default;
};

enum class RejectReason { none, no_significant_descriptor, conflicting_directions };

inline std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::no_significant_descriptor: return "no_significant_descriptor";
    case RejectReason::conflicting_directions: return "conflicting_directions";
    case RejectReason::none: return "none";
  }
  return "none";
}

struct Label {
  enum class Kind { path1, path2, rejected };
  Kind kind = Kind::rejected;
  RejectReason reason = RejectReason::none;

  static constexpr Label path1() noexcept { return {Kind::path1, RejectReason::none}; }
  static constexpr Label path2() noexcept { return {Kind::path2, RejectReason::none}; }
  static constexpr Label rejected(RejectReason r) noexcept { return {Kind::rejected, r}; }

  bool accepted() const noexcept { return kind != Kind::rejected; }
  /// 1 or 2 for accepted labels.
  int side() const noexcept { return kind == Kind::path1 ? 1 : 2; }

  friend bool operator==(const Label&, const Label&) = default;
};

/// Required descriptors whose absolute difference strictly exceeds the threshold.
inline std::vector<DescriptorId> significant_descriptors(const DescriptorVector& d1, const DescriptorVector& d2,
                                                         const Scenario& s, const SignificanceThresholds& t) {
  std::vector<DescriptorId> out;
  for (auto m : kAllDescriptors) {
    if (!s.requires_descriptor(m)) continue;
    if (std::abs(d1.get(m) - d2.get(m)) > t.of(m)) out.push_back(m);
  }
  return out;
}

/// Ground truth for a pair: every significant required descriptor must favour
/// the same path, otherwise the pair is rejected for this scenario.
inline Label label(const DescriptorVector& d1, const DescriptorVector& d2, const Scenario& s,
                   const SignificanceThresholds& t) {
  const auto sig = significant_descriptors(d1, d2, s, t);
  if (sig.empty()) return Label::rejected(RejectReason::no_significant_descriptor);
  int favoured = 0;
  for (auto m : sig) {
    const bool first_smaller = d1.get(m) < d2.get(m);
    const bool first_wins = s.direction(m) == Direction::minimize ? first_smaller : !first_smaller;
    const int side = first_wins ? 1 : 2;
    if (favoured == 0) favoured = side;
    else if (favoured != side) return Label::rejected(RejectReason::conflicting_directions);
  }
  return favoured == 1 ? Label::path1() : Label::path2();
}

namespace detail {

constexpr Direction kLo = Direction::minimize;
constexpr Direction kHi = Direction::maximize;
constexpr Direction kNo = Direction::ignore;

// Columns follow DescriptorId: min, max, avg clearance, length, smoothness, sharp turns, max angle.
inline Scenario make_scenario(int id, std::string text, Direction min_c, Direction max_c, Direction avg_c,
                              Direction len, Direction smooth, Direction sharp, Direction angle) {
  return Scenario{id, std::move(text), {min_c, max_c, avg_c, len, smooth, sharp, angle}};
}

}  // namespace detail

inline constexpr int kScenarioCatalogVersion = 1;

/// The fifteen built-in decision-making scenarios.
inline const std::vector<Scenario>& scenario_catalog() {
  using namespace detail;
  static const std::vector<Scenario> catalog = {
      make_scenario(1,
                    "The agent navigating this maze is a large truck, so sharp turns (90 degrees or larger) are "
                    "harder to make. It should also stay on a straight line (unless it is making a turn) as it is "
                    "driving through heavy traffic.",
                    kNo, kNo, kNo, kNo, kLo, kLo, kLo),
      make_scenario(2,
                    "An autonomous firefighting robot is designed to navigate and operate within burning buildings "
                    "to extinguish fires and rescue trapped individuals. It should explore as much of the area as "
                    "possible, while maintaining a safe distance from the walls to avoid damage.",
                    kHi, kNo, kHi, kHi, kNo, kNo, kNo),
      make_scenario(3,
                    "As the vehicle is traversing a warzone, it must stay concealed from enemy operatives, making "
                    "use of covers like walls and avoiding open spaces as much as possible. It should also reach "
                    "its target (point 2) as quickly as possible.",
                    kNo, kLo, kLo, kLo, kNo, kNo, kNo),
      make_scenario(4,
                    "An autonomous drone delivering a package from point 1 to point 2 must take the shortest path "
                    "possible due to limited fuel. It should also maintain a safe distance from surrounding "
                    "buildings and make the path as straight as possible for stable flight.",
                    kHi, kNo, kHi, kLo, kLo, kLo, kLo),
      make_scenario(5,
                    "A robot has to deliver an aid package from point 1 to point 2 as quickly as possible. As the "
                    "vehicle is moving through an earthquake-affected area, it is crucial to keep a safe distance "
                    "from the walls at every moment to prevent damage from collapsing structures.",
                    kHi, kNo, kNo, kLo, kNo, kNo, kNo),
      make_scenario(6,
                    "A robot is moving through a museum where the walls contain fragile and expensive art pieces. "
                    "Therefore, the robot should make sure to never get too close or touch any of the walls. It "
                    "should also not take any abrupt turns to avoid startling the visitors.",
                    kHi, kNo, kNo, kNo, kLo, kLo, kNo),
      make_scenario(7,
                    "The agent navigating this construction site is a long articulated bus, making it difficult to "
                    "maneuver sharp turns (90 degrees or larger).",
                    kNo, kNo, kNo, kNo, kLo, kLo, kLo),
      make_scenario(8,
                    "The agent navigating this trail is a wide agricultural combine harvester, making it difficult "
                    "to see obstacles; hence it's hard to avoid them if they're too close.",
                    kHi, kNo, kHi, kNo, kNo, kNo, kNo),
      make_scenario(9,
                    "The agent navigating this busy warehouse is a long forklift, making it difficult to make sharp "
                    "and abrupt turns. It should also maintain a safe distance from the obstacles at all times.",
                    kHi, kNo, kNo, kNo, kLo, kLo, kLo),
      make_scenario(10,
                    "The agent navigating this complex construction site is a crane with a long boom, which makes "
                    "maneuvering sharp turns and around narrow passages very challenging.",
                    kNo, kNo, kNo, kNo, kLo, kLo, kLo),
      make_scenario(11,
                    "An autonomous taxi is navigating through an urban environment. As it is navigating heavy "
                    "traffic, it should make as few sharp turns as possible and keep a safe distance from its "
                    "surroundings. It should also ensure passenger comfort and safety by making left/right turns "
                    "as smooth as possible.",
                    kHi, kNo, kHi, kNo, kLo, kLo, kLo),
      make_scenario(12,
                    "A Mars rover is exploring a Martian terrain from point 1 to point 2. The rover should conserve "
                    "energy by taking the shortest path possible and avoiding unnecessary turns. Sharp turns (> 90 "
                    "degrees) require higher levels of fuel and put a strain on the navigation system.",
                    kNo, kNo, kNo, kLo, kLo, kLo, kNo),
      make_scenario(13,
                    "An autonomous vehicle is guiding a visually impaired individual through a shopping mall. It "
                    "should drive in a straight path and not make any sudden or sharp turns to ensure the "
                    "individual's safety and comfort. It should also maintain a safe distance from the surrounding "
                    "walls.",
                    kHi, kNo, kHi, kNo, kLo, kLo, kLo),
      make_scenario(14,
                    "An autonomous soil monitoring robot is tasked with navigating agricultural fields and "
                    "collecting detailed soil health data. It should cover as much of the area as possible and get "
                    "as close to the walls as possible to read the sensors that record the data needed.",
                    kNo, kLo, kLo, kHi, kNo, kNo, kNo),
      make_scenario(15,
                    "An autonomous inspection robot is tasked with navigating a nuclear power plant to inspect for "
                    "radiation leaks and structural integrity. The robot has to inspect as many sections of the "
                    "power plant as possible in one mission. It should get as close as possible to the walls to be "
                    "able to detect minor leaks or cracks. In order to avoid accidents, it should take the "
                    "straightest path possible and not make any sudden or sharp turns.",
                    kNo, kLo, kLo, kHi, kLo, kLo, kLo),
  };
  return catalog;
}

/// Catalog entry by id; throws when absent.
inline const Scenario& find_scenario(const std::vector<Scenario>& catalog, int id) {
  for (const auto& s : catalog)
    if (s.id == id) return s;
  throw Error(errc::kInvalidInput, "unknown scenario id " + std::to_string(id));
}

/// Catalog well-formedness: unique positive ids and at least one required descriptor each.
inline void check_catalog(const std::vector<Scenario>& catalog) {
  if (catalog.empty()) throw Error(errc::kInvalidInput, "scenario catalog is empty");
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& s = catalog[i];
    if (s.id <= 0) throw Error(errc::kInvalidInput, "scenario ids must be positive");
    if (s.required().empty())
      throw Error(errc::kInvalidInput, "scenario " + std::to_string(s.id) + " requires no descriptor");
    for (std::size_t j = 0; j < i; ++j)
      if (catalog[j].id == s.id) throw Error(errc::kInvalidInput, "duplicate scenario id " + std::to_string(s.id));
  }
}

}  // namespace pathforge

#endif  // PATHFORGE_SCENARIOS_HPP
