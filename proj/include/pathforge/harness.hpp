#ifndef PATHFORGE_HARNESS_HPP
#define PATHFORGE_HARNESS_HPP

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/error.hpp"
#include "pathforge/format.hpp"
#include "pathforge/pairing.hpp"
#include "pathforge/rng.hpp"
#include "pathforge/scenarios.hpp"

namespace pathforge {

enum class PromptMode { image_only, image_with_descriptors, descriptors_only, attribute_abstraction, fine_grained };

inline std::string_view to_string(PromptMode m) noexcept {
  switch (m) {
    case PromptMode::image_only: return "image_only";
    case PromptMode::image_with_descriptors: return "image_with_descriptors";
    case PromptMode::descriptors_only: return "descriptors_only";
    case PromptMode::attribute_abstraction: return "attribute_abstraction";
    case PromptMode::fine_grained: return "fine_grained";
  }
  return "image_only";
}

inline PromptMode parse_prompt_mode(std::string_view s) {
  for (auto m : {PromptMode::image_only, PromptMode::image_with_descriptors, PromptMode::descriptors_only,
                 PromptMode::attribute_abstraction, PromptMode::fine_grained})
    if (to_string(m) == s) return m;
  throw Error(errc::kInvalidInput, "unknown prompt mode '" + std::string(s) + "'");
}

struct PresentationVariant {
  enum class Kind { default_order, flipped, random_ids };
  Kind kind = Kind::default_order;
  std::uint64_t seed = 0;  // random_ids only
  unsigned id_length = 4;

  static PresentationVariant default_order() { return {}; }
  static PresentationVariant flipped() { return {Kind::flipped, 0, 4}; }
  static PresentationVariant random_ids(std::uint64_t seed, unsigned length = 4) {
    return {Kind::random_ids, seed, length};
  }
};

inline std::string_view to_string(PresentationVariant::Kind k) noexcept {
  switch (k) {
    case PresentationVariant::Kind::default_order: return "default";
    case PresentationVariant::Kind::flipped: return "flipped";
    case PresentationVariant::Kind::random_ids: return "random_ids";
  }
  return "default";
}

inline PresentationVariant parse_variant(std::string_view s, std::uint64_t seed = 0) {
  if (s == "default") return PresentationVariant::default_order();
  if (s == "flipped") return PresentationVariant::flipped();
  if (s == "random_ids") return PresentationVariant::random_ids(seed);
  throw Error(errc::kInvalidInput, "unknown presentation variant '" + std::string(s) +
                                       "' (expected default, flipped or random_ids)");
}

/// How one instance is shown: which stored path appears first and what the
/// two presented paths are called.
struct Presentation {
  bool swapped = false;             // true: stored path_2 is shown first
  std::array<std::string, 2> tags;  // "1"/"2" or random ids, in presented order

  std::string name(int side) const { return "Path " + tags[static_cast<std::size_t>(side - 1)]; }
};

namespace detail {

inline constexpr std::string_view kIdAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Two ids drawn from [A-Za-z0-9], distinct even when case is ignored.
inline std::array<std::string, 2> random_path_ids(const std::string& instance_id, std::uint64_t seed,
                                                  unsigned length = 4) {
  if (length == 0) throw Error(errc::kInvalidInput, "random id length must be positive");
  Rng rng(seed, "ids:" + instance_id);
  auto draw = [&] {
    std::string s;
    for (unsigned i = 0; i < length; ++i) s += detail::kIdAlphabet[rng.below(detail::kIdAlphabet.size())];
    return s;
  };
  std::array<std::string, 2> ids{draw(), draw()};
  while (detail::lower(ids[0]) == detail::lower(ids[1])) ids[1] = draw();
  return ids;
}

inline Presentation present(const BenchmarkInstance& inst, const PresentationVariant& v) {
  Presentation p;
  p.tags = {"1", "2"};
  switch (v.kind) {
    case PresentationVariant::Kind::default_order: break;
    case PresentationVariant::Kind::flipped: p.swapped = true; break;
    case PresentationVariant::Kind::random_ids: p.tags = random_path_ids(inst.instance_id, v.seed, v.id_length); break;
  }
  return p;
}

/// Presented side (1 = first/left) that holds the correct answer.
inline int expected_side(const BenchmarkInstance& inst, const Presentation& p) noexcept {
  return p.swapped ? 3 - inst.ground_truth : inst.ground_truth;
}

inline std::string render_ref(const std::string& instance_id, int stored_side) {
  return "renders/" + instance_id + "_p" + std::to_string(stored_side) + ".svg";
}

struct Prompt {
  std::string instance_id;
  PromptMode mode = PromptMode::image_only;
  std::string text;
  std::vector<std::string> images;  // presented order
  std::array<std::string, 2> names;
  int expected = 0;
};

namespace detail {

inline std::string answer_block(const Presentation& p) {
  return "Your answer should follow the format below:\nAnswer: " + p.name(1) + " or " + p.name(2) +
         ".\nExplanation: Why you chose the path (" + p.tags[0] + " or " + p.tags[1] + ").";
}

inline std::string side_sentence(const Presentation& p) {
  return p.name(1) + " is on the left side and " + p.name(2) + " is on the right side.";
}

inline std::string descriptor_values(const std::string& name, const DescriptorVector& d) {
  return "Here are path descriptor values for " + name + ":\nMinimum clearance: " + repr_double(d.min_clearance) +
         ", Maximum clearance: " + repr_double(d.max_clearance) + ", Average clearance: " +
         repr_double(d.avg_clearance) + ",\nPath length: " + repr_double(d.path_length) +
         ", Smoothness: " + repr_double(d.smoothness) + ", Sharp turns: " + std::to_string(d.sharp_turns) +
         ", Maximum angle: " + repr_double(d.max_angle) + ".";
}

inline const char* kDescriptorGlossary =
    "Minimum Clearance: The minimum distance from the obstacles.\n"
    "Maximum Clearance: The maximum distance from the obstacles.\n"
    "Smoothness: The sum of absolute angles between path segments. Smoother paths have a lower smoothness value.\n"
    "Number of sharp turns: Number of turns that are > 90 degrees.\n"
    "Maximum turn angle: The sharpest turn angle in the path.\n"
    "Path length: The sum of Euclidean distances between points in the path.";

struct FineGrainedText {
  std::string definition;
  std::string quantity;  // as used in "a numerically smaller value for ..."
  std::string meaning;
};

inline FineGrainedText fine_grained_text(const std::string& target) {
  if (target == kSegmentProbeTarget)
    return {"The distance of a path from the obstacle is defined as the distance between the obstacle and the "
            "closest endpoint of the path. For a single point, it is the distance between that point and the "
            "obstacle.",
            "the distance from the obstacle",
            "A smaller value means that the path is closer to the obstacle."};
  switch (parse_descriptor(target)) {
    case DescriptorId::smoothness:
      return {"Smoothness is defined as a measure of how gradual the agent's path is, minimizing sharp or abrupt "
              "changes in direction. It is calculated as the sum of angles between consecutive points (segments).",
              "smoothness",
              "A smaller smoothness value means that the path has fewer abrupt turns and is smoother overall."};
    case DescriptorId::min_clearance:
      return {"Minimum clearance is defined as the smallest distance between the agent's path and the obstacles. "
              "It is calculated as the minimum, over all points of the path, of the distance to the nearest "
              "obstacle.",
              "minimum clearance",
              "A smaller minimum clearance value means that the path gets closer to the obstacles at its closest "
              "point."};
    case DescriptorId::max_clearance:
      return {"Maximum clearance is defined as the largest distance between the agent's path and the obstacles. "
              "It is calculated as the maximum, over all points of the path, of the distance to the nearest "
              "obstacle.",
              "maximum clearance",
              "A smaller maximum clearance value means that the path never strays far from the obstacles."};
    case DescriptorId::avg_clearance:
      return {"Average clearance is defined as the typical distance between the agent's path and the obstacles. "
              "It is calculated as the mean, over all points of the path, of the distance to the nearest obstacle.",
              "average clearance",
              "A smaller average clearance value means that the path stays closer to the obstacles overall."};
    case DescriptorId::path_length:
      return {"Path length is defined as the total distance the agent travels. It is calculated as the sum of "
              "Euclidean distances between consecutive points in the path.",
              "path length", "A smaller path length value means that the path is shorter overall."};
    case DescriptorId::sharp_turns:
      return {"The number of sharp turns is defined as the count of turns in the agent's path that are larger "
              "than 90 degrees. It is calculated by counting the angles between consecutive segments that exceed "
              "90 degrees.",
              "the number of sharp turns",
              "A smaller number of sharp turns means that the path has fewer abrupt changes in direction."};
    case DescriptorId::max_angle:
      return {"Maximum angle is defined as the sharpest turn the agent makes along its path. It is calculated as "
              "the largest angle between consecutive segments (points).",
              "maximum angle", "A smaller maximum angle value means that the sharpest turn of the path is gentler."};
  }
  return {};
}

}  // namespace detail

/// Attribute-abstraction prompt for one scenario; no path pair involved.
inline std::string build_abstraction_prompt(const Scenario& s) {
  return s.text +
         "\n\nThe following descriptors are available:\n"
         "1. Minimum Clearance: The minimum distance from the obstacles.\n"
         "2. Maximum Clearance: The maximum distance from the obstacles.\n"
         "3. Average Clearance: The average distance from the obstacles.\n"
         "4. Smoothness: The sum of absolute angles between path segments. Smoother paths have a lower smoothness "
         "value.\n"
         "5. Number of Sharp Turns: The number of turns that are >90 degrees.\n"
         "6. Maximum Turn Angle: The sharpest turn angle in the path.\n"
         "7. Path Length: The sum of Euclidean distances between points in the path.\n"
         "\nWhich ones are the most important for the specified scenario?\n"
         "Your answer should follow this format:\n"
         "\nAnswer: list of required descriptors separated by a semicolon (;).\n"
         "Explanation: Why these descriptors are important.";
}

inline Prompt build_prompt(const BenchmarkInstance& inst, PromptMode mode, const PresentationVariant& variant,
                           const std::vector<Scenario>& catalog) {
  if (mode == PromptMode::attribute_abstraction)
    throw Error(errc::kIncompatibleMode, "attribute_abstraction prompts take a scenario, not a path pair");
  if (mode == PromptMode::fine_grained && !inst.probe)
    throw Error(errc::kIncompatibleMode, "fine_grained mode needs a probe instance; " + inst.instance_id + " is not");
  if (mode != PromptMode::fine_grained && inst.probe)
    throw Error(errc::kIncompatibleMode, "probe instance " + inst.instance_id + " supports only fine_grained mode");
  if (inst.ground_truth != 1 && inst.ground_truth != 2)
    throw Error(errc::kInvalidInput, "instance " + inst.instance_id + " has no decided ground truth");

  const Presentation p = present(inst, variant);
  Prompt out;
  out.instance_id = inst.instance_id;
  out.mode = mode;
  out.names = {p.name(1), p.name(2)};
  out.expected = expected_side(inst, p);
  const DescriptorVector& first = p.swapped ? inst.descriptors_2 : inst.descriptors_1;
  const DescriptorVector& second = p.swapped ? inst.descriptors_1 : inst.descriptors_2;
  if (mode != PromptMode::descriptors_only) {
    out.images = {render_ref(inst.instance_id, p.swapped ? 2 : 1), render_ref(inst.instance_id, p.swapped ? 1 : 2)};
  }

  if (mode == PromptMode::fine_grained) {
    const auto t = detail::fine_grained_text(inst.probe->target);
    out.text = t.definition + "\n\nThe task is to determine which path results in a numerically smaller value for " +
               t.quantity + ". " + t.meaning + "\n\n" + detail::side_sentence(p) +
               "\n\nYour answer should follow this format:\n- Answer: " + p.name(1) + " or " + p.name(2) +
               ".\n- Explanation: Briefly explain why you chose the path (e.g., \"" + p.name(1) +
               " has a smaller value for the given metric\").";
    return out;
  }

  const Scenario& s = find_scenario(catalog, inst.scenario_id);
  std::string text = s.text + " Which path better achieves the task?";
  if (mode != PromptMode::descriptors_only) text += " " + detail::side_sentence(p);
  if (mode == PromptMode::image_only) {
    text += " " + detail::answer_block(p);
  } else {
    text += " The following path descriptor values are computed for each path:\n\n";
    text += detail::kDescriptorGlossary;
    text += "\n\n" + detail::descriptor_values(p.name(1), first);
    text += "\n\n" + detail::descriptor_values(p.name(2), second);
    text += "\n\n" + detail::answer_block(p);
  }
  out.text = std::move(text);
  return out;
}

// ---------------------------------------------------------------------------
// Answer parsing

namespace detail {

inline bool word_char(char c) noexcept { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

inline bool boundary_before(const std::string& s, std::size_t i) noexcept { return i == 0 || !word_char(s[i - 1]); }
inline bool boundary_after(const std::string& s, std::size_t i) noexcept { return i >= s.size() || !word_char(s[i]); }

// Length of a path-name match for `tag` at position i, or 0.
inline std::size_t match_name(const std::string& s, std::size_t i, const std::string& tag, bool allow_bare) {
  if (s.compare(i, 4, "path") == 0 && boundary_before(s, i)) {
    std::size_t j = i + 4;
    while (j < s.size() && (s[j] == ' ' || s[j] == '*' || s[j] == '_' || s[j] == '#')) ++j;
    if (s.compare(j, tag.size(), tag) == 0 && boundary_after(s, j + tag.size())) return j + tag.size() - i;
  }
  if (allow_bare && boundary_before(s, i) && s.compare(i, tag.size(), tag) == 0 &&
      boundary_after(s, i + tag.size()))
    return tag.size();
  return 0;
}

inline std::string_view trim_markup(std::string_view line) {
  std::size_t b = 0;
  while (b < line.size() && (line[b] == ' ' || line[b] == '\t' || line[b] == '*' || line[b] == '#' ||
                             line[b] == '-' || line[b] == '>' || line[b] == '_' || line[b] == '`'))
    ++b;
  return line.substr(b);
}

inline std::vector<std::string_view> split_lines(std::string_view raw) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw.size(); ++i) {
    if (i == raw.size() || raw[i] == '\n') {
      std::string_view l = raw.substr(start, i - start);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      out.push_back(l);
      start = i + 1;
    }
  }
  return out;
}

inline bool has_word_char(std::string_view s) {
  for (char c : s)
    if (word_char(c)) return true;
  return false;
}

}  // namespace detail

/// The answer text after the first line that starts with "Answer"; when that
/// line carries nothing else, the next non-empty line.
inline std::optional<std::string> answer_text(std::string_view raw) {
  const auto lines = detail::split_lines(raw);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto body = detail::trim_markup(lines[k]);
    if (body.size() < 6 || detail::lower(body.substr(0, 6)) != "answer") continue;
    std::string rest(body.substr(6));
    if (!detail::has_word_char(rest)) {
      for (std::size_t n = k + 1; n < lines.size(); ++n)
        if (detail::has_word_char(lines[n])) return std::string(lines[n]);
      return std::nullopt;
    }
    return rest;
  }
  return std::nullopt;
}

/// Presented side named by the response, or nullopt when unparsed.
inline std::optional<int> parse_answer(std::string_view raw, const Presentation& p) {
  const auto text = answer_text(raw);
  if (!text) return std::nullopt;
  const std::string s = detail::lower(*text);
  const bool bare = p.tags[0] != "1";
  const std::array<std::string, 2> tags{detail::lower(p.tags[0]), detail::lower(p.tags[1])};
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int side = 1; side <= 2; ++side)
      if (detail::match_name(s, i, tags[static_cast<std::size_t>(side - 1)], bare) > 0) return side;
  return std::nullopt;
}

/// A well-formed response choosing `side` under presentation p.
inline std::string format_answer(int side, const Presentation& p) {
  return "Answer: " + p.name(side) + ".\nExplanation: " + p.name(side) + " better satisfies the scenario.";
}

// ---------------------------------------------------------------------------
// Scoring

struct Prediction {
  std::string instance_id;
  std::string raw_response;
  std::string error;  // non-empty when the answer could not be obtained

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct GroupStats {
  std::size_t total = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;

  double accuracy() const noexcept { return answered ? static_cast<double>(correct) / answered : 0.0; }
  friend bool operator==(const GroupStats&, const GroupStats&) = default;
};

struct EvalReport {
  std::string mode;
  std::string variant;
  std::size_t instances = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;
  std::size_t unparsed = 0;  // includes errored
  std::size_t errored = 0;
  double accuracy = 0.0;
  std::map<std::string, GroupStats> per_scenario;
  std::array<std::size_t, 2> choice_counts{};       // presented side chosen
  std::array<std::size_t, 2> ground_truth_sides{};  // presented side that is correct

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline std::string group_key(const BenchmarkInstance& inst) {
  if (!inst.probe) return std::to_string(inst.scenario_id);
  if (inst.probe->target == kSegmentProbeTarget) return inst.probe->target + "/" + inst.probe->kind;
  return inst.probe->target + "/tier" + std::to_string(inst.probe->tier);
}

inline EvalReport score(const std::vector<BenchmarkInstance>& instances, const std::vector<Prediction>& predictions,
                        const PresentationVariant& variant, PromptMode mode = PromptMode::image_only) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions)
    if (!by_id.emplace(p.instance_id, &p).second)
      throw Error(errc::kIdMismatch, "duplicate prediction for instance " + p.instance_id);
  std::size_t matched = 0;
  EvalReport r;
  r.mode = std::string(to_string(mode));
  r.variant = std::string(to_string(variant.kind));
  for (const auto& inst : instances) {
    const Presentation pres = present(inst, variant);
    const int want = expected_side(inst, pres);
    auto& g = r.per_scenario[group_key(inst)];
    ++r.instances;
    ++g.total;
    ++r.ground_truth_sides[static_cast<std::size_t>(want - 1)];
    std::optional<int> got;
    auto it = by_id.find(inst.instance_id);
    if (it != by_id.end()) {
      ++matched;
      if (!it->second->error.empty()) ++r.errored;
      else got = parse_answer(it->second->raw_response, pres);
    }
    if (!got) {
      ++r.unparsed;
      continue;
    }
    ++r.answered;
    ++g.answered;
    ++r.choice_counts[static_cast<std::size_t>(*got - 1)];
    if (*got == want) {
      ++r.correct;
      ++g.correct;
    }
  }
  if (matched != by_id.size()) {
    std::set<std::string> known;
    for (const auto& inst : instances) known.insert(inst.instance_id);
    for (const auto& p : predictions)
      if (!known.count(p.instance_id))
        throw Error(errc::kIdMismatch, "prediction for unknown instance " + p.instance_id);
  }
  r.accuracy = r.answered ? static_cast<double>(r.correct) / r.answered : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Attribute abstraction

/// Canonical descriptor for a free-form name ("Number of Sharp Turns", "max angle", ...).
inline std::optional<DescriptorId> normalize_descriptor_name(std::string_view raw) {
  std::string s;
  for (char c : raw) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) s += static_cast<char>(std::tolower(u));
    else if (c == ' ' || c == '_' || c == '-' || c == '\t' || c == '.') s += ' ';
  }
  // collapse spaces and drop list numbering
  std::string t;
  for (char c : s)
    if (c != ' ' || (!t.empty() && t.back() != ' ')) t += c;
  while (!t.empty() && t.back() == ' ') t.pop_back();
  std::size_t k = 0;
  while (k < t.size() && std::isdigit(static_cast<unsigned char>(t[k]))) ++k;
  if (k > 0 && k < t.size() && t[k] == ' ') t = t.substr(k + 1);
  if (t.rfind("the ", 0) == 0) t = t.substr(4);

  static const std::vector<std::pair<std::string, DescriptorId>> aliases = {
      {"minimum clearance", DescriptorId::min_clearance},
      {"min clearance", DescriptorId::min_clearance},
      {"maximum clearance", DescriptorId::max_clearance},
      {"max clearance", DescriptorId::max_clearance},
      {"average clearance", DescriptorId::avg_clearance},
      {"avg clearance", DescriptorId::avg_clearance},
      {"mean clearance", DescriptorId::avg_clearance},
      {"path length", DescriptorId::path_length},
      {"length", DescriptorId::path_length},
      {"smoothness", DescriptorId::smoothness},
      {"number of sharp turns", DescriptorId::sharp_turns},
      {"sharp turns", DescriptorId::sharp_turns},
      {"number of sharp turn", DescriptorId::sharp_turns},
      {"sharp turn", DescriptorId::sharp_turns},
      {"maximum turn angle", DescriptorId::max_angle},
      {"max turn angle", DescriptorId::max_angle},
      {"maximum angle", DescriptorId::max_angle},
      {"max angle", DescriptorId::max_angle},
  };
  for (const auto& [name, id] : aliases)
    if (t == name) return id;
  return std::nullopt;
}

struct AbstractionParse {
  std::set<DescriptorId> descriptors;
  std::size_t unknown = 0;
  bool answered = false;
};

/// Semicolon-separated descriptor list from the Answer line.
inline AbstractionParse parse_abstraction(std::string_view raw) {
  AbstractionParse out;
  const auto text = answer_text(raw);
  if (!text) return out;
  out.answered = true;
  std::string item;
  auto flush = [&] {
    if (detail::has_word_char(item)) {
      if (auto d = normalize_descriptor_name(item)) out.descriptors.insert(*d);
      else ++out.unknown;
    }
    item.clear();
  };
  for (char c : *text) {
    if (c == ';') flush();
    else item += c;
  }
  flush();
  return out;
}

struct AbstractionRun {
  int scenario_id = 0;
  std::set<DescriptorId> descriptors;
  std::size_t unknown = 0;
};

struct AbstractionReport {
  std::map<int, GroupStats> per_scenario;  // correct = runs naming a required descriptor
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t unknown_names = 0;
  double average = 0.0;
};

inline AbstractionReport score_abstraction(const std::vector<AbstractionRun>& runs,
                                           const std::vector<Scenario>& catalog) {
  AbstractionReport r;
  for (const auto& run : runs) {
    const Scenario& s = find_scenario(catalog, run.scenario_id);
    bool hit = false;
    for (auto d : run.descriptors) hit = hit || s.requires_descriptor(d);
    auto& g = r.per_scenario[run.scenario_id];
    ++g.total;
    ++g.answered;
    ++r.runs;
    r.unknown_names += run.unknown;
    if (hit) {
      ++g.correct;
      ++r.successes;
    }
  }
  r.average = r.runs ? static_cast<double>(r.successes) / r.runs : 0.0;
  return r;
}

}  // namespace pathforge

#endif  // PATHFORGE_HARNESS_HPP
