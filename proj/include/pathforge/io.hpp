#ifndef PATHFORGE_IO_HPP
#define PATHFORGE_IO_HPP

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/harness.hpp"
#include "pathforge/pairing.hpp"
#include "pathforge/planner.hpp"
#include "pathforge/scenarios.hpp"

namespace pathforge {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(errc::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::kIo, "cannot write " + p.string());
  out << s;
  if (!out) throw Error(errc::kIo, "write failed for " + p.string());
}

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& b) {
  write_text(p, std::string(b.begin(), b.end()));
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(errc::kParse, where + ": " + e.what());
  }
}

inline json read_json(const fs::path& p) { return parse_json(read_text(p), p.string()); }

inline void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

/// Non-empty lines parsed as JSON, each error tagged with file:line.
inline std::vector<json> read_jsonl(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<json> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json(line, p.string() + ":" + std::to_string(n)));
  }
  return out;
}

inline void write_jsonl(const fs::path& p, const std::vector<json>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.dump() + "\n";
  write_text(p, s);
}

/// Regular files in a directory with the given extension, sorted by name.
inline std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(errc::kIo, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Schemas

namespace detail {

template <typename F>
auto field(const char* what, F&& get) {
  try {
    return get();
  } catch (const json::exception& e) {
    throw Error(errc::kParse, std::string("malformed ") + what + ": " + e.what());
  }
}

inline Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(errc::kParse, "points are [x, y] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace detail

inline json to_json(Point p) { return json::array({p.x, p.y}); }

inline json to_json(const Environment& e) {
  json obs = json::array();
  for (const auto& o : e.obstacles) {
    json ring = json::array();
    for (const Point& v : o.vertices) ring.push_back(to_json(v));
    obs.push_back(std::move(ring));
  }
  return {{"schema", kSchemaVersion},
          {"id", e.id},
          {"family", std::string(to_string(e.family))},
          {"seed", e.seed},
          {"bounds", {{"width", e.width}, {"height", e.height}}},
          {"start", to_json(e.start)},
          {"goal", to_json(e.goal)},
          {"obstacles", std::move(obs)}};
}

inline Environment environment_from_json(const json& j) {
  return detail::field("environment", [&] {
    Environment e;
    e.id = j.at("id").get<std::string>();
    e.family = parse_family(j.at("family").get<std::string>());
    e.seed = j.at("seed").get<std::uint64_t>();
    e.width = j.at("bounds").at("width").get<double>();
    e.height = j.at("bounds").at("height").get<double>();
    e.start = detail::point_from_json(j.at("start"));
    e.goal = detail::point_from_json(j.at("goal"));
    for (const auto& ring : j.at("obstacles")) {
      Obstacle o;
      for (const auto& v : ring) o.vertices.push_back(detail::point_from_json(v));
      e.obstacles.push_back(std::move(o));
    }
    return e;
  });
}

inline json to_json(const Path& p) {
  json pts = json::array();
  for (const Point& q : p.points) pts.push_back(to_json(q));
  return {{"id", p.id},
          {"env_id", p.env_id},
          {"planner_seed", p.planner_seed},
          {"run_index", p.run_index},
          {"points", std::move(pts)}};
}

inline Path path_from_json(const json& j) {
  return detail::field("path", [&] {
    Path p;
    p.id = j.at("id").get<std::string>();
    p.env_id = j.at("env_id").get<std::string>();
    p.planner_seed = j.at("planner_seed").get<std::uint64_t>();
    p.run_index = j.at("run_index").get<std::int64_t>();
    for (const auto& q : j.at("points")) p.points.push_back(detail::point_from_json(q));
    return p;
  });
}

inline json to_json(const DescriptorVector& d) {
  json j = json::object();
  for (auto m : kAllDescriptors) {
    if (m == DescriptorId::sharp_turns) j[std::string(field_name(m))] = d.sharp_turns;
    else j[std::string(field_name(m))] = d.get(m);
  }
  return j;
}

inline DescriptorVector descriptors_from_json(const json& j) {
  return detail::field("descriptor record", [&] {
    DescriptorVector d;
    for (auto m : kAllDescriptors) {
      const auto& v = j.at(std::string(field_name(m)));
      if (m == DescriptorId::sharp_turns) d.sharp_turns = v.get<unsigned>();
      else d.set(m, v.get<double>());
    }
    return d;
  });
}

inline json to_json(const Scenario& s) {
  json dirs = json::object();
  for (auto m : kAllDescriptors) dirs[std::string(field_name(m))] = std::string(to_string(s.direction(m)));
  return {{"id", s.id}, {"text", s.text}, {"directions", std::move(dirs)}};
}

inline json catalog_to_json(const std::vector<Scenario>& catalog) {
  json arr = json::array();
  for (const auto& s : catalog) arr.push_back(to_json(s));
  return {{"version", kScenarioCatalogVersion}, {"scenarios", std::move(arr)}};
}

inline std::vector<Scenario> catalog_from_json(const json& j) {
  auto out = detail::field("scenario catalog", [&] {
    std::vector<Scenario> cat;
    for (const auto& r : j.at("scenarios")) {
      Scenario s;
      s.id = r.at("id").get<int>();
      s.text = r.at("text").get<std::string>();
      s.directions.fill(Direction::ignore);
      for (const auto& [k, v] : r.at("directions").items())
        s.directions[static_cast<std::size_t>(parse_descriptor(k))] = parse_direction(v.get<std::string>());
      cat.push_back(std::move(s));
    }
    return cat;
  });
  check_catalog(out);
  return out;
}

inline std::vector<Scenario> load_catalog(const fs::path& p) { return catalog_from_json(read_json(p)); }

inline json to_json(const BenchmarkInstance& b) {
  json j = {{"instance_id", b.instance_id},
            {"env_id", b.env_id},
            {"env", "envs/" + b.env_id + ".json"},
            {"scenario_id", b.scenario_id},
            {"path_1_id", b.path_1.id},
            {"path_2_id", b.path_2.id},
            {"path_1", to_json(b.path_1)},
            {"path_2", to_json(b.path_2)},
            {"descriptors_1", to_json(b.descriptors_1)},
            {"descriptors_2", to_json(b.descriptors_2)},
            {"ground_truth", b.ground_truth},
            {"render_1", render_ref(b.instance_id, 1)},
            {"render_2", render_ref(b.instance_id, 2)},
            {"render_3d", nullptr},
            {"split", b.split}};
  if (b.probe)
    j["probe"] = {{"target", b.probe->target},
                  {"kind", b.probe->kind},
                  {"tier", b.probe->tier},
                  {"epsilon", b.probe->epsilon}};
  return j;
}

inline BenchmarkInstance instance_from_json(const json& j) {
  return detail::field("benchmark record", [&] {
    BenchmarkInstance b;
    b.instance_id = j.at("instance_id").get<std::string>();
    b.env_id = j.at("env_id").get<std::string>();
    b.scenario_id = j.at("scenario_id").get<int>();
    b.path_1 = path_from_json(j.at("path_1"));
    b.path_2 = path_from_json(j.at("path_2"));
    b.descriptors_1 = descriptors_from_json(j.at("descriptors_1"));
    b.descriptors_2 = descriptors_from_json(j.at("descriptors_2"));
    b.ground_truth = j.at("ground_truth").get<int>();
    b.split = j.value("split", std::string());
    if (j.contains("probe")) {
      const auto& p = j.at("probe");
      b.probe = ProbeInfo{p.at("target").get<std::string>(), p.value("kind", std::string()), p.at("tier").get<int>(),
                          p.at("epsilon").get<double>()};
    }
    return b;
  });
}

inline json to_json(const Prediction& p) {
  json j = {{"instance_id", p.instance_id}, {"raw_response", p.raw_response}};
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

inline Prediction prediction_from_json(const json& j) {
  return detail::field("prediction record", [&] {
    return Prediction{j.at("instance_id").get<std::string>(), j.value("raw_response", std::string()),
                      j.value("error", std::string())};
  });
}

inline json to_json(const GroupStats& g) {
  return {{"total", g.total}, {"answered", g.answered}, {"correct", g.correct}, {"accuracy", g.accuracy()}};
}

inline json to_json(const EvalReport& r) {
  json per = json::object();
  for (const auto& [k, g] : r.per_scenario) per[k] = to_json(g);
  return {{"mode", r.mode},
          {"variant", r.variant},
          {"instances", r.instances},
          {"answered", r.answered},
          {"correct", r.correct},
          {"unparsed", r.unparsed},
          {"errored", r.errored},
          {"accuracy", r.accuracy},
          {"per_scenario", std::move(per)},
          {"choice_counts", {{"first", r.choice_counts[0]}, {"second", r.choice_counts[1]}}},
          {"ground_truth_sides", {{"first", r.ground_truth_sides[0]}, {"second", r.ground_truth_sides[1]}}}};
}

inline EvalReport report_from_json(const json& j) {
  return detail::field("report", [&] {
    EvalReport r;
    r.mode = j.at("mode").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.instances = j.at("instances").get<std::size_t>();
    r.answered = j.at("answered").get<std::size_t>();
    r.correct = j.at("correct").get<std::size_t>();
    r.unparsed = j.at("unparsed").get<std::size_t>();
    r.errored = j.at("errored").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    for (const auto& [k, g] : j.at("per_scenario").items())
      r.per_scenario[k] = GroupStats{g.at("total").get<std::size_t>(), g.at("answered").get<std::size_t>(),
                                     g.at("correct").get<std::size_t>()};
    r.choice_counts = {j.at("choice_counts").at("first").get<std::size_t>(),
                       j.at("choice_counts").at("second").get<std::size_t>()};
    r.ground_truth_sides = {j.at("ground_truth_sides").at("first").get<std::size_t>(),
                            j.at("ground_truth_sides").at("second").get<std::size_t>()};
    return r;
  });
}

inline json to_json(const AbstractionReport& r) {
  json per = json::object();
  for (const auto& [k, g] : r.per_scenario) per[std::to_string(k)] = to_json(g);
  return {{"mode", "attribute_abstraction"}, {"runs", r.runs},         {"successes", r.successes},
          {"average", r.average},            {"per_scenario", per},    {"unknown_names", r.unknown_names}};
}

// ---------------------------------------------------------------------------
// Directory layouts

inline fs::path environment_file(const fs::path& dir, const std::string& env_id) { return dir / (env_id + ".json"); }
inline fs::path paths_file(const fs::path& dir, const std::string& env_id) { return dir / (env_id + ".jsonl"); }

inline std::vector<Environment> load_environments(const fs::path& dir) {
  std::vector<Environment> out;
  for (const auto& f : list_files(dir, ".json")) out.push_back(environment_from_json(read_json(f)));
  return out;
}

inline std::vector<Path> load_paths(const fs::path& file) {
  std::vector<Path> out;
  for (const auto& j : read_jsonl(file)) out.push_back(path_from_json(j));
  return out;
}

inline std::vector<BenchmarkInstance> load_instances(const fs::path& file) {
  std::vector<BenchmarkInstance> out;
  for (const auto& j : read_jsonl(file)) out.push_back(instance_from_json(j));
  return out;
}

inline std::vector<Prediction> load_predictions(const fs::path& file) {
  std::vector<Prediction> out;
  for (const auto& j : read_jsonl(file)) out.push_back(prediction_from_json(j));
  return out;
}

}  // namespace pathforge

#endif  // PATHFORGE_IO_HPP
