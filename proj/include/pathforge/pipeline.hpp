#ifndef PATHFORGE_PIPELINE_HPP
#define PATHFORGE_PIPELINE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/envgen.hpp"
#include "pathforge/error.hpp"
#include "pathforge/io.hpp"
#include "pathforge/pairing.hpp"
#include "pathforge/parallel.hpp"
#include "pathforge/planner.hpp"
#include "pathforge/probeset.hpp"
#include "pathforge/render.hpp"
#include "pathforge/scenarios.hpp"

namespace pathforge {

struct EnvPaths {
  Environment env;
  std::vector<Path> paths;
};

struct BuildOptions {
  unsigned per_scenario = 70;
  unsigned pairs_per_env = 5;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  SignificanceThresholds thresholds;
  DescriptorOptions descriptor_options;
  bool render_train = false;
  double raster_dpi = 0.0;  // > 0 also writes PNG renders
  RenderStyle style;
};

struct SkippedEnvironment {
  std::string env_id;
  std::string reason;
};

struct BenchmarkBuild {
  BenchmarkSplit split;
  std::vector<PoolEntry> pool;  // every described path
  std::vector<SkippedEnvironment> skipped;
};

/// Describes, pairs and labels every environment, then draws the split.
/// Environments whose descriptors are undefined (no obstacles) are skipped.
inline BenchmarkBuild build_benchmark(const std::vector<EnvPaths>& inputs, const std::vector<Scenario>& catalog,
                                      const BuildOptions& opt) {
  struct Slot {
    std::vector<BenchmarkInstance> instances;
    std::vector<PoolEntry> pool;
    std::optional<SkippedEnvironment> skipped;
  };
  std::vector<Slot> slots(inputs.size());
  parallel_for(inputs.size(), opt.jobs, [&](std::size_t i) {
    const auto& in = inputs[i];
    try {
      std::vector<DescriptorVector> d;
      d.reserve(in.paths.size());
      for (const auto& p : in.paths) d.push_back(compute(p, in.env, opt.descriptor_options));
      slots[i].instances = build_instances(in.env, in.paths, d, catalog, opt.thresholds, opt.pairs_per_env);
      for (std::size_t k = 0; k < in.paths.size(); ++k) slots[i].pool.push_back({in.paths[k], d[k]});
    } catch (const Error& e) {
      if (e.code() != errc::kClearanceUndefined) throw;
      slots[i].skipped = SkippedEnvironment{in.env.id, e.code()};
    }
  });
  BenchmarkBuild out;
  std::vector<BenchmarkInstance> all;
  for (auto& s : slots) {
    for (auto& inst : s.instances) all.push_back(std::move(inst));
    for (auto& p : s.pool) out.pool.push_back(std::move(p));
    if (s.skipped) out.skipped.push_back(*s.skipped);
  }
  out.split = assemble_benchmark(all, catalog, opt.per_scenario, opt.seed);
  return out;
}

namespace detail {

inline json thresholds_json(const SignificanceThresholds& t) {
  return {{"clearance", t.clearance},
          {"path_length", t.path_length},
          {"smoothness", t.smoothness},
          {"sharp_turns", t.sharp_turns},
          {"max_angle", t.max_angle}};
}

inline SignificanceThresholds thresholds_from_json(const json& j) {
  SignificanceThresholds t;
  t.clearance = j.at("clearance").get<double>();
  t.path_length = j.at("path_length").get<double>();
  t.smoothness = j.at("smoothness").get<double>();
  t.sharp_turns = j.at("sharp_turns").get<double>();
  t.max_angle = j.at("max_angle").get<double>();
  return t;
}

}  // namespace detail

/// Renders both panels of an instance as display lists, in stored order.
inline std::array<DisplayList, 2> instance_display_lists(const BenchmarkInstance& inst, const Environment& env,
                                                          const RenderStyle& style = {}) {
  if (inst.probe && inst.probe->target == kSegmentProbeTarget)
    return {geometry_display_list(env, inst.path_1.points, style), geometry_display_list(env, inst.path_2.points, style)};
  return {scene_display_list(env, inst.path_1, style), scene_display_list(env, inst.path_2, style)};
}

namespace detail {

inline void write_renders(const fs::path& dir, const std::vector<const BenchmarkInstance*>& todo,
                          const std::map<std::string, const Environment*>& envs, const BuildOptions& opt,
                          const std::function<void(const fs::path&, const Image&)>& write_png) {
  parallel_for(todo.size(), opt.jobs, [&](std::size_t i) {
    const BenchmarkInstance& inst = *todo[i];
    const auto lists = instance_display_lists(inst, *envs.at(inst.env_id), opt.style);
    for (int side = 1; side <= 2; ++side) {
      const auto& dl = lists[static_cast<std::size_t>(side - 1)];
      write_text(dir / render_ref(inst.instance_id, side), to_svg(dl));
      if (opt.raster_dpi > 0.0 && write_png) {
        fs::path png = dir / render_ref(inst.instance_id, side);
        png.replace_extension(".png");
        write_png(png, rasterize(dl, opt.raster_dpi));
      }
    }
  });
}

}  // namespace detail

/// Optional PNG writer; the raster-capable targets pass one in.
using PngWriter = std::function<void(const fs::path&, const Image&)>;

inline void write_benchmark(const fs::path& dir, const BenchmarkBuild& build, const std::vector<EnvPaths>& inputs,
                            const std::vector<Scenario>& catalog, const BuildOptions& opt,
                            const PngWriter& write_png = {}) {
  fs::create_directories(dir / "envs");
  fs::create_directories(dir / "renders");
  std::map<std::string, const Environment*> envs;
  for (const auto& in : inputs) {
    envs[in.env.id] = &in.env;
    write_json(environment_file(dir / "envs", in.env.id), to_json(in.env));
  }
  std::vector<json> test_rows, train_rows, pool_rows;
  json test_ids = json::array(), train_ids = json::array();
  std::map<int, std::size_t> per_scenario;
  for (const auto& inst : build.split.test) {
    test_rows.push_back(to_json(inst));
    test_ids.push_back(inst.instance_id);
    ++per_scenario[inst.scenario_id];
  }
  for (const auto& inst : build.split.train) {
    train_rows.push_back(to_json(inst));
    train_ids.push_back(inst.instance_id);
  }
  for (const auto& p : build.pool)
    pool_rows.push_back({{"path", to_json(p.path)}, {"descriptors", to_json(p.descriptors)}});
  write_jsonl(dir / "instances.jsonl", test_rows);
  write_jsonl(dir / "train.jsonl", train_rows);
  write_jsonl(dir / "pool.jsonl", pool_rows);
  write_json(dir / "split.json", {{"test", test_ids}, {"train", train_ids}});
  write_json(dir / "scenarios.json", catalog_to_json(catalog));

  json counts = json::object();
  for (const auto& [sid, n] : per_scenario) counts[std::to_string(sid)] = n;
  json skipped = json::array();
  for (const auto& s : build.skipped) skipped.push_back({{"env_id", s.env_id}, {"reason", s.reason}});
  write_json(dir / "manifest.json", {{"schema", kSchemaVersion},
                                     {"kind", "benchmark"},
                                     {"seed", opt.seed},
                                     {"per_scenario", opt.per_scenario},
                                     {"pairs_per_env", opt.pairs_per_env},
                                     {"thresholds", detail::thresholds_json(opt.thresholds)},
                                     {"densify_spacing", opt.descriptor_options.densify_spacing},
                                     {"environments", inputs.size()},
                                     {"skipped_environments", skipped},
                                     {"test_instances", build.split.test.size()},
                                     {"train_instances", build.split.train.size()},
                                     {"test_per_scenario", counts},
                                     {"renders_include_train", opt.render_train}});

  std::vector<const BenchmarkInstance*> todo;
  for (const auto& inst : build.split.test) todo.push_back(&inst);
  if (opt.render_train)
    for (const auto& inst : build.split.train) todo.push_back(&inst);
  detail::write_renders(dir, todo, envs, opt, write_png);
}

// ---------------------------------------------------------------------------
// Probe sets

inline std::vector<BenchmarkInstance> probe_instances(const ProbeSet& set, const std::vector<PoolEntry>& pool) {
  std::vector<BenchmarkInstance> out;
  const std::string target(field_name(set.spec.descriptor));
  for (std::size_t k = 0; k < kProbeTiers; ++k) {
    for (std::size_t n = 0; n < set.tiers[k].size(); ++n) {
      const ProbePair& p = set.tiers[k][n];
      BenchmarkInstance inst;
      inst.instance_id = "probe-" + target + "-t" + std::to_string(k + 1) + "-" + std::to_string(n);
      inst.env_id = pool[p.first].path.env_id;
      inst.path_1 = pool[p.first].path;
      inst.path_2 = pool[p.second].path;
      inst.descriptors_1 = pool[p.first].descriptors;
      inst.descriptors_2 = pool[p.second].descriptors;
      inst.ground_truth = p.smaller;
      inst.split = "probe";
      inst.probe = ProbeInfo{target, "", static_cast<int>(k + 1), set.spec.thresholds[k]};
      out.push_back(std::move(inst));
    }
  }
  return out;
}

inline Path segment_as_path(const SegmentCase& s, const std::string& id, unsigned steps) {
  Path p;
  p.id = id;
  p.env_id = SegmentField{}.environment().id;
  p.points = segment_polyline(s, steps);
  return p;
}

inline std::vector<BenchmarkInstance> segment_instances(SegmentKind kind, const std::vector<SegmentCase>& cases,
                                                        const std::vector<SegmentPair>& pairs,
                                                        const SegmentField& field = {}) {
  std::vector<BenchmarkInstance> out;
  const std::string k(to_string(kind));
  auto desc = [](const SegmentCase& c) {
    DescriptorVector d;
    d.min_clearance = d.max_clearance = d.avg_clearance = c.clearance;
    return d;
  };
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const auto& pr = pairs[n];
    BenchmarkInstance inst;
    inst.instance_id = "segment-" + k + "-" + std::to_string(n);
    inst.env_id = field.environment().id;
    inst.path_1 = segment_as_path(cases[pr.first], "segment-" + k + "-c" + std::to_string(pr.first), field.curve_steps);
    inst.path_2 = segment_as_path(cases[pr.second], "segment-" + k + "-c" + std::to_string(pr.second), field.curve_steps);
    inst.path_1.run_index = static_cast<std::int64_t>(pr.first);
    inst.path_2.run_index = static_cast<std::int64_t>(pr.second);
    inst.descriptors_1 = desc(cases[pr.first]);
    inst.descriptors_2 = desc(cases[pr.second]);
    inst.ground_truth = pr.closer;
    inst.split = "probe";
    inst.probe = ProbeInfo{kSegmentProbeTarget, k, 0, 0.0};
    out.push_back(std::move(inst));
  }
  return out;
}

/// Probe directory: instances.jsonl, manifest.json, envs/, renders/.
inline void write_probeset(const fs::path& dir, const std::vector<BenchmarkInstance>& instances,
                           const std::vector<Environment>& envs, const json& manifest_extra, const BuildOptions& opt,
                           const PngWriter& write_png = {}) {
  fs::create_directories(dir / "envs");
  fs::create_directories(dir / "renders");
  std::map<std::string, const Environment*> by_id;
  for (const auto& e : envs) by_id[e.id] = &e;
  std::set<std::string> used;
  for (const auto& inst : instances) used.insert(inst.env_id);
  for (const auto& id : used) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(errc::kPathEnvMismatch, "probe refers to unknown environment " + id);
    write_json(environment_file(dir / "envs", id), to_json(*it->second));
  }
  std::vector<json> rows;
  for (const auto& inst : instances) rows.push_back(to_json(inst));
  write_jsonl(dir / "instances.jsonl", rows);
  json manifest = manifest_extra;
  manifest["schema"] = kSchemaVersion;
  manifest["kind"] = "probeset";
  manifest["instances"] = instances.size();
  write_json(dir / "manifest.json", manifest);
  std::vector<const BenchmarkInstance*> todo;
  for (const auto& inst : instances) todo.push_back(&inst);
  detail::write_renders(dir, todo, by_id, opt, write_png);
}

inline std::vector<PoolEntry> load_pool(const fs::path& benchmark_dir) {
  std::vector<PoolEntry> out;
  for (const auto& j : read_jsonl(benchmark_dir / "pool.jsonl"))
    out.push_back({path_from_json(j.at("path")), descriptors_from_json(j.at("descriptors"))});
  return out;
}

// ---------------------------------------------------------------------------
// Audit

struct AuditResult {
  std::size_t instances = 0;
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

inline void audit_path(const Path& p, const Environment& env, bool endpoints, const std::string& where,
                       std::vector<std::string>& v) {
  if (p.env_id != env.id) v.push_back(where + ": path " + p.id + " does not belong to " + env.id);
  if (p.points.empty()) {
    v.push_back(where + ": path " + p.id + " is empty");
    return;
  }
  if (endpoints) {
    if (p.points.size() < 2) v.push_back(where + ": path " + p.id + " has fewer than two points");
    if (distance(p.points.front(), env.start) > 1e-9) v.push_back(where + ": path " + p.id + " does not start at start");
    if (distance(p.points.back(), env.goal) > 1e-9) v.push_back(where + ": path " + p.id + " does not end at goal");
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    if (!env.in_bounds(p.points[i])) v.push_back(where + ": path " + p.id + " leaves the workspace");
    if (i == 0) continue;
    if (p.points[i] == p.points[i - 1]) v.push_back(where + ": path " + p.id + " repeats a point");
    for (const auto& o : env.obstacles)
      if (segment_hits_obstacle(p.points[i - 1], p.points[i], o, 0.0)) {
        v.push_back(where + ": path " + p.id + " segment " + std::to_string(i) + " collides");
        break;
      }
  }
}

inline bool same_descriptors(const DescriptorVector& a, const DescriptorVector& b) {
  for (auto m : kAllDescriptors)
    if (std::abs(a.get(m) - b.get(m)) > 1e-9 * std::max(1.0, std::abs(a.get(m)))) return false;
  return true;
}

}  // namespace detail

/// Re-verifies every stored instance of a benchmark or probe directory.
inline AuditResult audit_directory(const fs::path& dir) {
  AuditResult r;
  auto& v = r.violations;
  const json manifest = read_json(dir / "manifest.json");
  const std::string kind = manifest.at("kind").get<std::string>();
  std::map<std::string, Environment> envs;
  for (auto& e : load_environments(dir / "envs")) {
    for (const auto& msg : validate(e)) v.push_back("environment " + e.id + ": " + msg);
    envs.emplace(e.id, std::move(e));
  }

  std::vector<BenchmarkInstance> test = load_instances(dir / "instances.jsonl");
  std::vector<BenchmarkInstance> train;
  if (kind == "benchmark") train = load_instances(dir / "train.jsonl");

  std::set<std::string> seen;
  auto check_ids = [&](const std::vector<BenchmarkInstance>& xs) {
    for (const auto& x : xs)
      if (!seen.insert(x.instance_id).second) v.push_back("instance id " + x.instance_id + " appears twice");
  };
  check_ids(test);
  check_ids(train);

  std::vector<Scenario> catalog;
  SignificanceThresholds thresholds;
  DescriptorOptions dopt;
  if (kind == "benchmark") {
    catalog = load_catalog(dir / "scenarios.json");
    thresholds = detail::thresholds_from_json(manifest.at("thresholds"));
    dopt.densify_spacing = manifest.value("densify_spacing", 0.0);
  }

  auto check = [&](const BenchmarkInstance& inst, const std::string& expected_split, bool rendered) {
    ++r.instances;
    const std::string where = "instance " + inst.instance_id;
    if (inst.split != expected_split) v.push_back(where + ": split is '" + inst.split + "', expected " + expected_split);
    auto it = envs.find(inst.env_id);
    if (it == envs.end()) {
      v.push_back(where + ": environment " + inst.env_id + " missing");
      return;
    }
    const Environment& env = it->second;
    if (inst.ground_truth != 1 && inst.ground_truth != 2) v.push_back(where + ": ground truth is not 1 or 2");
    if (rendered)
      for (int side = 1; side <= 2; ++side)
        if (!fs::exists(dir / render_ref(inst.instance_id, side)))
          v.push_back(where + ": render " + render_ref(inst.instance_id, side) + " missing");
    const bool segment = inst.probe && inst.probe->target == kSegmentProbeTarget;
    detail::audit_path(inst.path_1, env, !segment, where, v);
    detail::audit_path(inst.path_2, env, !segment, where, v);
    if (segment) {
      const Obstacle o = SegmentField{}.obstacle();
      const auto clr = [&](const Path& p) {
        return std::min(dist_point_obstacle(p.points.front(), o), dist_point_obstacle(p.points.back(), o));
      };
      const double c1 = clr(inst.path_1), c2 = clr(inst.path_2);
      if (std::abs(c1 - inst.descriptors_1.min_clearance) > 1e-9 || std::abs(c2 - inst.descriptors_2.min_clearance) > 1e-9)
        v.push_back(where + ": stored segment clearance disagrees with geometry");
      if (c1 == c2) v.push_back(where + ": tied segment pair");
      else if ((c1 < c2 ? 1 : 2) != inst.ground_truth) v.push_back(where + ": ground truth is not the closer segment");
      return;
    }
    DescriptorVector d1, d2;
    try {
      d1 = compute(inst.path_1, env, dopt);
      d2 = compute(inst.path_2, env, dopt);
    } catch (const Error& e) {
      v.push_back(where + ": descriptors cannot be recomputed: " + e.what());
      return;
    }
    if (!detail::same_descriptors(d1, inst.descriptors_1) || !detail::same_descriptors(d2, inst.descriptors_2))
      v.push_back(where + ": stored descriptors differ from recomputed values");
    if (inst.probe) {
      const DescriptorId m = parse_descriptor(inst.probe->target);
      const double gap = std::abs(d1.get(m) - d2.get(m));
      if (!(gap > inst.probe->epsilon))
        v.push_back(where + ": gap " + repr_double(gap) + " does not exceed " + repr_double(inst.probe->epsilon));
      if (inst.path_1.env_id != inst.path_2.env_id) v.push_back(where + ": probe paths come from different environments");
      if ((d1.get(m) < d2.get(m) ? 1 : 2) != inst.ground_truth)
        v.push_back(where + ": ground truth is not the smaller-valued path");
      return;
    }
    const Scenario* s = nullptr;
    for (const auto& sc : catalog)
      if (sc.id == inst.scenario_id) s = &sc;
    if (!s) {
      v.push_back(where + ": unknown scenario " + std::to_string(inst.scenario_id));
      return;
    }
    if (significant_descriptors(d1, d2, *s, thresholds).empty())
      v.push_back(where + ": no required descriptor gap exceeds its threshold");
    const Label l = label(d1, d2, *s, thresholds);
    if (!l.accepted() || l.side() != inst.ground_truth)
      v.push_back(where + ": ground truth disagrees with the recomputed label");
    if (inst.path_1.run_index >= inst.path_2.run_index)
      v.push_back(where + ": paths are not in canonical run order");
  };

  bool render_train = manifest.value("renders_include_train", false);
  for (const auto& inst : test) check(inst, kind == "benchmark" ? "test" : "probe", true);
  for (const auto& inst : train) check(inst, "train", render_train);

  if (kind == "benchmark") {
    const unsigned per = manifest.at("per_scenario").get<unsigned>();
    std::map<int, std::size_t> counts;
    for (const auto& inst : test) ++counts[inst.scenario_id];
    for (const auto& s : catalog)
      if (counts[s.id] != per)
        v.push_back("scenario " + std::to_string(s.id) + " has " + std::to_string(counts[s.id]) +
                    " test instances, expected " + std::to_string(per));
    const json split = read_json(dir / "split.json");
    std::set<std::string> a, b;
    for (const auto& id : split.at("test")) a.insert(id.get<std::string>());
    for (const auto& id : split.at("train")) b.insert(id.get<std::string>());
    for (const auto& id : a)
      if (b.count(id)) v.push_back("instance " + id + " is in both test and train");
    if (a.size() != test.size() || b.size() != train.size()) v.push_back("split.json disagrees with the record files");
  }
  return r;
}

}  // namespace pathforge

#endif  // PATHFORGE_PIPELINE_HPP
