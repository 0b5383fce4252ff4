#include <gtest/gtest.h>

#include <filesystem>

#include "pathforge/pipeline.hpp"

using namespace pathforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pathforge_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<EnvPaths>& inputs() {
  static const std::vector<EnvPaths> in = [] {
    std::vector<EnvPaths> out;
    for (auto f : {Family::rings, Family::waves, Family::maze, Family::random})
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        EnvGenConfig c;
        c.family = f;
        c.seed = seed;
        EnvPaths e{generate(c), {}};
        PlannerConfig pc;
        pc.seed = 1000 + seed;
        e.paths = sample_paths(e.env, pc, 30);
        out.push_back(std::move(e));
      }
    return out;
  }();
  return in;
}

BuildOptions small_options() {
  BuildOptions o;
  o.per_scenario = 1;
  o.seed = 5;
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_text(e.path());
  return out;
}

bool any_mentions(const AuditResult& r, const std::string& word) {
  for (const auto& v : r.violations)
    if (v.find(word) != std::string::npos) return true;
  return false;
}

void rewrite_first_instance(const fs::path& file, const std::function<void(json&)>& edit) {
  auto rows = read_jsonl(file);
  ASSERT_FALSE(rows.empty());
  edit(rows[0]);
  write_jsonl(file, rows);
}

}  // namespace

TEST(Pipeline, BuildWriteAndAuditSmallBenchmark) {
  const auto opt = small_options();
  const auto build = build_benchmark(inputs(), scenario_catalog(), opt);
  ASSERT_EQ(build.split.test.size(), 15u);
  EXPECT_TRUE(build.skipped.empty());
  EXPECT_EQ(build.pool.size(), 12u * 30u);
  const auto dir = scratch("small");
  write_benchmark(dir, build, inputs(), scenario_catalog(), opt);
  for (const char* f : {"instances.jsonl", "train.jsonl", "pool.jsonl", "split.json", "scenarios.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto manifest = read_json(dir / "manifest.json");
  EXPECT_EQ(manifest.at("test_instances"), 15);
  for (int s = 1; s <= 15; ++s) EXPECT_EQ(manifest.at("test_per_scenario").at(std::to_string(s)), 1);
  for (const auto& inst : build.split.test) {
    EXPECT_TRUE(fs::exists(dir / render_ref(inst.instance_id, 1)));
    EXPECT_TRUE(fs::exists(dir / render_ref(inst.instance_id, 2)));
  }
  const auto r = audit_directory(dir);
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
  EXPECT_EQ(r.instances, build.split.test.size() + build.split.train.size());
  EXPECT_EQ(load_pool(dir).size(), build.pool.size());
  fs::remove_all(dir);
}

TEST(Pipeline, AuditCatchesTampering) {
  const auto opt = small_options();
  const auto build = build_benchmark(inputs(), scenario_catalog(), opt);
  const auto dir = scratch("tamper");
  write_benchmark(dir, build, inputs(), scenario_catalog(), opt);
  const auto pristine = snapshot(dir);
  auto restore = [&] {
    for (const auto& [rel, bytes] : pristine) write_text(dir / rel, bytes);
  };

  rewrite_first_instance(dir / "instances.jsonl", [](json& j) { j["ground_truth"] = 3 - j["ground_truth"].get<int>(); });
  EXPECT_FALSE(audit_directory(dir).ok());
  restore();

  rewrite_first_instance(dir / "instances.jsonl", [](json& j) {
    j["descriptors_1"]["path_length"] = j["descriptors_1"]["path_length"].get<double>() + 1.0;
  });
  EXPECT_TRUE(any_mentions(audit_directory(dir), "descriptors differ"));
  restore();

  // Straight line from start to goal through the obstacles.
  rewrite_first_instance(dir / "instances.jsonl", [](json& j) {
    auto& pts = j["path_1"]["points"];
    j["path_1"]["points"] = json::array({pts.front(), pts.back()});
  });
  EXPECT_TRUE(any_mentions(audit_directory(dir), "collides"));
  restore();

  fs::remove(dir / render_ref(build.split.test.front().instance_id, 2));
  EXPECT_TRUE(any_mentions(audit_directory(dir), "missing"));
  restore();

  EXPECT_TRUE(audit_directory(dir).ok());
  fs::remove_all(dir);
}

TEST(Pipeline, IdenticalRunsProduceIdenticalDirectories) {
  auto opt = small_options();
  const auto a = scratch("det_a"), b = scratch("det_b");
  write_benchmark(a, build_benchmark(inputs(), scenario_catalog(), opt), inputs(), scenario_catalog(), opt);
  opt.jobs = 3;
  write_benchmark(b, build_benchmark(inputs(), scenario_catalog(), opt), inputs(), scenario_catalog(), opt);
  const auto sa = snapshot(a), sb = snapshot(b);
  EXPECT_GT(sa.size(), 20u);
  EXPECT_TRUE(sa == sb);
  // A different split seed changes the draw.
  opt.seed = 6;
  const auto c = scratch("det_c");
  write_benchmark(c, build_benchmark(inputs(), scenario_catalog(), opt), inputs(), scenario_catalog(), opt);
  EXPECT_NE(read_text(a / "split.json"), read_text(c / "split.json"));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(Pipeline, EnvironmentsWithoutObstaclesAreSkipped) {
  auto in = inputs();
  EnvGenConfig c;
  c.family = Family::random;
  c.seed = 9;
  c.density = 1e-6;
  EnvPaths open{generate(c), {}};
  PlannerConfig pc;
  open.paths = sample_paths(open.env, pc, 4);
  in.push_back(open);
  const auto build = build_benchmark(in, scenario_catalog(), small_options());
  ASSERT_EQ(build.skipped.size(), 1u);
  EXPECT_EQ(build.skipped[0].env_id, open.env.id);
  EXPECT_EQ(build.skipped[0].reason, errc::kClearanceUndefined);
}

TEST(Pipeline, ProbeAndSegmentDirectoriesAudit) {
  const auto build = build_benchmark(inputs(), scenario_catalog(), small_options());
  auto spec = default_probe_spec(DescriptorId::smoothness);
  spec.pairs_per_threshold = 5;
  const auto probes = probe_instances(generate_probe_pairs(build.pool, spec, 3), build.pool);
  ASSERT_EQ(probes.size(), 15u);
  std::vector<Environment> envs;
  for (const auto& e : inputs()) envs.push_back(e.env);
  const auto pdir = scratch("probe");
  write_probeset(pdir, probes, envs, json{{"descriptor", "smoothness"}}, BuildOptions{});
  auto r = audit_directory(pdir);
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
  EXPECT_EQ(r.instances, 15u);
  rewrite_first_instance(pdir / "instances.jsonl", [](json& j) { j["probe"]["epsilon"] = 1e6; });
  EXPECT_TRUE(any_mentions(audit_directory(pdir), "does not exceed"));

  const SegmentField field;
  const auto cases = generate_segment_cases(SegmentKind::line, 40, 8, field);
  const auto seg = segment_instances(SegmentKind::line, cases, pair_segments(cases), field);
  ASSERT_EQ(seg.size(), 20u);
  const auto sdir = scratch("segment");
  write_probeset(sdir, seg, {field.environment()}, json{{"segments", "line"}}, BuildOptions{});
  r = audit_directory(sdir);
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
  rewrite_first_instance(sdir / "instances.jsonl", [](json& j) { j["ground_truth"] = 3 - j["ground_truth"].get<int>(); });
  EXPECT_TRUE(any_mentions(audit_directory(sdir), "closer segment"));
  fs::remove_all(pdir);
  fs::remove_all(sdir);
}

TEST(Pipeline, DisplayListsFollowStoredOrder) {
  const auto build = build_benchmark(inputs(), scenario_catalog(), small_options());
  const auto& inst = build.split.test.front();
  const Environment* env = nullptr;
  for (const auto& e : inputs())
    if (e.env.id == inst.env_id) env = &e.env;
  ASSERT_NE(env, nullptr);
  const auto dl = instance_display_lists(inst, *env);
  EXPECT_EQ(to_svg(dl[0]), render_scene(*env, inst.path_1));
  EXPECT_EQ(to_svg(dl[1]), render_scene(*env, inst.path_2));
}
