// pathforge: command-line entry point for the benchmark pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pathforge/endpoint.hpp"
#include "pathforge/envgen.hpp"
#include "pathforge/harness.hpp"
#include "pathforge/io.hpp"
#include "pathforge/pipeline.hpp"
#include "pathforge/planner.hpp"
#include "pathforge/png.hpp"
#include "pathforge/probeset.hpp"
#include "pathforge/scenarios.hpp"

namespace pf = pathforge;
using pf::json;
namespace fs = std::filesystem;

namespace {

std::vector<pf::Scenario> catalog_or_default(const std::string& file) {
  if (file.empty()) return pf::scenario_catalog();
  return pf::load_catalog(file);
}

void write_png_file(const fs::path& p, const pf::Image& img) { pf::write_bytes(p, pf::encode_png(img)); }

std::vector<pf::EnvPaths> load_inputs(const fs::path& env_dir, const fs::path& path_dir) {
  std::vector<pf::EnvPaths> out;
  for (auto& env : pf::load_environments(env_dir)) {
    const fs::path f = pf::paths_file(path_dir, env.id);
    if (!fs::exists(f)) throw pf::Error(pf::errc::kIo, "no path file for environment " + env.id + " in " + path_dir.string());
    out.push_back({std::move(env), pf::load_paths(f)});
  }
  if (out.empty()) throw pf::Error(pf::errc::kInvalidInput, "no environments found in " + env_dir.string());
  return out;
}

// ---------------------------------------------------------------------------

struct GenEnvArgs {
  std::string family = "maze";
  unsigned count = 1;
  std::uint64_t seed = 0;
  std::string out;
  double width = 50.0, height = 50.0, density = 0.5, corridor = 3.0;
  std::string policy = "corners";
  unsigned jobs = 1;
};

int run_gen_env(const GenEnvArgs& a) {
  std::vector<pf::Family> families;
  if (a.family == "all") families = {pf::Family::rings, pf::Family::waves, pf::Family::maze, pf::Family::random};
  else families = {pf::parse_family(a.family)};
  std::vector<pf::EnvGenConfig> cfgs;
  for (auto f : families)
    for (unsigned i = 0; i < a.count; ++i) {
      pf::EnvGenConfig c;
      c.family = f;
      c.width = a.width;
      c.height = a.height;
      c.density = a.density;
      c.corridor_width = a.corridor;
      c.seed = a.seed + i;
      c.start_goal_policy = pf::parse_start_goal_policy(a.policy);
      pf::check_config(c);
      cfgs.push_back(c);
    }
  std::vector<pf::Environment> envs(cfgs.size());
  pf::parallel_for(cfgs.size(), a.jobs, [&](std::size_t i) { envs[i] = pf::generate(cfgs[i]); });
  for (const auto& e : envs) pf::write_json(pf::environment_file(a.out, e.id), pf::to_json(e));
  std::cout << json{{"environments", envs.size()}, {"out", a.out}}.dump() << "\n";
  return 0;
}

struct PlanArgs {
  std::string envs, out;
  unsigned runs = 30;
  std::uint64_t seed = 0;
  double step = 2.0, inflation = 0.25, goal_tolerance = 0.0;
  unsigned max_iterations = 20000;
  unsigned jobs = 1;
};

int run_plan(const PlanArgs& a) {
  const auto envs = pf::load_environments(a.envs);
  if (envs.empty()) throw pf::Error(pf::errc::kInvalidInput, "no environments found in " + a.envs);
  json per_env = json::object();
  std::vector<std::vector<pf::Path>> results(envs.size());
  // Parallelism goes across environments; each run list stays sequential.
  pf::parallel_for(envs.size(), a.jobs, [&](std::size_t i) {
    pf::PlannerConfig cfg;
    cfg.step_size = a.step;
    cfg.inflation = a.inflation;
    cfg.goal_tolerance = a.goal_tolerance;
    cfg.max_iterations = a.max_iterations;
    cfg.seed = pf::derive_seed(a.seed, pf::fnv1a(envs[i].id));
    results[i] = pf::sample_paths(envs[i], cfg, a.runs);
  });
  for (std::size_t i = 0; i < envs.size(); ++i) {
    std::vector<json> rows;
    for (const auto& p : results[i]) rows.push_back(pf::to_json(p));
    pf::write_jsonl(pf::paths_file(a.out, envs[i].id), rows);
    per_env[envs[i].id] = results[i].size();
  }
  pf::write_json(fs::path(a.out) / "plan.json", {{"planner", "rrt_connect"},
                                                 {"seed", a.seed},
                                                 {"runs", a.runs},
                                                 {"step_size", a.step},
                                                 {"inflation", a.inflation},
                                                 {"goal_tolerance", a.goal_tolerance},
                                                 {"max_iterations", a.max_iterations},
                                                 {"successes", per_env}});
  std::cout << json{{"environments", envs.size()}, {"out", a.out}}.dump() << "\n";
  return 0;
}

struct DescribeArgs {
  std::string paths, envs, out;
  double densify = 0.0;
};

int run_describe(const DescribeArgs& a) {
  const auto inputs = load_inputs(a.envs, a.paths);
  pf::DescriptorOptions opt;
  opt.densify_spacing = a.densify;
  std::vector<json> rows;
  for (const auto& in : inputs)
    for (const auto& p : in.paths)
      rows.push_back({{"path_id", p.id}, {"env_id", p.env_id}, {"descriptors", pf::to_json(pf::compute(p, in.env, opt))}});
  pf::write_jsonl(a.out, rows);
  std::cout << json{{"records", rows.size()}, {"out", a.out}}.dump() << "\n";
  return 0;
}

struct BuildArgs {
  std::string envs, paths, scenarios, out;
  unsigned per_scenario = 70, pairs = 5, jobs = 1;
  std::uint64_t seed = 0;
  bool render_train = false;
  double raster_dpi = 0.0, densify = 0.0;
};

int run_build_benchmark(const BuildArgs& a) {
  const auto inputs = load_inputs(a.envs, a.paths);
  const auto catalog = catalog_or_default(a.scenarios);
  pf::BuildOptions opt;
  opt.per_scenario = a.per_scenario;
  opt.pairs_per_env = a.pairs;
  opt.seed = a.seed;
  opt.jobs = a.jobs;
  opt.render_train = a.render_train;
  opt.raster_dpi = a.raster_dpi;
  opt.descriptor_options.densify_spacing = a.densify;
  const auto build = pf::build_benchmark(inputs, catalog, opt);
  pf::write_benchmark(a.out, build, inputs, catalog, opt, write_png_file);
  std::cout << json{{"test", build.split.test.size()},
                    {"train", build.split.train.size()},
                    {"skipped_environments", build.skipped.size()},
                    {"out", a.out}}
                   .dump()
            << "\n";
  return 0;
}

struct ProbeArgs {
  std::string pool, descriptor, segments, out, thresholds;
  unsigned pairs_per_tier = 50, count = 200, jobs = 1;
  std::uint64_t seed = 0;
  double raster_dpi = 0.0;
};

int run_build_probeset(const ProbeArgs& a) {
  pf::BuildOptions opt;
  opt.jobs = a.jobs;
  opt.raster_dpi = a.raster_dpi;
  if (!a.segments.empty()) {
    const auto kind = pf::parse_segment_kind(a.segments);
    const pf::SegmentField field;
    const auto cases = pf::generate_segment_cases(kind, a.count, a.seed, field);
    const auto pairs = pf::pair_segments(cases);
    const auto inst = pf::segment_instances(kind, cases, pairs, field);
    double mean = 0.0;
    for (const auto& p : pairs) mean += p.gap;
    mean = pairs.empty() ? 0.0 : mean / static_cast<double>(pairs.size());
    pf::write_probeset(a.out, inst, {field.environment()},
                       {{"target", pf::kSegmentProbeTarget},
                        {"kind", std::string(pf::to_string(kind))},
                        {"seed", a.seed},
                        {"cases", cases.size()},
                        {"obstacle_size", field.obstacle_size},
                        {"mean_gap", mean}},
                       opt, write_png_file);
    std::cout << json{{"pairs", inst.size()}, {"mean_gap", mean}, {"out", a.out}}.dump() << "\n";
    return 0;
  }
  auto spec = pf::default_probe_spec(pf::parse_descriptor(a.descriptor));
  spec.pairs_per_threshold = a.pairs_per_tier;
  if (!a.thresholds.empty()) {
    std::stringstream ss(a.thresholds);
    std::string tok;
    std::size_t k = 0;
    while (std::getline(ss, tok, ',')) {
      if (k >= pf::kProbeTiers) throw pf::Error(pf::errc::kInvalidInput, "--thresholds takes three values");
      try {
        spec.thresholds[k++] = std::stod(tok);
      } catch (const std::exception&) {
        throw pf::Error(pf::errc::kInvalidInput, "bad threshold '" + tok + "'");
      }
    }
    if (k != pf::kProbeTiers) throw pf::Error(pf::errc::kInvalidInput, "--thresholds takes three values");
  }
  const auto pool = pf::load_pool(a.pool);
  const auto envs = pf::load_environments(fs::path(a.pool) / "envs");
  const auto set = pf::generate_probe_pairs(pool, spec, a.seed);
  const auto inst = pf::probe_instances(set, pool);
  json means = json::array();
  for (const auto& tier : set.tiers) {
    double m = 0.0;
    for (const auto& p : tier) m += p.gap;
    means.push_back(tier.empty() ? 0.0 : m / static_cast<double>(tier.size()));
  }
  pf::write_probeset(a.out, inst, envs,
                     {{"target", a.descriptor},
                      {"seed", a.seed},
                      {"thresholds", spec.thresholds},
                      {"pairs_per_threshold", spec.pairs_per_threshold},
                      {"mean_gap", means}},
                     opt, write_png_file);
  std::cout << json{{"pairs", inst.size()}, {"mean_gap", means}, {"out", a.out}}.dump() << "\n";
  return 0;
}

int run_audit(const std::string& dir) {
  const auto r = pf::audit_directory(dir);
  std::cout << json{{"instances", r.instances}, {"violations", r.violations}, {"ok", r.ok()}}.dump(2) << "\n";
  return r.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Prompts and evaluation

struct PromptArgs {
  std::string benchmark, mode = "image_only", variant = "default", out, split = "test", scenarios, predictions,
              endpoint, audit_log, predictions_out;
  std::uint64_t variant_seed = 0;
  unsigned runs = 5;
  double raster_dpi = 96.0;
};

std::vector<pf::BenchmarkInstance> load_split(const PromptArgs& a) {
  const fs::path dir(a.benchmark);
  if (a.split == "test") return pf::load_instances(dir / "instances.jsonl");
  if (a.split == "train") return pf::load_instances(dir / "train.jsonl");
  throw pf::Error(pf::errc::kInvalidInput, "--split must be test or train");
}

std::vector<pf::Scenario> benchmark_catalog(const PromptArgs& a) {
  if (!a.scenarios.empty()) return pf::load_catalog(a.scenarios);
  const fs::path f = fs::path(a.benchmark) / "scenarios.json";
  if (!a.benchmark.empty() && fs::exists(f)) return pf::load_catalog(f);
  return pf::scenario_catalog();
}

struct AbstractionPrompt {
  std::string id;
  int scenario_id;
  std::string text;
};

std::vector<AbstractionPrompt> abstraction_prompts(const std::vector<pf::Scenario>& catalog, unsigned runs) {
  std::vector<AbstractionPrompt> out;
  for (const auto& s : catalog)
    for (unsigned r = 0; r < runs; ++r)
      out.push_back({"abstraction-s" + std::to_string(s.id) + "-r" + std::to_string(r), s.id,
                     pf::build_abstraction_prompt(s)});
  return out;
}

int run_prompt(const PromptArgs& a) {
  const auto mode = pf::parse_prompt_mode(a.mode);
  const auto catalog = benchmark_catalog(a);
  std::vector<json> rows;
  if (mode == pf::PromptMode::attribute_abstraction) {
    for (const auto& p : abstraction_prompts(catalog, a.runs))
      rows.push_back({{"instance_id", p.id}, {"mode", a.mode}, {"scenario_id", p.scenario_id}, {"text", p.text}});
  } else {
    const auto variant = pf::parse_variant(a.variant, a.variant_seed);
    for (const auto& inst : load_split(a)) {
      const auto p = pf::build_prompt(inst, mode, variant, catalog);
      rows.push_back({{"instance_id", p.instance_id},
                      {"mode", a.mode},
                      {"variant", a.variant},
                      {"text", p.text},
                      {"images", p.images},
                      {"names", p.names},
                      {"expected", p.expected}});
    }
  }
  pf::write_jsonl(a.out, rows);
  std::cout << json{{"prompts", rows.size()}, {"out", a.out}}.dump() << "\n";
  return 0;
}

std::vector<pf::Prediction> query_predictions(const std::vector<pf::QueryRequest>& requests, const PromptArgs& a) {
  const auto cfg = pf::endpoint_config_from_json(pf::read_json(a.endpoint));
  std::optional<pf::AuditLog> log;
  if (!a.audit_log.empty()) log.emplace(a.audit_log);
  const pf::EndpointClient client(cfg, log ? &*log : nullptr);
  const auto results = client.query_all(requests);
  std::vector<pf::Prediction> preds;
  for (const auto& r : results) {
    pf::Prediction p{r.instance_id, r.text, ""};
    if (r.status != pf::QueryResult::Status::ok) p.error = std::string(pf::to_string(r.status)) + ": " + r.error;
    preds.push_back(std::move(p));
  }
  return preds;
}

int run_evaluate(const PromptArgs& a) {
  if (a.predictions.empty() == a.endpoint.empty())
    throw pf::Error(pf::errc::kInvalidInput, "evaluate takes exactly one of --predictions or --endpoint");
  const auto mode = pf::parse_prompt_mode(a.mode);
  const auto catalog = benchmark_catalog(a);

  if (mode == pf::PromptMode::attribute_abstraction) {
    const auto prompts = abstraction_prompts(catalog, a.runs);
    std::vector<pf::Prediction> preds;
    if (!a.predictions.empty()) {
      preds = pf::load_predictions(a.predictions);
    } else {
      std::vector<pf::QueryRequest> reqs;
      for (const auto& p : prompts) reqs.push_back({p.id, p.text, {}});
      preds = query_predictions(reqs, a);
    }
    std::map<std::string, const pf::Prediction*> by_id;
    for (const auto& p : preds) {
      if (!by_id.emplace(p.instance_id, &p).second)
        throw pf::Error(pf::errc::kIdMismatch, "duplicate prediction for " + p.instance_id);
    }
    std::vector<pf::AbstractionRun> runs;
    std::vector<json> records;
    std::size_t matched = 0;
    for (const auto& p : prompts) {
      pf::AbstractionRun run;
      run.scenario_id = p.scenario_id;
      auto it = by_id.find(p.id);
      if (it != by_id.end()) {
        ++matched;
        if (it->second->error.empty()) {
          const auto parsed = pf::parse_abstraction(it->second->raw_response);
          run.descriptors = parsed.descriptors;
          run.unknown = parsed.unknown;
        }
        json rec = pf::to_json(*it->second);
        json names = json::array();
        for (auto d : run.descriptors) names.push_back(std::string(pf::field_name(d)));
        rec["parsed_descriptors"] = names;
        records.push_back(std::move(rec));
      }
      runs.push_back(std::move(run));
    }
    if (!a.predictions_out.empty()) pf::write_jsonl(a.predictions_out, records);
    if (matched != by_id.size()) throw pf::Error(pf::errc::kIdMismatch, "predictions name unknown abstraction prompts");
    const auto report = pf::score_abstraction(runs, catalog);
    pf::write_json(a.out, pf::to_json(report));
    std::cout << json{{"average", report.average}, {"runs", report.runs}, {"out", a.out}}.dump() << "\n";
    return 0;
  }

  const auto variant = pf::parse_variant(a.variant, a.variant_seed);
  const auto instances = load_split(a);
  std::vector<pf::Prediction> preds;
  if (!a.predictions.empty()) {
    preds = pf::load_predictions(a.predictions);
  } else {
    std::map<std::string, pf::Environment> envs;
    for (auto& e : pf::load_environments(fs::path(a.benchmark) / "envs")) envs.emplace(e.id, std::move(e));
    std::vector<pf::QueryRequest> reqs;
    for (const auto& inst : instances) {
      const auto prompt = pf::build_prompt(inst, mode, variant, catalog);
      pf::QueryRequest q{inst.instance_id, prompt.text, {}};
      if (!prompt.images.empty()) {
        auto it = envs.find(inst.env_id);
        if (it == envs.end()) throw pf::Error(pf::errc::kIo, "environment " + inst.env_id + " missing from benchmark");
        const auto lists = pf::instance_display_lists(inst, it->second);
        const bool swapped = pf::present(inst, variant).swapped;
        q.images_png.push_back(pf::encode_png(pf::rasterize(lists[swapped ? 1 : 0], a.raster_dpi)));
        q.images_png.push_back(pf::encode_png(pf::rasterize(lists[swapped ? 0 : 1], a.raster_dpi)));
      }
      reqs.push_back(std::move(q));
    }
    preds = query_predictions(reqs, a);
  }
  const auto report = pf::score(instances, preds, variant, mode);
  if (!a.predictions_out.empty()) {
    std::map<std::string, const pf::BenchmarkInstance*> inst_by_id;
    for (const auto& inst : instances) inst_by_id.emplace(inst.instance_id, &inst);
    std::vector<json> rows;
    for (const auto& p : preds) {
      json rec = pf::to_json(p);
      std::optional<int> choice;
      if (p.error.empty()) choice = pf::parse_answer(p.raw_response, pf::present(*inst_by_id.at(p.instance_id), variant));
      rec["parsed_choice"] = choice ? json(*choice) : json("unparsed");
      rows.push_back(std::move(rec));
    }
    pf::write_jsonl(a.predictions_out, rows);
  }
  pf::write_json(a.out, pf::to_json(report));
  std::cout << json{{"accuracy", report.accuracy},
                    {"answered", report.answered},
                    {"instances", report.instances},
                    {"out", a.out}}
                   .dump()
            << "\n";
  return 0;
}

int run_report(const std::vector<std::string>& files, const std::string& out) {
  std::string table = "| report | mode | variant | accuracy | answered | first / second | unparsed | errored |\n";
  table += "|---|---|---|---|---|---|---|---|\n";
  std::map<std::string, std::map<std::string, double>> by_group;
  std::vector<std::string> names;
  for (const auto& f : files) {
    const json j = pf::read_json(f);
    const std::string name = fs::path(f).stem().string();
    names.push_back(name);
    if (j.value("mode", std::string()) == "attribute_abstraction") {
      table += "| " + name + " | attribute_abstraction | - | " + pf::repr_double(j.at("average").get<double>()) +
               " | " + std::to_string(j.at("runs").get<std::size_t>()) + " | - | - | - |\n";
      continue;
    }
    const auto r = pf::report_from_json(j);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.3f", r.accuracy);
    table += "| " + name + " | " + r.mode + " | " + r.variant + " | " + acc + " | " + std::to_string(r.answered) +
             "/" + std::to_string(r.instances) + " | " + std::to_string(r.choice_counts[0]) + " / " +
             std::to_string(r.choice_counts[1]) + " | " + std::to_string(r.unparsed) + " | " +
             std::to_string(r.errored) + " |\n";
    for (const auto& [k, g] : r.per_scenario) by_group[k][name] = g.accuracy();
  }
  if (!by_group.empty()) {
    table += "\n| group |";
    for (const auto& n : names) table += " " + n + " |";
    table += "\n|---|";
    for (std::size_t i = 0; i < names.size(); ++i) table += "---|";
    table += "\n";
    for (const auto& [k, row] : by_group) {
      table += "| " + k + " |";
      for (const auto& n : names) {
        auto it = row.find(n);
        char buf[32] = "-";
        if (it != row.end()) std::snprintf(buf, sizeof buf, "%.3f", it->second);
        table += std::string(" ") + buf + " |";
      }
      table += "\n";
    }
  }
  if (out.empty()) std::cout << table;
  else pf::write_text(out, table);
  return 0;
}

void emit_error(const std::string& command, const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}, {"command", command}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathforge: path-planning benchmark generation and evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file supplying option defaults");

  GenEnvArgs gen;
  auto* c_gen = app.add_subcommand("gen-env", "Generate environments");
  c_gen->add_option("--family", gen.family, "rings, waves, maze, random or all")->capture_default_str();
  c_gen->add_option("--count", gen.count, "Environments per family")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "First seed; environment i uses seed + i")->required();
  c_gen->add_option("--out", gen.out, "Output directory")->required();
  c_gen->add_option("--width", gen.width)->capture_default_str();
  c_gen->add_option("--height", gen.height)->capture_default_str();
  c_gen->add_option("--density", gen.density, "Obstacle density in (0, 1]")->capture_default_str();
  c_gen->add_option("--corridor", gen.corridor, "Minimum passage width")->capture_default_str();
  c_gen->add_option("--policy", gen.policy, "Start/goal placement: corners or random_free")->capture_default_str();
  c_gen->add_option("--jobs", gen.jobs)->capture_default_str();

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Sample RRT-Connect paths for every environment");
  c_plan->add_option("--envs", plan.envs)->required();
  c_plan->add_option("--out", plan.out)->required();
  c_plan->add_option("--runs", plan.runs)->capture_default_str();
  c_plan->add_option("--seed", plan.seed)->required();
  c_plan->add_option("--step", plan.step)->capture_default_str();
  c_plan->add_option("--inflation", plan.inflation)->capture_default_str();
  c_plan->add_option("--goal-tolerance", plan.goal_tolerance)->capture_default_str();
  c_plan->add_option("--max-iterations", plan.max_iterations)->capture_default_str();
  c_plan->add_option("--jobs", plan.jobs)->capture_default_str();

  DescribeArgs desc;
  auto* c_desc = app.add_subcommand("describe", "Compute descriptor records");
  c_desc->add_option("--paths", desc.paths)->required();
  c_desc->add_option("--envs", desc.envs)->required();
  c_desc->add_option("--out", desc.out)->required();
  c_desc->add_option("--densify", desc.densify, "Extra clearance samples every SPACING units (0 = waypoints only)")
      ->capture_default_str();

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-benchmark", "Pair, label, split and render a benchmark");
  c_build->add_option("--envs", build.envs)->required();
  c_build->add_option("--paths", build.paths)->required();
  c_build->add_option("--scenarios", build.scenarios, "Scenario catalog file (default: built-in)");
  c_build->add_option("--per-scenario", build.per_scenario)->capture_default_str();
  c_build->add_option("--pairs", build.pairs, "Pairs selected per environment")->capture_default_str();
  c_build->add_option("--seed", build.seed)->required();
  c_build->add_option("--out", build.out)->required();
  c_build->add_option("--raster-dpi", build.raster_dpi, "Also write PNG renders at this DPI")->capture_default_str();
  c_build->add_option("--densify", build.densify)->capture_default_str();
  c_build->add_flag("--render-train", build.render_train, "Render train instances too");
  c_build->add_option("--jobs", build.jobs)->capture_default_str();

  ProbeArgs probe;
  auto* c_probe = app.add_subcommand("build-probeset", "Synthesize fine-grained perception probes");
  c_probe->add_option("--pool", probe.pool, "Benchmark directory whose pool.jsonl supplies paths");
  auto* o_desc = c_probe->add_option("--descriptor", probe.descriptor, "Descriptor to probe");
  auto* o_seg = c_probe->add_option("--segments", probe.segments, "Segment kind: point, line or curve");
  o_desc->excludes(o_seg);
  c_probe->add_option("--thresholds", probe.thresholds, "Three comma-separated tier gaps");
  c_probe->add_option("--pairs-per-tier", probe.pairs_per_tier)->capture_default_str();
  c_probe->add_option("--count", probe.count, "Segment cases to sample")->capture_default_str();
  c_probe->add_option("--seed", probe.seed)->required();
  c_probe->add_option("--out", probe.out)->required();
  c_probe->add_option("--raster-dpi", probe.raster_dpi)->capture_default_str();
  c_probe->add_option("--jobs", probe.jobs)->capture_default_str();

  std::string audit_dir;
  auto* c_audit = app.add_subcommand("audit", "Re-verify every instance of a benchmark or probe directory");
  c_audit->add_option("--benchmark", audit_dir)->required();

  PromptArgs pr;
  auto* c_prompt = app.add_subcommand("prompt", "Write prompt records");
  c_prompt->add_option("--benchmark", pr.benchmark);
  c_prompt->add_option("--mode", pr.mode)->capture_default_str();
  c_prompt->add_option("--variant", pr.variant, "default, flipped or random_ids")->capture_default_str();
  c_prompt->add_option("--variant-seed", pr.variant_seed)->capture_default_str();
  c_prompt->add_option("--split", pr.split)->capture_default_str();
  c_prompt->add_option("--scenarios", pr.scenarios);
  c_prompt->add_option("--runs", pr.runs, "Repetitions per scenario (attribute_abstraction)")->capture_default_str();
  c_prompt->add_option("--out", pr.out)->required();

  PromptArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score predictions or query an endpoint");
  c_eval->add_option("--benchmark", ev.benchmark);
  c_eval->add_option("--predictions", ev.predictions, "JSON-lines {instance_id, raw_response}");
  c_eval->add_option("--endpoint", ev.endpoint, "Endpoint config file");
  c_eval->add_option("--audit-log", ev.audit_log, "Append request/response pairs here");
  c_eval->add_option("--predictions-out", ev.predictions_out, "Write per-instance records with the parsed choice");
  c_eval->add_option("--mode", ev.mode)->capture_default_str();
  c_eval->add_option("--variant", ev.variant)->capture_default_str();
  c_eval->add_option("--variant-seed", ev.variant_seed)->capture_default_str();
  c_eval->add_option("--split", ev.split)->capture_default_str();
  c_eval->add_option("--scenarios", ev.scenarios);
  c_eval->add_option("--runs", ev.runs)->capture_default_str();
  c_eval->add_option("--raster-dpi", ev.raster_dpi)->capture_default_str();
  c_eval->add_option("--out", ev.out)->required();

  std::vector<std::string> report_files;
  std::string report_out;
  auto* c_report = app.add_subcommand("report", "Merge reports into comparison tables");
  c_report->add_option("--reports", report_files)->required();
  c_report->add_option("--out", report_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto parsed = app.get_subcommands();
    emit_error(parsed.empty() ? "" : parsed.front()->get_name(), "usage", e.what());
    return 1;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (*c_gen) return run_gen_env(gen);
    if (*c_plan) return run_plan(plan);
    if (*c_desc) return run_describe(desc);
    if (*c_build) return run_build_benchmark(build);
    if (*c_probe) {
      if (probe.descriptor.empty() == probe.segments.empty())
        throw pf::Error(pf::errc::kInvalidInput, "build-probeset takes exactly one of --descriptor or --segments");
      if (!probe.descriptor.empty() && probe.pool.empty())
        throw pf::Error(pf::errc::kInvalidInput, "--descriptor probes need --pool");
      return run_build_probeset(probe);
    }
    if (*c_audit) return run_audit(audit_dir);
    if (*c_prompt) return run_prompt(pr);
    if (*c_eval) return run_evaluate(ev);
    if (*c_report) return run_report(report_files, report_out);
  } catch (const pf::Error& e) {
    emit_error(cmd, e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(cmd, "internal", e.what());
    return 1;
  }
  return 1;
}
