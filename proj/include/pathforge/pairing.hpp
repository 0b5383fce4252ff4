#ifndef PATHFORGE_PAIRING_HPP
#define PATHFORGE_PAIRING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathforge/descriptors.hpp"
#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/planner.hpp"
#include "pathforge/rng.hpp"
#include "pathforge/scenarios.hpp"

namespace pathforge {

using NormalizedVector = std::array<double, kDescriptorCount>;

struct CandidatePair {
  std::size_t a = 0;  // index into the normalized list, a < b
  std::size_t b = 0;
  double distance = 0.0;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// Present on probe records in place of a scenario.
struct ProbeInfo {
  std::string target;  // descriptor field name, or "segment_clearance"
  std::string kind;    // segment kind for segment probes, else empty
  int tier = 0;        // 1..3 for descriptor probes, 0 for segments
  double epsilon = 0.0;

  friend bool operator==(const ProbeInfo&, const ProbeInfo&) = default;
};

inline constexpr const char* kSegmentProbeTarget = "segment_clearance";

/// One labeled task: an environment, two paths, one scenario (or one probe).
struct BenchmarkInstance {
  std::string instance_id;
  std::string env_id;
  int scenario_id = 0;
  Path path_1;
  Path path_2;
  DescriptorVector descriptors_1;
  DescriptorVector descriptors_2;
  int ground_truth = 0;  // 1 or 2
  std::string split;     // "test", "train" or empty before assembly
  std::optional<ProbeInfo> probe;

  friend bool operator==(const BenchmarkInstance&, const BenchmarkInstance&) = default;
};

/// Per-column min-max scaling; a constant column maps to 0.
inline std::vector<NormalizedVector> normalize(const std::vector<DescriptorVector>& vectors) {
  if (vectors.empty()) throw Error(errc::kInvalidInput, "normalize needs at least one vector");
  std::array<double, kDescriptorCount> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& v : vectors) {
    const auto a = v.as_array();
    for (std::size_t k = 0; k < kDescriptorCount; ++k) {
      lo[k] = std::min(lo[k], a[k]);
      hi[k] = std::max(hi[k], a[k]);
    }
  }
  std::vector<NormalizedVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    const auto a = v.as_array();
    NormalizedVector n{};
    for (std::size_t k = 0; k < kDescriptorCount; ++k) {
      const double span = hi[k] - lo[k];
      n[k] = span > 0.0 ? std::clamp((a[k] - lo[k]) / span, 0.0, 1.0) : 0.0;
    }
    out.push_back(n);
  }
  return out;
}

inline double normalized_distance(const NormalizedVector& u, const NormalizedVector& v) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < kDescriptorCount; ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
  return std::sqrt(s);
}

/// Greedy disjoint selection of the k most distant pairs. Ties go to the
/// lexicographically smaller index pair.
inline std::vector<CandidatePair> select_pairs(const std::vector<NormalizedVector>& vectors, unsigned k = 5) {
  if (vectors.size() < 2) throw Error(errc::kInvalidInput, "select_pairs needs at least two vectors");
  std::vector<CandidatePair> all;
  all.reserve(vectors.size() * (vectors.size() - 1) / 2);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j)
      all.push_back({i, j, normalized_distance(vectors[i], vectors[j])});
  std::stable_sort(all.begin(), all.end(),
                   [](const CandidatePair& x, const CandidatePair& y) { return x.distance > y.distance; });
  std::vector<bool> used(vectors.size(), false);
  std::vector<CandidatePair> out;
  for (const auto& c : all) {
    if (out.size() >= k) break;
    if (used[c.a] || used[c.b]) continue;
    used[c.a] = used[c.b] = true;
    out.push_back(c);
  }
  return out;
}

inline std::string instance_id(const std::string& env_id, const Path& p1, const Path& p2, int scenario_id) {
  return env_id + "-r" + std::to_string(p1.run_index) + "-r" + std::to_string(p2.run_index) + "-s" +
         std::to_string(scenario_id);
}

/// Labels every selected pair under every scenario and keeps the decided ones.
/// `paths` and `descriptors` are parallel lists of successful runs of one environment.
inline std::vector<BenchmarkInstance> build_instances(const Environment& env, const std::vector<Path>& paths,
                                                      const std::vector<DescriptorVector>& descriptors,
                                                      const std::vector<Scenario>& scenarios,
                                                      const SignificanceThresholds& thresholds, unsigned k = 5) {
  if (paths.size() != descriptors.size())
    throw Error(errc::kInvalidInput, "paths and descriptors differ in length");
  for (const auto& p : paths)
    if (p.env_id != env.id)
      throw Error(errc::kPathEnvMismatch, "path " + p.id + " belongs to " + p.env_id + ", not " + env.id);
  std::vector<BenchmarkInstance> out;
  if (paths.size() < 2) return out;
  const auto pairs = select_pairs(normalize(descriptors), k);
  for (const auto& c : pairs) {
    // Path 1 is the member with the smaller run index.
    std::size_t i = c.a, j = c.b;
    if (paths[j].run_index < paths[i].run_index) std::swap(i, j);
    for (const auto& s : scenarios) {
      const Label l = label(descriptors[i], descriptors[j], s, thresholds);
      if (!l.accepted()) continue;
      BenchmarkInstance inst;
      inst.instance_id = instance_id(env.id, paths[i], paths[j], s.id);
      inst.env_id = env.id;
      inst.scenario_id = s.id;
      inst.path_1 = paths[i];
      inst.path_2 = paths[j];
      inst.descriptors_1 = descriptors[i];
      inst.descriptors_2 = descriptors[j];
      inst.ground_truth = l.side();
      out.push_back(std::move(inst));
    }
  }
  return out;
}

struct BenchmarkSplit {
  std::vector<BenchmarkInstance> test;
  std::vector<BenchmarkInstance> train;
};

/// Seeded uniform draw of `per_scenario` test instances for each scenario;
/// everything else goes to train. Both keep input order.
inline BenchmarkSplit assemble_benchmark(const std::vector<BenchmarkInstance>& instances,
                                         const std::vector<Scenario>& scenarios, unsigned per_scenario,
                                         std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_scenario;
  for (const auto& s : scenarios) by_scenario[s.id];
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto it = by_scenario.find(instances[i].scenario_id);
    if (it == by_scenario.end())
      throw Error(errc::kInvalidInput, "instance " + instances[i].instance_id + " has unknown scenario " +
                                           std::to_string(instances[i].scenario_id));
    it->second.push_back(i);
  }
  std::vector<bool> in_test(instances.size(), false);
  for (auto& [sid, idx] : by_scenario) {
    if (idx.size() < per_scenario)
      throw Error(errc::kInsufficientInstances, "scenario " + std::to_string(sid) + " has " +
                                                    std::to_string(idx.size()) + " instances, " +
                                                    std::to_string(per_scenario) + " required");
    Rng rng(seed, "split:scenario-" + std::to_string(sid));
    // Partial Fisher-Yates: the first per_scenario slots form the sample.
    for (std::size_t t = 0; t < per_scenario; ++t) {
      const std::size_t r = t + static_cast<std::size_t>(rng.below(idx.size() - t));
      std::swap(idx[t], idx[r]);
      in_test[idx[t]] = true;
    }
  }
  BenchmarkSplit out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    BenchmarkInstance inst = instances[i];
    inst.split = in_test[i] ? "test" : "train";
    (in_test[i] ? out.test : out.train).push_back(std::move(inst));
  }
  return out;
}

}  // namespace pathforge

#endif  // PATHFORGE_PAIRING_HPP
