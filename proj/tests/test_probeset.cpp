#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pathforge/probeset.hpp"

using namespace pathforge;

namespace {

std::vector<PoolEntry> smoothness_pool(std::size_t n, std::uint64_t seed, int envs = 2) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0, 1000);
  std::vector<PoolEntry> pool;
  for (std::size_t i = 0; i < n; ++i) {
    PoolEntry e;
    e.path.env_id = "env" + std::to_string(i % envs);
    e.path.id = e.path.env_id + "-r" + std::to_string(i);
    e.path.run_index = static_cast<std::int64_t>(i);
    e.descriptors.smoothness = u(g);
    pool.push_back(e);
  }
  return pool;
}

SegmentCase make_case(std::vector<Point> control) {
  SegmentCase s;
  s.kind = control.size() == 1 ? SegmentKind::point : control.size() == 2 ? SegmentKind::line : SegmentKind::curve;
  s.control = std::move(control);
  return s;
}

std::vector<SegmentCase> with_clearances(std::vector<double> c) {
  std::vector<SegmentCase> out;
  for (double v : c) {
    SegmentCase s;
    s.control = {{0, 0}};
    s.clearance = v;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(ProbeSpec, DefaultsAndValidation) {
  const auto s = default_probe_spec(DescriptorId::avg_clearance);
  EXPECT_EQ(s.thresholds, (std::array<double, 3>{1.0, 2.5, 5.0}));
  EXPECT_EQ(s.pairs_per_threshold, 50u);
  EXPECT_EQ(default_probe_spec(DescriptorId::smoothness).thresholds, (std::array<double, 3>{100, 200, 300}));
  EXPECT_EQ(default_probe_spec(DescriptorId::path_length).thresholds, (std::array<double, 3>{50, 75, 100}));
  EXPECT_EQ(default_probe_spec(DescriptorId::max_angle).thresholds, (std::array<double, 3>{30, 60, 90}));
  EXPECT_EQ(default_probe_spec(DescriptorId::min_clearance).thresholds, (std::array<double, 3>{1, 2, 3}));
  EXPECT_EQ(default_probe_spec(DescriptorId::max_clearance).thresholds, (std::array<double, 3>{1, 2, 3}));
  EXPECT_EQ(default_probe_spec(DescriptorId::sharp_turns).thresholds, (std::array<double, 3>{1, 2, 3}));
  auto bad = s;
  bad.thresholds = {2, 2, 3};
  EXPECT_THROW(check_probe_spec(bad), Error);
}

TEST(ProbePairs, StrictGapsAndSmallerSide) {
  const auto pool = smoothness_pool(120, 3);
  const auto spec = default_probe_spec(DescriptorId::smoothness);
  const auto set = generate_probe_pairs(pool, spec, 7);
  std::array<double, 3> means{};
  for (std::size_t k = 0; k < 3; ++k) {
    ASSERT_EQ(set.tiers[k].size(), 50u);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& p : set.tiers[k]) {
      const double a = pool[p.first].descriptors.smoothness, b = pool[p.second].descriptors.smoothness;
      EXPECT_GT(std::abs(a - b), spec.thresholds[k]);
      EXPECT_EQ(p.gap, std::abs(a - b));
      EXPECT_EQ(p.smaller, a < b ? 1 : 2);
      EXPECT_EQ(pool[p.first].path.env_id, pool[p.second].path.env_id);
      EXPECT_TRUE(seen.insert(std::minmax(p.first, p.second)).second);  // without replacement
      means[k] += p.gap / 50.0;
    }
  }
  EXPECT_LE(means[0], means[1]);
  EXPECT_LE(means[1], means[2]);
}

TEST(ProbePairs, Deterministic) {
  const auto pool = smoothness_pool(80, 5);
  const auto spec = default_probe_spec(DescriptorId::smoothness);
  const auto a = generate_probe_pairs(pool, spec, 1), b = generate_probe_pairs(pool, spec, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    ASSERT_EQ(a.tiers[k].size(), b.tiers[k].size());
    for (std::size_t i = 0; i < a.tiers[k].size(); ++i) {
      EXPECT_EQ(a.tiers[k][i].first, b.tiers[k][i].first);
      EXPECT_EQ(a.tiers[k][i].second, b.tiers[k][i].second);
    }
  }
}

TEST(ProbePairs, QuotaShortfallReportsCounts) {
  std::vector<PoolEntry> pool(2);
  pool[0].path.env_id = pool[1].path.env_id = "e";
  pool[0].descriptors.smoothness = 10;
  pool[1].descriptors.smoothness = 160;
  auto spec = default_probe_spec(DescriptorId::smoothness);
  spec.pairs_per_threshold = 1;
  try {
    generate_probe_pairs(pool, spec, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::kQuotaUnreachable);
    EXPECT_NE(std::string(e.what()).find("1 0 0"), std::string::npos) << e.what();
  }
  // Pairs across environments are never formed.
  pool[1].path.env_id = "other";
  spec.thresholds = {1, 2, 3};
  EXPECT_THROW(generate_probe_pairs(pool, spec, 0), Error);
}

TEST(Segments, ClearanceExamples) {
  const SegmentField f;
  const Obstacle o = f.obstacle();
  EXPECT_DOUBLE_EQ(segment_clearance(make_case({{25, 45}}), o), 15.0);
  // Endpoints 3 and 9 units from the square's left edge at x = 20.
  EXPECT_DOUBLE_EQ(segment_clearance(make_case({{17, 25}, {11, 25}}), o), 3.0);
  const auto curve = make_case({{5, 5}, {25, 5}, {45, 5}});
  EXPECT_DOUBLE_EQ(segment_clearance(curve, o), std::min(oracle::boundary_dist({5, 5}, o), oracle::boundary_dist({45, 5}, o)));
}

TEST(Segments, GeneratedCasesAreCollisionFree) {
  const SegmentField f;
  Environment env = f.environment();
  for (auto kind : {SegmentKind::point, SegmentKind::line, SegmentKind::curve}) {
    const auto cases = generate_segment_cases(kind, 200, 11, f);
    ASSERT_EQ(cases.size(), 200u);
    for (const auto& c : cases) {
      const auto pts = segment_polyline(c, f.curve_steps);
      ASSERT_EQ(pts.size(), kind == SegmentKind::point ? 1u : kind == SegmentKind::line ? 2u : 65u);
      if (pts.size() == 1) {
        EXPECT_EQ(oracle::winding_number(pts[0], env.obstacles[0]), 0);
      }
      for (std::size_t i = 1; i < pts.size(); ++i)
        ASSERT_TRUE(oracle::sampled_segment_free(pts[i - 1], pts[i], env, 0.0, 0.02));
      EXPECT_NEAR(c.clearance, std::min(oracle::boundary_dist(c.control.front(), env.obstacles[0]),
                                        oracle::boundary_dist(c.control.back(), env.obstacles[0])),
                  1e-12);
    }
    EXPECT_EQ(cases, generate_segment_cases(kind, 200, 11, f));
  }
}

TEST(Segments, GreedyTrace) {
  const auto pairs = pair_segments(with_clearances({1, 2, 10, 11}));
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].first, 0u);
  EXPECT_EQ(pairs[0].second, 3u);
  EXPECT_DOUBLE_EQ(pairs[0].gap, 10.0);
  EXPECT_EQ(pairs[0].closer, 1);
  EXPECT_EQ(pairs[1].first, 1u);
  EXPECT_EQ(pairs[1].second, 2u);
  EXPECT_DOUBLE_EQ(pairs[1].gap, 8.0);
}

TEST(Segments, TiesAreNotEmitted) {
  EXPECT_TRUE(pair_segments(with_clearances({4, 4, 4, 4})).empty());
  EXPECT_THROW(pair_segments(with_clearances({1, 2, 3})), Error);
}

TEST(Segments, MeanGapOnSeededCases) {
  for (auto kind : {SegmentKind::point, SegmentKind::line, SegmentKind::curve}) {
    const auto cases = generate_segment_cases(kind, 200, 2024);
    const auto pairs = pair_segments(cases);
    std::set<std::size_t> used;
    double mean = 0;
    for (const auto& p : pairs) {
      EXPECT_GT(p.gap, 0.0);
      EXPECT_TRUE(used.insert(p.first).second);
      EXPECT_TRUE(used.insert(p.second).second);
      EXPECT_EQ(p.closer, cases[p.first].clearance < cases[p.second].clearance ? 1 : 2);
      mean += p.gap;
    }
    mean /= static_cast<double>(pairs.size());
    EXPECT_GT(mean, 5.0) << to_string(kind);
  }
}
