#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pathforge/geometry.hpp"

using namespace pathforge;

TEST(DistPointSegment, Examples) {
  EXPECT_DOUBLE_EQ(dist_point_segment({0, 0}, {1, 0}, {1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(dist_point_segment({0.5, 0}, {0, 0}, {1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(dist_point_segment({0, 2}, {-1, 0}, {1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(dist_point_segment({3, 4}, {0, 0}, {0, 0}), 5.0);
}

TEST(DistPointSegment, MatchesDenseSampling) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 10000; ++k) {
    const Point p{u(g), u(g)}, a{u(g), u(g)}, b{u(g), u(g)};
    // Sample spacing <= 2e-3, so the sampled minimum is within 1e-3.
    ASSERT_NEAR(dist_point_segment(p, a, b), oracle::sampled_seg_dist(p, a, b, 10000), 1e-3);
  }
}

TEST(DistPointObstacle, Examples) {
  const Obstacle sq = oracle::square(2, -1, 3, 1);
  EXPECT_DOUBLE_EQ(dist_point_obstacle({0, 0}, sq), 2.0);
  EXPECT_DOUBLE_EQ(dist_point_obstacle({3, 1}, sq), 0.0);
  const Obstacle tri{{{0, 0}, {1, 0}, {0, 1}}};
  double sampled = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i)
    sampled = std::min(sampled, oracle::sampled_seg_dist({5, 5}, tri.vertices[i], tri.vertices[(i + 1) % 3], 100000));
  EXPECT_NEAR(dist_point_obstacle({5, 5}, tri), sampled, 1e-9);
}

TEST(DistPointObstacle, ZeroExactlyOnBoundary) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const Obstacle o = oracle::random_star(g, {0, 0}, 1.0, 3.0, 9);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t e = g() % o.vertices.size();
    const Point a = o.vertices[e], b = o.vertices[(e + 1) % o.vertices.size()];
    const double s = t(g);
    const Point on{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
    EXPECT_NEAR(dist_point_obstacle(on, o), 0.0, 1e-9);
    const Point off{on.x + 0.01 * (b.y - a.y), on.y - 0.01 * (b.x - a.x)};
    EXPECT_GT(dist_point_obstacle(off, o), 1e-9);
  }
}

TEST(SegmentHitsObstacle, Examples) {
  const Obstacle sq = oracle::square(4, -1, 6, 1);
  EXPECT_TRUE(segment_hits_obstacle({0, 0}, {10, 0}, sq, 0.0));
  EXPECT_FALSE(segment_hits_obstacle({0, 5}, {10, 5}, sq, 0.0));
  EXPECT_TRUE(segment_hits_obstacle({0, 1.5}, {10, 1.5}, sq, 1.0));
  EXPECT_FALSE(segment_hits_obstacle({0, 1.5}, {10, 1.5}, sq, 0.4));
  // Entirely inside counts as a hit.
  EXPECT_TRUE(segment_hits_obstacle({4.5, 0}, {5.5, 0}, sq, 0.0));
}

TEST(SegmentHitsObstacle, SymmetricAndAgreesWithSampling) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  const Obstacle o = oracle::random_star(g, {0, 0}, 1.0, 4.0, 12);
  Environment env;
  env.width = env.height = 100;
  env.obstacles = {o};
  for (int k = 0; k < 2000; ++k) {
    const Point a{u(g), u(g)}, b{u(g), u(g)};
    const bool ab = segment_hits_obstacle(a, b, o, 0.0);
    ASSERT_EQ(ab, segment_hits_obstacle(b, a, o, 0.0));
    std::uniform_real_distribution<double> infl(0.0, 1.0);
    const double r = infl(g);
    const bool hit = segment_hits_obstacle(a, b, o, r);
    ASSERT_EQ(hit, segment_hits_obstacle(b, a, o, r));
    // Exact minimum distance between ab and the boundary, from sampled points.
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
      const double t = i / 2000.0;
      dmin = std::min(dmin, oracle::boundary_dist({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, o));
    }
    const bool inside = oracle::winding_number(a, o) != 0 || oracle::winding_number(b, o) != 0;
    const double slack = std::hypot(b.x - a.x, b.y - a.y) / 2000.0;
    if (inside || dmin < r - 1e-12) {
      ASSERT_TRUE(hit) << k;
    } else if (dmin > r + slack) {
      ASSERT_FALSE(hit) << k;
    }
  }
}

TEST(TurnAngle, Examples) {
  EXPECT_DOUBLE_EQ(turn_angle({0, 0}, {1, 0}, {2, 0}), 0.0);
  EXPECT_DOUBLE_EQ(turn_angle({0, 0}, {1, 0}, {1, 1}), 90.0);
  EXPECT_DOUBLE_EQ(turn_angle({0, 0}, {1, 0}, {0, 0}), 180.0);
}

TEST(TurnAngle, DegenerateInputIsAnError) {
  try {
    turn_angle({1, 1}, {1, 1}, {2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::kDegenerateAngle);
  }
  EXPECT_THROW(turn_angle({0, 0}, {1, 1}, {1, 1}), Error);
}

TEST(TurnAngle, RigidMotionAndScaleInvariant) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ang(0.0, 6.283185307179586), sc(0.1, 10.0);
  for (int k = 0; k < 5000; ++k) {
    const Point p0{u(g), u(g)}, p1{u(g), u(g)}, p2{u(g), u(g)};
    const double th = ang(g), s = sc(g), tx = u(g), ty = u(g);
    auto f = [&](Point p) {
      return Point{s * (std::cos(th) * p.x - std::sin(th) * p.y) + tx, s * (std::sin(th) * p.x + std::cos(th) * p.y) + ty};
    };
    const double base = turn_angle(p0, p1, p2);
    ASSERT_NEAR(base, oracle::heading_turn(p0, p1, p2), 1e-9);
    ASSERT_NEAR(turn_angle(f(p0), f(p1), f(p2)), base, 1e-9);
  }
}

TEST(PointInObstacle, Examples) {
  const Obstacle sq = oracle::square(0, 0, 2, 2);
  EXPECT_TRUE(point_in_obstacle({1, 1}, sq));
  EXPECT_FALSE(point_in_obstacle({5, 5}, sq));
  EXPECT_FALSE(point_in_obstacle({2, 1}, sq));  // boundary is not inside
  EXPECT_FALSE(point_in_obstacle({0, 0}, sq));
}

TEST(PointInObstacle, MatchesWindingNumber) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int poly = 0; poly < 10; ++poly) {
    const Obstacle o = oracle::random_star(g, {0, 0}, 0.5, 4.5, 5 + poly * 3);
    ASSERT_TRUE(is_simple(o));
    for (int k = 0; k < 1000; ++k) {
      const Point p{u(g), u(g)};
      if (oracle::boundary_dist(p, o) < 1e-12) continue;
      ASSERT_EQ(point_in_obstacle(p, o), oracle::winding_number(p, o) != 0);
    }
  }
}

TEST(IsSimple, DetectsSelfIntersection) {
  EXPECT_TRUE(is_simple(oracle::square(0, 0, 1, 1)));
  const Obstacle bow{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  EXPECT_FALSE(is_simple(bow));
}

TEST(ObstacleIndex, AgreesWithLinearScan) {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::vector<Obstacle> obs;
  for (int i = 0; i < 40; ++i) {
    const double x = u(g), y = u(g);
    obs.push_back(oracle::square(x, y, x + 1.5, y + 0.7));
  }
  const ObstacleIndex idx(obs);
  for (int k = 0; k < 3000; ++k) {
    const Point a{u(g), u(g)}, b{u(g), u(g)};
    ASSERT_EQ(idx.segment_free(a, b, 0.25), segment_is_free(a, b, obs, 0.25));
    ASSERT_EQ(idx.point_free(a, 0.25), point_is_free(a, obs, 0.25));
  }
}
