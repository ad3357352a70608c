#include <gtest/gtest.h>

#include "fedmap/error.hpp"
#include "fedmap/geo.hpp"
#include "test_support.hpp"

namespace fedmap {
namespace {

TEST(GeoPoint, NormalizesLongitude) {
  EXPECT_DOUBLE_EQ(GeoPoint(10, 180).lon(), -180.0);
  EXPECT_DOUBLE_EQ(GeoPoint(10, 190).lon(), -170.0);
  EXPECT_DOUBLE_EQ(GeoPoint(10, -190).lon(), 170.0);
  EXPECT_DOUBLE_EQ(GeoPoint(10, 540).lon(), -180.0);
  EXPECT_DOUBLE_EQ(GeoPoint(10, 45).lon(), 45.0);
}

TEST(GeoPoint, RejectsBadInput) {
  EXPECT_THROW(GeoPoint(91, 0), ContractViolation);
  EXPECT_THROW(GeoPoint(std::nan(""), 0), ContractViolation);
  EXPECT_THROW(GeoPoint(0, INFINITY), ContractViolation);
}

TEST(Geometry, SquareContainment) {
  const Polygon sq{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  EXPECT_TRUE(polygon_contains(sq, {5, 5}));
  EXPECT_TRUE(polygon_contains(sq, {10, 5}));
  EXPECT_TRUE(polygon_contains(sq, {0, 0}));
  EXPECT_FALSE(polygon_contains(sq, {11, 5}));
  EXPECT_TRUE(polygon_contains(sq, {10.005, 5}, 0.01));
  EXPECT_FALSE(polygon_contains(sq, {10.02, 5}, 0.01));
}

TEST(Geometry, ContainmentMatchesWindingNumber) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-12, 12);
  for (int k = 0; k < 50; ++k) {
    const Polygon poly = testing::random_star_polygon(rng, {0, 0}, 2, 10);
    ASSERT_TRUE(is_simple_polygon(poly));
    for (int i = 0; i < 1000; ++i) {
      const Point2 p{u(rng), u(rng)};
      EXPECT_EQ(polygon_contains(poly, p), testing::winding_number(poly, p) != 0);
    }
  }
}

TEST(Geometry, SimplePolygonCheck) {
  EXPECT_TRUE(is_simple_polygon(Polygon{{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 0}}));
  EXPECT_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 1}, {2, 2}}));            // zero area
  EXPECT_FALSE(is_simple_polygon(Polygon{{0, 0}, {2, 2}, {2, 0}, {0, 2}}));    // bow tie
  EXPECT_FALSE(is_simple_polygon(Polygon{{0, 0}, {0, 0}, {1, 0}, {0, 1}}));    // repeated vertex
  EXPECT_FALSE(is_simple_polygon(Polygon{{0, 0}, {4, 0}, {2, 0}, {2, 3}}));    // folds back
}

TEST(Geometry, RectPolygonPredicates) {
  const Polygon tri{{0, 0}, {10, 0}, {0, 10}};
  EXPECT_TRUE(rect_intersects_polygon({1, 1, 2, 2}, tri));
  EXPECT_TRUE(rect_inside_polygon({1, 1, 2, 2}, tri));
  EXPECT_TRUE(rect_intersects_polygon({4, 4, 8, 8}, tri));
  EXPECT_FALSE(rect_inside_polygon({4, 4, 8, 8}, tri));
  EXPECT_FALSE(rect_intersects_polygon({6, 6, 8, 8}, tri));
  EXPECT_TRUE(rect_intersects_polygon({-5, -5, 20, 20}, tri));  // polygon inside rect
  EXPECT_FALSE(rect_inside_polygon({-5, -5, 20, 20}, tri));
  EXPECT_TRUE(rect_intersects_polygon({10, -1, 11, 0}, tri));   // touches a vertex
}

TEST(Geometry, ClipSegment) {
  const Rect r{0, 0, 10, 10};
  auto c = clip_segment({-5, 5}, {15, 5}, r);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->first, (Point2{0, 5}));
  EXPECT_EQ(c->second, (Point2{10, 5}));
  EXPECT_FALSE(clip_segment({-5, -5}, {-1, 20}, r));
  auto inside = clip_segment({1, 1}, {2, 2}, r);
  ASSERT_TRUE(inside);
  EXPECT_EQ(inside->first, (Point2{1, 1}));
  // Crossing a corner region without entering.
  EXPECT_FALSE(clip_segment({-1, 9}, {1, 12}, r));
}

TEST(Geometry, ClippedEndpointsStayInRect) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 30);
  const Rect r{0.3, -1.7, 7.9, 4.1};
  for (int i = 0; i < 5000; ++i) {
    auto c = clip_segment({u(rng), u(rng)}, {u(rng), u(rng)}, r);
    if (!c) continue;
    EXPECT_TRUE(r.contains(c->first));
    EXPECT_TRUE(r.contains(c->second));
  }
}

TEST(Geometry, DistanceIsSymmetric) {
  const Point2 a{-79.99, 40.44};
  const Point2 b{-79.98, 40.45};
  EXPECT_EQ(frame_distance_m(a, b, true), frame_distance_m(b, a, true));
  EXPECT_NEAR(frame_distance_m({0, 0}, {0, 1}, true), kMetersPerDegree, 1e-6);
  EXPECT_DOUBLE_EQ(frame_distance_m({0, 0}, {3, 4}, false), 5.0);
}

}  // namespace
}  // namespace fedmap
