#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contournet/decode.hpp"
#include "contournet/label_gen.hpp"
#include "oracles.hpp"

using namespace contournet;

namespace {

FloatGrid row(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return FloatGrid(1, n, std::move(v));
}

FloatGrid random_map(std::mt19937_64& rng, int h, int w, int levels) {
  // Few distinct levels so ties are common.
  std::uniform_int_distribution<int> level(0, levels - 1);
  FloatGrid g(h, w);
  for (double& v : g.values()) v = level(rng) / static_cast<double>(levels);
  return g;
}

bool has_vertex(const Polygon& p, const Point2& q) {
  return std::find(p.vertices.begin(), p.vertices.end(), q) != p.vertices.end();
}

}  // namespace

TEST(DirectionalNms, Fixtures) {
  EXPECT_EQ(directional_nms(row({0.1, 0.9, 0.2}), Orientation::kHorizontal, 3), row({0, 0.9, 0}));
  EXPECT_EQ(directional_nms(row({0.5, 0.5, 0.5}), Orientation::kHorizontal, 3), row({0.5, 0, 0}));
  EXPECT_EQ(directional_nms(row({0.5, 0.5, 0.5}), Orientation::kHorizontal, 3, NmsTies::kKeepAll),
            row({0.5, 0.5, 0.5}));
  const FloatGrid g = row({0.3, 0.1, 0.7, 0.7});
  EXPECT_EQ(directional_nms(g, Orientation::kHorizontal, 1), g);
  EXPECT_THROW(directional_nms(g, Orientation::kHorizontal, 2), InvalidConfig);
  EXPECT_THROW(directional_nms(g, Orientation::kHorizontal, 3, NmsTies::kFirstWins, 0.1), InvalidConfig);
}

TEST(DirectionalNms, ToleranceKeepsNearMaxima) {
  EXPECT_EQ(directional_nms(row({0.8, 0.9, 0.85}), Orientation::kHorizontal, 3, NmsTies::kKeepAll, 0.1),
            row({0.8, 0.9, 0.85}));
  EXPECT_EQ(directional_nms(row({0.7, 0.9, 0.85}), Orientation::kHorizontal, 3, NmsTies::kKeepAll, 0.1),
            row({0, 0.9, 0.85}));
}

TEST(DirectionalNms, MatchesBruteForceOnRandomGrids) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim(1, 32), widx(0, 3), levels(2, 6);
  for (int t = 0; t < 200; ++t) {
    const FloatGrid m = random_map(rng, dim(rng), dim(rng), levels(rng));
    const int window = 1 + 2 * widx(rng);
    for (Orientation o : {Orientation::kHorizontal, Orientation::kVertical}) {
      for (NmsTies ties : {NmsTies::kFirstWins, NmsTies::kKeepAll}) {
        ASSERT_EQ(directional_nms(m, o, window, ties), oracle::brute_nms(m, o, window, ties)) << t;
      }
      ASSERT_EQ(directional_nms(m, o, window, NmsTies::kKeepAll, 0.2),
                oracle::brute_nms(m, o, window, NmsTies::kKeepAll, 0.2))
          << t;
    }
  }
}

TEST(DirectionalNms, Idempotent) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 50; ++t) {
    const FloatGrid m = random_map(rng, 9, 13, 50);
    const FloatGrid once = directional_nms(m, Orientation::kVertical, 5);
    EXPECT_EQ(directional_nms(once, Orientation::kVertical, 5), once);
  }
}

TEST(Rescore, ThresholdFixtures) {
  // A lone cell is locally maximal in both directions.
  auto lone = [](double h, double v) {
    FloatGrid hm(3, 3, 0.0), vm(3, 3, 0.0);
    hm(1, 1) = h;
    vm(1, 1) = v;
    return rescore(hm, vm).points;
  };
  EXPECT_TRUE(lone(0.8, 0.3).empty());
  EXPECT_TRUE(lone(0.4, 0.4).empty());
  const auto both = lone(0.8, 0.9);
  ASSERT_EQ(both.size(), 1u);
  EXPECT_EQ(both[0], (Candidate{1, 1, 0.8}));
}

TEST(Rescore, CandidatesSurviveBothPasses) {
  std::mt19937_64 rng(31);
  DecodeConfig cfg;
  for (int t = 0; t < 30; ++t) {
    const FloatGrid h = random_map(rng, 12, 12, 10), v = random_map(rng, 12, 12, 10);
    const FloatGrid hn = directional_nms(h, Orientation::kHorizontal, 3, cfg.nms_ties);
    const FloatGrid vn = directional_nms(v, Orientation::kVertical, 3, cfg.nms_ties);
    for (const auto& c : rescore(h, v, cfg).points) {
      EXPECT_GT(hn(c.row, c.col), cfg.theta);
      EXPECT_GT(vn(c.row, c.col), cfg.theta);
      EXPECT_GT(c.confidence, cfg.theta);
    }
  }
}

TEST(Rescore, ModesAndErrors) {
  FloatGrid h(4, 4, 0.0), v(4, 4, 0.0);
  h(1, 1) = 0.9;
  v(2, 2) = 0.9;
  DecodeConfig cfg;
  EXPECT_TRUE(rescore(h, v, cfg).points.empty());
  cfg.mode = RescoreMode::kSingleDirection;
  EXPECT_EQ(rescore(h, v, cfg).points.size(), 1u);
  cfg.mode = RescoreMode::kNone;
  EXPECT_EQ(rescore(h, v, cfg).points.size(), 2u);
  EXPECT_THROW(rescore(h, FloatGrid(4, 5), cfg), InvalidGrid);
  cfg.theta = 1.0;
  EXPECT_THROW(rescore(h, v, cfg), InvalidConfig);
}

TEST(AlphaShape, SquareCorners) {
  const std::vector<Point2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon p = alpha_shape(pts, 100.0);
  EXPECT_EQ(p.size(), 4u);
  EXPECT_NEAR(polygon_area(p), 1.0, 1e-12);
}

TEST(AlphaShape, CircleArea) {
  std::vector<Point2> pts;
  for (int i = 0; i < 64; ++i) {
    const double a = 2 * std::numbers::pi * i / 64;
    pts.push_back({10 * std::cos(a), 10 * std::sin(a)});
  }
  const Polygon p = alpha_shape(pts, 3.0);
  EXPECT_NEAR(polygon_area(p), std::numbers::pi * 100, 0.1 * std::numbers::pi * 100);
  EXPECT_TRUE(oracle::is_simple(p));
}

TEST(AlphaShape, LShapeIsConcave) {
  // Dense grid on an L made of a 20x6 foot and a 6x20 leg.
  std::vector<Point2> pts;
  for (int y = 0; y <= 20; ++y) {
    for (int x = 0; x <= 20; ++x) {
      if (x <= 6 || y >= 14) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    }
  }
  const double l_area = 20.0 * 20.0 - 14.0 * 14.0;
  const Polygon concave = alpha_shape(pts, 1.5);
  EXPECT_NEAR(polygon_area(concave), l_area, 0.1 * l_area);
  EXPECT_GE(polygon_area(convex_hull(pts)), 1.3 * l_area);
  EXPECT_TRUE(oracle::is_simple(concave));
}

TEST(AlphaShape, Errors) {
  EXPECT_THROW(alpha_shape(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}}, 5.0), TooFewCandidates);
  EXPECT_THROW(alpha_shape(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}, 5.0),
               DegenerateGeometry);
}

TEST(AlphaShape, VerticesAreInputsAndPolygonIsSimple) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> coord(0, 30), alpha(1.5, 40);
  for (int t = 0; t < 60; ++t) {
    std::vector<Point2> pts(40);
    for (auto& p : pts) p = {std::round(coord(rng) * 4) / 4, std::round(coord(rng) * 4) / 4};
    const Polygon poly = alpha_shape(pts, alpha(rng));
    ASSERT_TRUE(oracle::is_simple(poly)) << t;
    for (const auto& v : poly.vertices) {
      ASSERT_NE(std::find(pts.begin(), pts.end(), v), pts.end()) << t;
    }
  }
}

TEST(AlphaShape, LargeAlphaGivesConvexHull) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> coord(0, 30);
  for (int t = 0; t < 30; ++t) {
    std::vector<Point2> pts(30);
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    const Polygon hull = convex_hull(pts);
    const Polygon a = alpha_shape(pts, 1e6);
    EXPECT_NEAR(polygon_area(a), polygon_area(hull), 1e-9);
    for (const auto& v : hull.vertices) EXPECT_TRUE(has_vertex(a, v) || point_in_polygon(v, a));
  }
}

TEST(MedianNn, Fixture) {
  const std::vector<Point2> pts = {{0, 0}, {1, 0}, {3, 0}, {7, 0}};
  // Nearest distances: 1, 1, 2, 4.
  EXPECT_DOUBLE_EQ(median_nn_distance(pts), 1.5);
}

TEST(DecodeRegion, BandRoundTrip) {
  const Polygon src{{{8, 6}, {40, 10}, {44, 30}, {20, 36}, {6, 24}}};
  const FloatGrid band = oracle::to_float(contour_band_label(src, 48, 56));
  const RegionDecode r = decode_region(band, band);
  ASSERT_TRUE(r.detection.has_value()) << r.diagnostic;
  EXPECT_GE(polygon_iou(r.detection->polygon, src), 0.85);
  EXPECT_EQ(r.detection->score, 1.0);
}

TEST(DecodeRegion, ZeroMapsGiveNothing) {
  const FloatGrid zero(16, 16, 0.0);
  const RegionDecode r = decode_region(zero, zero);
  EXPECT_FALSE(r.detection.has_value());
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(DecodeRegion, StreakSuppressedUnlessSingleDirection) {
  // Vertical streak in Hmap only, with a one-pixel jog so the single-direction
  // candidates are not collinear.
  FloatGrid h(32, 16, 0.0), v(32, 16, 0.0);
  for (int r = 4; r < 28; ++r) h(r, r < 16 ? 7 : 8) = 0.9;
  DecodeConfig cfg;
  EXPECT_FALSE(decode_region(h, v, cfg).detection.has_value());
  cfg.mode = RescoreMode::kSingleDirection;
  EXPECT_TRUE(decode_region(h, v, cfg).detection.has_value());
}

TEST(Cluster, SingleLinkage) {
  const std::vector<Candidate> c = {{0, 0, 1}, {0, 3, 1}, {0, 6, 1}, {20, 20, 1}, {0, 20, 1}};
  const auto groups = cluster_candidates(c, 3.0);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].size(), 3u);
  EXPECT_THROW(cluster_candidates(c, 0.0), InvalidConfig);
}

TEST(DecodeImage, TwoSeparatedRegions) {
  const Polygon a = oracle::box_polygon(4, 4, 30, 18), b = oracle::box_polygon(40, 30, 60, 50);
  FloatGrid band = oracle::to_float(contour_band_label(a, 64, 64));
  const BitMask bb = contour_band_label(b, 64, 64);
  for (std::size_t i = 0; i < band.size(); ++i) band.values()[i] += bb.values()[i];
  const auto dets = decode_image(band, band);
  ASSERT_EQ(dets.size(), 2u);
  const double best_a = std::max(polygon_iou(dets[0].polygon, a), polygon_iou(dets[1].polygon, a));
  const double best_b = std::max(polygon_iou(dets[0].polygon, b), polygon_iou(dets[1].polygon, b));
  EXPECT_GE(best_a, 0.85);
  EXPECT_GE(best_b, 0.85);
}

TEST(DecodeConfig, Validation) {
  DecodeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.nms_window = 4;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.alpha_scale = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.nms_ties = NmsTies::kFirstWins;
  c.nms_tolerance = 0.1;
  EXPECT_THROW(c.validate(), InvalidConfig);
}
