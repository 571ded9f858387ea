#include <gtest/gtest.h>

#include <random>

#include "contournet/adaptive_rpn.hpp"
#include "contournet/losses.hpp"

using namespace contournet;

TEST(PredefinedPoints, FivePointLayout) {
  const auto p = make_predefined_points({0, 0, 2, 2}, 5);
  const std::vector<Point2> expected = {{1, 1}, {0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_EQ(p.points, expected);
  EXPECT_EQ(p.n, 5);
}

TEST(PredefinedPoints, NinePointLayoutAddsMidpoints) {
  const auto p = make_predefined_points({0, 0, 2, 2}, 9);
  ASSERT_EQ(p.points.size(), 9u);
  const std::vector<Point2> mids(p.points.begin() + 5, p.points.end());
  EXPECT_EQ(mids, (std::vector<Point2>{{1, 0}, {2, 1}, {1, 2}, {0, 1}}));
}

TEST(PredefinedPoints, RejectsOtherCounts) {
  EXPECT_THROW(make_predefined_points({0, 0, 2, 2}, 7), InvalidConfig);
}

TEST(PredefinedPoints, InsideSourceBox) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-50, 50), size(0, 40);
  for (int t = 0; t < 200; ++t) {
    const double x = pos(rng), y = pos(rng);
    const AABox b{x, y, x + size(rng), y + size(rng)};
    for (int n : {5, 9}) {
      const auto p = make_predefined_points(b, n);
      EXPECT_EQ(p.points.front(), (Point2{0.5 * (b.x_tl + b.x_rb), 0.5 * (b.y_tl + b.y_rb)}));
      for (const auto& q : p.points) EXPECT_TRUE(b.contains(q));
    }
  }
}

TEST(RefinePoints, Arithmetic) {
  PredefinedPoints p{5, {{5, 5}, {0, 0}, {10, 0}, {10, 4}, {0, 4}}, {0, 0, 10, 4}};
  OffsetSet off(5);
  EXPECT_EQ(refine_points(p, off), p.points);
  off[0] = {0.1, 0.5};
  EXPECT_EQ(refine_points(p, off)[0], (Point2{6, 7}));
  off[0] = {-0.5, 0};
  EXPECT_EQ(refine_points(p, off)[0], (Point2{0, 5}));
  EXPECT_THROW(refine_points(p, OffsetSet(4)), InvalidConfig);
}

TEST(BoundPoints, Fixtures) {
  const std::vector<Point2> pts = {{1, 2}, {3, 0}, {2, 5}};
  EXPECT_EQ(bound_points(pts, {2, 2}), (AABox{1, 0, 3, 5}));
  const std::vector<Point2> same = {{2, 2}, {2, 2}};
  EXPECT_EQ(bound_points(same, {2, 2}), (AABox{2, 2, 2, 2}));
  const std::vector<Point2> far = {{3, 3}, {4, 4}};
  EXPECT_EQ(bound_points(far, {1, 1}), (AABox{1, 1, 4, 4}));
  EXPECT_THROW(bound_points(std::vector<Point2>{}, {0, 0}), InvalidInput);
}

TEST(BoundPoints, ContainsEveryPointAndCenter) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(1, 20);
  std::uniform_real_distribution<double> coord(-1e3, 1e3);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Point2> pts(count(rng));
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    const Point2 center{coord(rng), coord(rng)};
    const AABox b = bound_points(pts, center);
    ASSERT_TRUE(b.valid());
    ASSERT_TRUE(b.contains(center));
    for (const auto& p : pts) ASSERT_TRUE(b.contains(p));
  }
}

TEST(FitProposal, StartingAtTargetStaysPut) {
  const AABox gt{3, 4, 20, 12};
  const auto fit = fit_proposal(gt, gt, 9, 0.05, 50);
  EXPECT_EQ(fit.box, gt);
  ASSERT_EQ(fit.losses.size(), 50u);
  for (double l : fit.losses) EXPECT_EQ(l, 0.0);
}

TEST(FitProposal, HalfOverlapAtLargeStep) {
  const AABox gt{0, 0, 10, 10}, init{0, 0, 20, 10};
  ASSERT_NEAR(box_iou(init, gt), 0.5, 1e-12);
  const auto fit = fit_proposal(init, gt, 9, 0.05, 500);
  EXPECT_GE(box_iou(fit.box, gt), 0.95);
}

TEST(FitProposal, ShiftedHalfOverlapAtDefaultStep) {
  const AABox gt{0, 0, 10, 10}, init{10.0 / 3, 0, 10 + 10.0 / 3, 10};
  ASSERT_NEAR(box_iou(init, gt), 0.5, 1e-12);
  const auto fit = fit_proposal(init, gt);
  EXPECT_GE(box_iou(fit.box, gt), 0.95);
  EXPECT_LT(fit.losses.back(), fit.losses.front());
}

TEST(FitProposal, DisjointStartOnlyShrinks) {
  // Without overlap the intersection term has no gradient; only the union
  // term acts, and it shrinks the box instead of moving it toward the target.
  const AABox gt{50, 50, 60, 60}, init{0, 0, 10, 10};
  const BoxLoss l = iou_loss(init, gt);
  EXPECT_LT(l.grad[0], 0.0);
  EXPECT_LT(l.grad[1], 0.0);
  EXPECT_GT(l.grad[2], 0.0);
  EXPECT_GT(l.grad[3], 0.0);
  const auto fit = fit_proposal(init, gt, 9, 0.005, 100);
  EXPECT_EQ(box_iou(fit.box, gt), 0.0);
  EXPECT_LT(fit.box.area(), init.area());
  for (std::size_t i = 1; i < fit.losses.size(); ++i) EXPECT_LE(fit.losses[i], fit.losses[i - 1] + 1e-12);
}

TEST(FitProposal, Errors) {
  EXPECT_THROW(fit_proposal({0, 0, 1, 1}, {0, 0, 1, 1}, 9, 0.0, 10), InvalidConfig);
  EXPECT_THROW(fit_proposal({0, 0, 1, 1}, {0, 0, 1, 1}, 9, 0.1, 0), InvalidConfig);
  EXPECT_THROW(fit_proposal({0, 0, 1, 1}, {0, 0, 1, 1}, 6, 0.1, 10), InvalidConfig);
}
