#include "contournet/adaptive_rpn.hpp"

#include <cmath>

#include "contournet/losses.hpp"

namespace contournet {

PredefinedPoints make_predefined_points(const AABox& box, int n) {
  if (n != 5 && n != 9) {
    throw InvalidConfig("make_predefined_points: n must be 5 or 9, got " +
                        std::to_string(n));
  }
  if (!box.valid()) throw InvalidInput("make_predefined_points: invalid box");

  const double cx = 0.5 * (box.x_tl + box.x_rb);
  const double cy = 0.5 * (box.y_tl + box.y_rb);
  PredefinedPoints out{n, {}, box};
  out.points = {
      {cx, cy},
      {box.x_tl, box.y_tl},
      {box.x_rb, box.y_tl},
      {box.x_rb, box.y_rb},
      {box.x_tl, box.y_rb},
  };
  if (n == 9) {
    out.points.push_back({cx, box.y_tl});
    out.points.push_back({box.x_rb, cy});
    out.points.push_back({cx, box.y_rb});
    out.points.push_back({box.x_tl, cy});
  }
  return out;
}

std::vector<Point2> refine_points(const PredefinedPoints& points,
                                  const OffsetSet& offsets) {
  if (offsets.size() != points.points.size()) {
    throw InvalidConfig("refine_points: expected " +
                        std::to_string(points.points.size()) + " offsets, got " +
                        std::to_string(offsets.size()));
  }
  const double wc = points.source_box.width();
  const double hc = points.source_box.height();
  std::vector<Point2> refined;
  refined.reserve(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    refined.push_back({points.points[i].x + wc * offsets[i].dx,
                       points.points[i].y + hc * offsets[i].dy});
  }
  return refined;
}

AABox bound_points(std::span<const Point2> refined, const Point2& center) {
  if (refined.empty()) throw InvalidInput("bound_points: no points");
  AABox box{refined[0].x, refined[0].y, refined[0].x, refined[0].y};
  for (const auto& p : refined) {
    box.x_tl = std::min(box.x_tl, p.x);
    box.y_tl = std::min(box.y_tl, p.y);
    box.x_rb = std::max(box.x_rb, p.x);
    box.y_rb = std::max(box.y_rb, p.y);
  }
  box.x_tl = std::min(box.x_tl, center.x);
  box.y_tl = std::min(box.y_tl, center.y);
  box.x_rb = std::max(box.x_rb, center.x);
  box.y_rb = std::max(box.y_rb, center.y);
  return box;
}

namespace {

struct Extremes {
  std::size_t x_min = 0;
  std::size_t y_min = 0;
  std::size_t x_max = 0;
  std::size_t y_max = 0;
};

// Strict comparisons keep the lowest index on ties.
Extremes find_extremes(const std::vector<Point2>& pts) {
  Extremes e;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x < pts[e.x_min].x) e.x_min = i;
    if (pts[i].y < pts[e.y_min].y) e.y_min = i;
    if (pts[i].x > pts[e.x_max].x) e.x_max = i;
    if (pts[i].y > pts[e.y_max].y) e.y_max = i;
  }
  return e;
}

}  // namespace

ProposalFit fit_proposal(const AABox& init, const AABox& gt, int n, double lr,
                         int steps) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw InvalidConfig("fit_proposal: learning rate must be positive");
  }
  if (steps < 1) throw InvalidConfig("fit_proposal: steps must be >= 1");
  if (!init.valid() || !gt.valid()) throw InvalidInput("fit_proposal: invalid box");

  const PredefinedPoints layout = make_predefined_points(init, n);
  const double wc = init.width();
  const double hc = init.height();

  ProposalFit fit;
  fit.offsets.assign(layout.points.size(), PointOffset{});
  fit.losses.reserve(steps);
  for (int step = 0; step < steps; ++step) {
    // The refined center takes part in the max-min, which makes the
    // center clamp in bound_points a no-op here.
    const auto refined = refine_points(layout, fit.offsets);
    const AABox box = bound_points(refined, refined[0]);
    const BoxLoss loss = iou_loss(box, gt);
    fit.losses.push_back(loss.loss);

    const Extremes ext = find_extremes(refined);
    fit.offsets[ext.x_min].dx -= lr * loss.grad[0] * wc;
    fit.offsets[ext.y_min].dy -= lr * loss.grad[1] * hc;
    fit.offsets[ext.x_max].dx -= lr * loss.grad[2] * wc;
    fit.offsets[ext.y_max].dy -= lr * loss.grad[3] * hc;
  }
  const auto refined = refine_points(layout, fit.offsets);
  fit.box = bound_points(refined, refined[0]);
  return fit;
}

}  // namespace contournet
