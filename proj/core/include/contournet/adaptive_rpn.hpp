#pragma once

#include <span>
#include <vector>

#include "contournet/geometry.hpp"

namespace contournet {

/// Point layout inside a proposal box. Index 0 is always the box center,
/// followed by the corners (tl, tr, br, bl) and, for n = 9, the edge
/// midpoints (top, right, bottom, left).
struct PredefinedPoints {
  int n = 0;
  std::vector<Point2> points;
  AABox source_box;
};

/// Offset of one point, in units of the source box width and height.
struct PointOffset {
  double dx = 0.0;
  double dy = 0.0;
};

using OffsetSet = std::vector<PointOffset>;

inline constexpr int kDefaultPointCount = 9;

PredefinedPoints make_predefined_points(const AABox& box, int n = kDefaultPointCount);

/// Moves every point by (w_c * dx, h_c * dy).
std::vector<Point2> refine_points(const PredefinedPoints& points,
                                  const OffsetSet& offsets);

/// Max-min box over `refined`, widened if needed to contain `center`.
AABox bound_points(std::span<const Point2> refined, const Point2& center);

struct ProposalFit {
  AABox box;
  OffsetSet offsets;
  /// Loss before each update; size equals the step count.
  std::vector<double> losses;
};

/// Constant steps bounce around the kink of the IoU loss at the target, with
/// an amplitude proportional to the step; 0.005 settles within 500 steps for
/// starting overlaps down to IoU 0.2.
inline constexpr double kDefaultFitLearningRate = 0.005;

/// Plain gradient descent on the point offsets under the IoU loss.
/// Offsets start at zero. The max/min of the bounding step routes each
/// box-edge gradient to its single extreme point (lowest index on ties).
ProposalFit fit_proposal(const AABox& init, const AABox& gt,
                         int n = kDefaultPointCount, double lr = kDefaultFitLearningRate,
                         int steps = 500);

}  // namespace contournet
