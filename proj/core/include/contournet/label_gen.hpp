#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contournet/geometry.hpp"

namespace contournet {

/// One annotated text instance. `ignore` marks DO-NOT-CARE regions: they
/// never contribute positives and are masked out of losses and metrics.
struct AnnotationRecord {
  Polygon polygon;
  bool ignore = false;
  std::optional<std::string> transcription;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

inline constexpr double kDefaultBandWidth = 2.0;

/// Pixels inside `poly` whose distance to the outside is at most `band`.
BitMask contour_band_label(const Polygon& poly, int height, int width,
                           double band = kDefaultBandWidth);

/// Max-min box over the polygon vertices.
AABox proposal_gt_box(const Polygon& poly);

struct TrainingSample {
  BitMask contour;
  std::vector<AABox> boxes;
  BitMask ignore;
};

/// Union of per-record bands and boxes for the positive records, plus a
/// raster of the ignored ones. Errors name the offending record index.
TrainingSample build_training_sample(const std::vector<AnnotationRecord>& records,
                                     int height, int width,
                                     double band = kDefaultBandWidth);

}  // namespace contournet
