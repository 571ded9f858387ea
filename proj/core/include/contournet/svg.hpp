#pragma once

#include <span>
#include <string>
#include <vector>

#include "contournet/detection.hpp"
#include "contournet/label_gen.hpp"

namespace contournet {

/// SVG 1.1 overlay: ground truth in green (DO-NOT-CARE dashed), detections
/// in red, optional candidate points as small blue dots.
std::string render_overlay_svg(int height, int width, const std::vector<AnnotationRecord>& gts,
                               const std::vector<Detection>& dets,
                               std::span<const Point2> candidates = {});

}  // namespace contournet
