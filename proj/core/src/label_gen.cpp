#include "contournet/label_gen.hpp"

#include <cmath>

namespace contournet {

BitMask contour_band_label(const Polygon& poly, int height, int width,
                           double band) {
  if (!(band > 0.0) || !std::isfinite(band)) {
    throw InvalidConfig("contour_band_label: band must be positive");
  }
  BitMask label = rasterize_polygon(poly, height, width);
  const FloatGrid dist = euclidean_distance_transform(label);
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label.values()[i] && dist.values()[i] > band) label.values()[i] = 0;
  }
  return label;
}

AABox proposal_gt_box(const Polygon& poly) { return bounding_box(poly); }

TrainingSample build_training_sample(const std::vector<AnnotationRecord>& records,
                                     int height, int width, double band) {
  TrainingSample sample{BitMask(height, width, 0), {}, BitMask(height, width, 0)};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    try {
      if (record.ignore) {
        mask_union_inplace(sample.ignore,
                           rasterize_polygon(record.polygon, height, width));
      } else {
        mask_union_inplace(sample.contour,
                           contour_band_label(record.polygon, height, width, band));
        sample.boxes.push_back(proposal_gt_box(record.polygon));
      }
    } catch (const InvalidPolygon& e) {
      throw InvalidPolygon("record " + std::to_string(i) + ": " + e.what());
    }
  }
  return sample;
}

}  // namespace contournet
