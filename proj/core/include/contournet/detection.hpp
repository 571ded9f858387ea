#pragma once

#include "contournet/geometry.hpp"

namespace contournet {

/// A reconstructed text region and its confidence in [0, 1].
struct Detection {
  Polygon polygon;
  double score = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace contournet
