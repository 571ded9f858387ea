#pragma once

#include <span>
#include <vector>

#include "contournet/grid.hpp"

namespace contournet {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Ordered vertex list in pixel coordinates, either winding. Validity
/// (three or more finite vertices) is checked by the operations that need
/// it rather than on construction so that parsers can report the record
/// that carried a bad shape.
struct Polygon {
  std::vector<Point2> vertices;

  std::size_t size() const noexcept { return vertices.size(); }
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

/// Axis-aligned box, top-left and bottom-right corners.
struct AABox {
  double x_tl = 0.0;
  double y_tl = 0.0;
  double x_rb = 0.0;
  double y_rb = 0.0;

  double width() const noexcept { return x_rb - x_tl; }
  double height() const noexcept { return y_rb - y_tl; }
  double area() const noexcept { return width() * height(); }
  bool valid() const noexcept;
  bool contains(const Point2& p) const noexcept {
    return p.x >= x_tl && p.x <= x_rb && p.y >= y_tl && p.y <= y_rb;
  }
  AABox scaled(double s) const noexcept {
    return {x_tl * s, y_tl * s, x_rb * s, y_rb * s};
  }

  friend bool operator==(const AABox&, const AABox&) = default;
};

/// Throws InvalidPolygon if `poly` has fewer than three vertices or any
/// non-finite coordinate.
void validate_polygon(const Polygon& poly);

/// Shoelace sum; positive for counter-clockwise in a y-up frame.
double signed_area(std::span<const Point2> ring);

double polygon_area(const Polygon& poly);

/// Even-odd containment. Points on an edge or vertex count as inside.
bool point_in_polygon(const Point2& p, const Polygon& poly);

/// Bit (i, j) is set iff the pixel center (j + 0.5, i + 0.5) is inside
/// `poly` under point_in_polygon.
BitMask rasterize_polygon(const Polygon& poly, int height, int width);

/// Exact Euclidean distance from each foreground pixel center to the
/// nearest background pixel center; cells outside the grid are background.
FloatGrid euclidean_distance_transform(const BitMask& mask);

AABox bounding_box(const Polygon& poly);

/// Analytic IoU in [0, 1]. Zero-area boxes give 0.
double box_iou(const AABox& a, const AABox& b);

inline constexpr int kDefaultIouResolution = 256;

/// Rasterized IoU: both polygons are drawn on a shared grid whose longer
/// side spans `resolution` cells over the joint bounding box.
double polygon_iou(const Polygon& a, const Polygon& b,
                   int resolution = kDefaultIouResolution);

}  // namespace contournet
