#include "contournet/svg.hpp"

#include <cstdio>

namespace contournet {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string points_attr(const Polygon& poly) {
  std::string out;
  for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
    if (i) out += ' ';
    out += num(poly.vertices[i].x) + "," + num(poly.vertices[i].y);
  }
  return out;
}

}  // namespace

std::string render_overlay_svg(int height, int width, const std::vector<AnnotationRecord>& gts,
                               const std::vector<Detection>& dets,
                               std::span<const Point2> candidates) {
  if (height < 1 || width < 1) throw InvalidGrid("render_overlay_svg: non-positive size");
  for (const auto& g : gts) validate_polygon(g.polygon);
  for (const auto& d : dets) validate_polygon(d.polygon);

  const std::string w = std::to_string(width);
  const std::string h = std::to_string(height);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w +
         "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"black\"/>\n";
  out += "  <g id=\"ground-truth\" fill=\"none\" stroke=\"green\" stroke-width=\"1\">\n";
  for (const auto& g : gts) {
    out += "    <polygon points=\"" + points_attr(g.polygon) + "\"";
    if (g.ignore) out += " stroke-dasharray=\"2,2\"";
    out += "/>\n";
  }
  out += "  </g>\n";
  out += "  <g id=\"detections\" fill=\"none\" stroke=\"red\" stroke-width=\"1\">\n";
  for (const auto& d : dets) {
    out += "    <polygon points=\"" + points_attr(d.polygon) + "\"><title>score " +
           num(d.score) + "</title></polygon>\n";
  }
  out += "  </g>\n";
  if (!candidates.empty()) {
    out += "  <g id=\"candidates\" fill=\"blue\">\n";
    for (const auto& p : candidates) {
      out += "    <circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) + "\" r=\"0.4\"/>\n";
    }
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace contournet
