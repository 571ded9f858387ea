#include "contournet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contournet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidPolygon: return "InvalidPolygon";
    case ErrorKind::kInvalidGrid: return "InvalidGrid";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kNumericalError: return "NumericalError";
    case ErrorKind::kTooFewCandidates: return "TooFewCandidates";
    case ErrorKind::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kFormatError: return "FormatError";
    case ErrorKind::kPlacementError: return "PlacementError";
  }
  return "Error";
}

const char* to_string(Orientation orientation) {
  return orientation == Orientation::kHorizontal ? "horizontal" : "vertical";
}

void mask_union_inplace(BitMask& into, const BitMask& other) {
  require_same_shape(into, other, "mask_union");
  auto& dst = into.values();
  const auto& src = other.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (dst[i] | src[i]) ? 1 : 0;
}

bool AABox::valid() const noexcept {
  return std::isfinite(x_tl) && std::isfinite(y_tl) && std::isfinite(x_rb) &&
         std::isfinite(y_rb) && x_tl <= x_rb && y_tl <= y_rb;
}

void validate_polygon(const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    throw InvalidPolygon("polygon needs at least 3 vertices, got " +
                         std::to_string(poly.vertices.size()));
  }
  for (const auto& v : poly.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw InvalidPolygon("polygon has a non-finite vertex");
    }
  }
}

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return 0.5 * twice;
}

double polygon_area(const Polygon& poly) {
  validate_polygon(poly);
  return std::abs(signed_area(poly.vertices));
}

namespace {

struct Edge {
  Point2 a;
  Point2 b;
};

bool on_segment(const Point2& p, const Edge& e) {
  const double cross =
      (e.b.x - e.a.x) * (p.y - e.a.y) - (e.b.y - e.a.y) * (p.x - e.a.x);
  if (cross != 0.0) return false;
  return p.x >= std::min(e.a.x, e.b.x) && p.x <= std::max(e.a.x, e.b.x) &&
         p.y >= std::min(e.a.y, e.b.y) && p.y <= std::max(e.a.y, e.b.y);
}

// Shared by point_in_polygon and rasterize_polygon so both agree bit for
// bit. `edges` may be any superset filter of the edges whose y-range
// contains p.y; the others cannot affect the answer.
bool contains(std::span<const Edge> edges, const Point2& p) {
  bool inside = false;
  for (const auto& e : edges) {
    if (on_segment(p, e)) return true;
    if ((e.a.y > p.y) != (e.b.y > p.y)) {
      const double x_cross =
          e.a.x + (p.y - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<Edge> edges_of(const Polygon& poly) {
  std::vector<Edge> edges;
  const std::size_t n = poly.vertices.size();
  edges.reserve(n);
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    edges.push_back({poly.vertices[j], poly.vertices[i]});
  }
  return edges;
}

}  // namespace

bool point_in_polygon(const Point2& p, const Polygon& poly) {
  validate_polygon(poly);
  const auto edges = edges_of(poly);
  return contains(edges, p);
}

AABox bounding_box(const Polygon& poly) {
  validate_polygon(poly);
  AABox box{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
  for (const auto& v : poly.vertices) {
    box.x_tl = std::min(box.x_tl, v.x);
    box.y_tl = std::min(box.y_tl, v.y);
    box.x_rb = std::max(box.x_rb, v.x);
    box.y_rb = std::max(box.y_rb, v.y);
  }
  return box;
}

BitMask rasterize_polygon(const Polygon& poly, int height, int width) {
  validate_polygon(poly);
  if (height < 1 || width < 1) {
    throw InvalidGrid("rasterize_polygon: dimensions must be positive");
  }
  BitMask mask(height, width, 0);
  const AABox box = bounding_box(poly);
  // Pixel centers sit at index + 0.5; restrict to the polygon's extent.
  const int row_lo = std::max(0, static_cast<int>(std::floor(box.y_tl - 0.5)));
  const int row_hi =
      std::min(height - 1, static_cast<int>(std::ceil(box.y_rb - 0.5)));
  const int col_lo = std::max(0, static_cast<int>(std::floor(box.x_tl - 0.5)));
  const int col_hi =
      std::min(width - 1, static_cast<int>(std::ceil(box.x_rb - 0.5)));
  if (row_lo > row_hi || col_lo > col_hi) return mask;

  const auto edges = edges_of(poly);
  std::vector<Edge> row_edges;
  row_edges.reserve(edges.size());
  for (int r = row_lo; r <= row_hi; ++r) {
    const double y = r + 0.5;
    row_edges.clear();
    for (const auto& e : edges) {
      if (y >= std::min(e.a.y, e.b.y) && y <= std::max(e.a.y, e.b.y)) {
        row_edges.push_back(e);
      }
    }
    if (row_edges.empty()) continue;
    for (int c = col_lo; c <= col_hi; ++c) {
      if (contains(row_edges, Point2{c + 0.5, y})) mask(r, c) = 1;
    }
  }
  return mask;
}

namespace {

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas). `f` holds squared distances; entries
// equal to `inf` mark cells with no known source yet.
void squared_edt_1d(const std::vector<double>& f, std::vector<double>& out,
                    std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  // Find the first finite sample; the padded layout guarantees one exists.
  int first = 0;
  while (first < n && f[first] == inf) ++first;
  if (first == n) {
    std::fill(out.begin(), out.end(), inf);
    return;
  }
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == inf) continue;
    double s = 0.0;
    // z[0] is -inf, so the scan always stops at k == 0.
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = q - v[k];
    out[q] = d * d + f[v[k]];
  }
}

}  // namespace

FloatGrid euclidean_distance_transform(const BitMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  FloatGrid result(h, w, 0.0);
  if (h == 0 || w == 0) return result;

  // Pad by one background ring: the nearest out-of-grid cell is always in it.
  const int ph = h + 2;
  const int pw = w + 2;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> grid(static_cast<std::size_t>(ph) * pw, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (mask(r, c)) grid[static_cast<std::size_t>(r + 1) * pw + c + 1] = inf;
    }
  }

  const int longest = std::max(ph, pw);
  std::vector<double> f(longest), out(longest), z(longest + 1);
  std::vector<int> v(longest);

  f.resize(ph);
  out.resize(ph);
  for (int c = 0; c < pw; ++c) {
    for (int r = 0; r < ph; ++r) f[r] = grid[static_cast<std::size_t>(r) * pw + c];
    squared_edt_1d(f, out, v, z);
    for (int r = 0; r < ph; ++r) grid[static_cast<std::size_t>(r) * pw + c] = out[r];
  }
  f.resize(pw);
  out.resize(pw);
  for (int r = 0; r < ph; ++r) {
    double* row = grid.data() + static_cast<std::size_t>(r) * pw;
    std::copy(row, row + pw, f.begin());
    squared_edt_1d(f, out, v, z);
    std::copy(out.begin(), out.end(), row);
  }

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (mask(r, c)) {
        result(r, c) = std::sqrt(grid[static_cast<std::size_t>(r + 1) * pw + c + 1]);
      }
    }
  }
  return result;
}

double box_iou(const AABox& a, const AABox& b) {
  const double iw = std::min(a.x_rb, b.x_rb) - std::max(a.x_tl, b.x_tl);
  const double ih = std::min(a.y_rb, b.y_rb) - std::max(a.y_tl, b.y_tl);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double polygon_iou(const Polygon& a, const Polygon& b, int resolution) {
  validate_polygon(a);
  validate_polygon(b);
  if (resolution < 16) {
    throw InvalidConfig("polygon_iou: resolution must be >= 16");
  }
  const AABox ba = bounding_box(a);
  const AABox bb = bounding_box(b);
  const double x0 = std::min(ba.x_tl, bb.x_tl);
  const double y0 = std::min(ba.y_tl, bb.y_tl);
  const double x1 = std::max(ba.x_rb, bb.x_rb);
  const double y1 = std::max(ba.y_rb, bb.y_rb);
  const double extent = std::max(x1 - x0, y1 - y0);
  if (!(extent > 0.0)) return 0.0;

  const double scale = resolution / extent;
  const int width = std::max(1, static_cast<int>(std::ceil((x1 - x0) * scale)));
  const int height = std::max(1, static_cast<int>(std::ceil((y1 - y0) * scale)));
  auto to_grid = [&](const Polygon& p) {
    Polygon out;
    out.vertices.reserve(p.vertices.size());
    for (const auto& v : p.vertices) {
      out.vertices.push_back({(v.x - x0) * scale, (v.y - y0) * scale});
    }
    return out;
  };
  const BitMask ma = rasterize_polygon(to_grid(a), height, width);
  const BitMask mb = rasterize_polygon(to_grid(b), height, width);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const bool pa = ma.values()[i] != 0;
    const bool pb = mb.values()[i] != 0;
    inter += (pa && pb) ? 1 : 0;
    uni += (pa || pb) ? 1 : 0;
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace contournet
