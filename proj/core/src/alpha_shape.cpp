#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <unordered_map>

#include <boost/polygon/voronoi.hpp>

#include "contournet/decode.hpp"

namespace contournet {

namespace {

// Input points snapped to a power-of-two integer lattice so the Voronoi
// construction and orientation tests run on exact integers. Integer and
// half-integer pixel coordinates are represented without rounding.
struct Lattice {
  std::vector<boost::polygon::point_data<std::int32_t>> sites;
  std::vector<std::size_t> original;  // site -> index into the input
};

Lattice snap(std::span<const Point2> points) {
  double min_x = points[0].x;
  double min_y = points[0].y;
  double max_x = points[0].x;
  double max_y = points[0].y;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidInput("alpha_shape: non-finite point");
    }
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const double extent = std::max(max_x - min_x, max_y - min_y);
  int exponent = 0;
  if (extent > 0.0) {
    exponent = static_cast<int>(std::floor(std::log2(static_cast<double>(1 << 28) / extent)));
  }
  const double scale = std::ldexp(1.0, exponent);

  Lattice lattice;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto qx = static_cast<std::int32_t>(std::llround((points[i].x - min_x) * scale));
    const auto qy = static_cast<std::int32_t>(std::llround((points[i].y - min_y) * scale));
    if (seen.emplace(std::make_pair(qx, qy), lattice.sites.size()).second) {
      lattice.sites.emplace_back(qx, qy);
      lattice.original.push_back(i);
    }
  }
  return lattice;
}

std::int64_t cross(const boost::polygon::point_data<std::int32_t>& o,
                   const boost::polygon::point_data<std::int32_t>& a,
                   const boost::polygon::point_data<std::int32_t>& b) {
  return (static_cast<std::int64_t>(a.x()) - o.x()) * (static_cast<std::int64_t>(b.y()) - o.y()) -
         (static_cast<std::int64_t>(a.y()) - o.y()) * (static_cast<std::int64_t>(b.x()) - o.x());
}

bool all_collinear(const Lattice& lattice) {
  const auto& s = lattice.sites;
  if (s.size() < 3) return true;
  for (std::size_t i = 2; i < s.size(); ++i) {
    if (cross(s[0], s[1], s[i]) != 0) return false;
  }
  return true;
}

// Monotone chain over lattice sites; returns site indices in CCW order
// (w.r.t. a y-up frame), collinear points dropped.
std::vector<std::size_t> hull_sites(const Lattice& lattice) {
  std::vector<std::size_t> order(lattice.sites.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& s = lattice.sites;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s[a].x() != s[b].x() ? s[a].x() < s[b].x() : s[a].y() < s[b].y();
  });
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    while (k >= 2 && cross(s[hull[k - 2]], s[hull[k - 1]], s[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  for (std::size_t i = order.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(s[hull[k - 2]], s[hull[k - 1]], s[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon to_polygon(std::span<const Point2> points, const Lattice& lattice,
                   const std::vector<std::size_t>& ring) {
  Polygon poly;
  poly.vertices.reserve(ring.size());
  for (std::size_t site : ring) poly.vertices.push_back(points[lattice.original[site]]);
  return poly;
}

using Triangle = std::array<std::size_t, 3>;

std::vector<Triangle> delaunay(const Lattice& lattice) {
  boost::polygon::voronoi_diagram<double> vd;
  boost::polygon::construct_voronoi(lattice.sites.begin(), lattice.sites.end(), &vd);
  std::vector<Triangle> triangles;
  for (const auto& vertex : vd.vertices()) {
    // Sites of the cells around a Voronoi vertex form one Delaunay face;
    // more than three when the sites are cocircular.
    std::vector<std::size_t> face;
    const auto* start = vertex.incident_edge();
    const auto* edge = start;
    do {
      face.push_back(edge->cell()->source_index());
      edge = edge->rot_next();
    } while (edge != start);
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      Triangle t{face[0], face[i], face[i + 1]};
      if (cross(lattice.sites[t[0]], lattice.sites[t[1]], lattice.sites[t[2]]) < 0) {
        std::swap(t[1], t[2]);
      }
      triangles.push_back(t);
    }
  }
  return triangles;
}

double circumradius(const Point2& a, const Point2& b, const Point2& c) {
  const double ab = std::hypot(b.x - a.x, b.y - a.y);
  const double bc = std::hypot(c.x - b.x, c.y - b.y);
  const double ca = std::hypot(a.x - c.x, a.y - c.y);
  const double twice_area = std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * twice_area);
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Traces the boundary loops of a set of CCW triangles. At a vertex shared
// by several boundary wedges the walk takes the first outgoing edge
// clockwise from the incoming one, which keeps every loop simple.
std::vector<std::vector<std::size_t>> boundary_loops(const std::vector<Triangle>& tris,
                                                     std::span<const Point2> coords) {
  std::unordered_map<std::uint64_t, int> uses;
  for (const auto& t : tris) {
    for (int e = 0; e < 3; ++e) ++uses[edge_key(t[e], t[(e + 1) % 3])];
  }
  std::unordered_map<std::size_t, std::vector<std::size_t>> outgoing;
  std::map<std::pair<std::size_t, std::size_t>, bool> visited;
  for (const auto& t : tris) {
    for (int e = 0; e < 3; ++e) {
      const std::size_t a = t[e];
      const std::size_t b = t[(e + 1) % 3];
      if (uses[edge_key(a, b)] == 1) {
        outgoing[a].push_back(b);
        visited[{a, b}] = false;
      }
    }
  }

  auto angle = [&](std::size_t from, std::size_t to) {
    return std::atan2(coords[to].y - coords[from].y, coords[to].x - coords[from].x);
  };

  std::vector<std::vector<std::size_t>> loops;
  for (auto& [edge, done] : visited) {
    if (done) continue;
    std::vector<std::size_t> loop;
    std::size_t a = edge.first;
    std::size_t b = edge.second;
    const std::pair<std::size_t, std::size_t> first = edge;
    while (true) {
      visited[{a, b}] = true;
      loop.push_back(a);
      const double back = angle(b, a);
      std::size_t best = outgoing[b].front();
      double best_turn = 10.0;
      for (std::size_t c : outgoing[b]) {
        double turn = back - angle(b, c);
        while (turn <= 0.0) turn += 2.0 * M_PI;
        while (turn > 2.0 * M_PI) turn -= 2.0 * M_PI;
        if (turn < best_turn) {
          best_turn = turn;
          best = c;
        }
      }
      a = b;
      b = best;
      if (std::make_pair(a, b) == first || visited[{a, b}]) break;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

Polygon convex_hull(std::span<const Point2> points) {
  if (points.size() < 3) throw DegenerateGeometry("convex_hull: fewer than 3 points");
  const Lattice lattice = snap(points);
  if (all_collinear(lattice)) throw DegenerateGeometry("convex_hull: points are collinear");
  return to_polygon(points, lattice, hull_sites(lattice));
}

Polygon alpha_shape(std::span<const Point2> points, double alpha) {
  if (points.size() < 4) {
    throw TooFewCandidates("alpha_shape: need at least 4 points, got " +
                           std::to_string(points.size()));
  }
  if (!(alpha > 0.0)) throw InvalidConfig("alpha_shape: alpha must be positive");
  const Lattice lattice = snap(points);
  if (all_collinear(lattice)) throw DegenerateGeometry("alpha_shape: points are collinear");

  std::vector<Point2> coords;
  coords.reserve(lattice.sites.size());
  for (std::size_t idx : lattice.original) coords.push_back(points[idx]);

  const std::vector<Triangle> all = delaunay(lattice);
  std::vector<char> keep(all.size());
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_edge;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& t = all[i];
    keep[i] = circumradius(coords[t[0]], coords[t[1]], coords[t[2]]) <= alpha;
    for (int e = 0; e < 3; ++e) by_edge[edge_key(t[e], t[(e + 1) % 3])].push_back(i);
  }

  // Dropped triangles that cannot reach the convex hull through other
  // dropped triangles are holes; text regions have none, so fill them.
  std::vector<char> outside(all.size(), 0);
  std::vector<std::size_t> stack;
  for (const auto& [key, owners] : by_edge) {
    if (owners.size() == 1 && !keep[owners[0]] && !outside[owners[0]]) {
      outside[owners[0]] = 1;
      stack.push_back(owners[0]);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (int e = 0; e < 3; ++e) {
      for (std::size_t j : by_edge[edge_key(all[i][e], all[i][(e + 1) % 3])]) {
        if (!keep[j] && !outside[j]) {
          outside[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  std::vector<Triangle> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (keep[i] || !outside[i]) kept.push_back(all[i]);
  }
  if (std::none_of(keep.begin(), keep.end(), [](char k) { return k != 0; })) {
    return to_polygon(points, lattice, hull_sites(lattice));
  }

  DisjointSet components(kept.size());
  std::unordered_map<std::uint64_t, std::size_t> owner;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(kept[i][e], kept[i][(e + 1) % 3]);
      auto [it, inserted] = owner.emplace(key, i);
      if (!inserted) components.unite(i, it->second);
    }
  }
  std::unordered_map<std::size_t, double> area;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& t = kept[i];
    const Point2 tri[] = {coords[t[0]], coords[t[1]], coords[t[2]]};
    area[components.find(i)] += std::abs(signed_area(tri));
  }
  std::size_t best_root = components.find(0);
  for (const auto& [root, a] : area) {
    if (a > area[best_root] || (a == area[best_root] && root < best_root)) best_root = root;
  }
  std::vector<Triangle> component;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (components.find(i) == best_root) component.push_back(kept[i]);
  }

  // Triangles are CCW in lattice orientation; lattice and input frames
  // differ only by translation and positive scale.
  std::vector<std::size_t> outer;
  double outer_area = 0.0;
  for (auto& loop : boundary_loops(component, coords)) {
    std::vector<Point2> ring;
    ring.reserve(loop.size());
    for (std::size_t v : loop) ring.push_back(coords[v]);
    const double a = signed_area(ring);
    if (a > outer_area) {
      outer_area = a;
      outer = std::move(loop);
    }
  }
  if (outer.size() < 3) throw DegenerateGeometry("alpha_shape: no outer boundary");
  return to_polygon(points, lattice, outer);
}

double median_nn_distance(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 2) throw InvalidInput("median_nn_distance: need at least 2 points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = points[order[i]];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2& q = points[order[j]];
      if (q.x - p.x >= best) break;
      best = std::min(best, std::hypot(q.x - p.x, q.y - p.y));
    }
    for (std::size_t j = i; j-- > 0;) {
      const Point2& q = points[order[j]];
      if (p.x - q.x >= best) break;
      best = std::min(best, std::hypot(q.x - p.x, q.y - p.y));
    }
    nearest[order[i]] = best;
  }
  const auto mid = nearest.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(nearest.begin(), mid, nearest.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(nearest.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace contournet
