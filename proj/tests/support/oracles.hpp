#pragma once

// Slow, obviously-correct reference implementations used by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "contournet/decode.hpp"
#include "contournet/geometry.hpp"
#include "contournet/lotm.hpp"

namespace oracle {

using namespace contournet;

// Distance from every foreground center to every background center, plus the
// nearest cell of the virtual background ring around the grid.
inline FloatGrid brute_edt(const BitMask& mask) {
  const int h = mask.height(), w = mask.width();
  FloatGrid out(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask(r, c)) continue;
      const int border = std::min({r + 1, h - r, c + 1, w - c});
      double best = static_cast<double>(border) * border;
      for (int rr = 0; rr < h; ++rr) {
        for (int cc = 0; cc < w; ++cc) {
          if (mask(rr, cc)) continue;
          const double d = static_cast<double>(rr - r) * (rr - r) + static_cast<double>(cc - c) * (cc - c);
          best = std::min(best, d);
        }
      }
      out(r, c) = std::sqrt(best);
    }
  }
  return out;
}

// Scans the whole window around each cell.
inline FloatGrid brute_nms(const FloatGrid& map, Orientation o, int window, NmsTies ties,
                           double tol = 0.0) {
  const int radius = window / 2;
  FloatGrid out(map.height(), map.width(), 0.0);
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const double v = map(r, c);
      bool keep = true;
      for (int d = -radius; d <= radius && keep; ++d) {
        if (d == 0) continue;
        const int rr = o == Orientation::kVertical ? r + d : r;
        const int cc = o == Orientation::kHorizontal ? c + d : c;
        if (!map.in_bounds(rr, cc)) continue;
        const double u = map(rr, cc);
        if (ties == NmsTies::kFirstWins) keep = d < 0 ? v > u : v >= u;
        else keep = v + tol >= u;
      }
      out(r, c) = keep ? v : 0.0;
    }
  }
  return out;
}

// Direct definition of the directional correlation with zero padding.
inline FloatGrid brute_conv(const FeatureStack& f, const DirectionalKernel& k) {
  const int half = (k.k - 1) / 2;
  FloatGrid out(f.height(), f.width(), k.bias);
  for (int r = 0; r < f.height(); ++r) {
    for (int c = 0; c < f.width(); ++c) {
      double acc = k.bias;
      for (int ch = 0; ch < f.channels(); ++ch) {
        for (int t = 0; t < k.k; ++t) {
          const int rr = k.orientation == Orientation::kVertical ? r + t - half : r;
          const int cc = k.orientation == Orientation::kHorizontal ? c + t - half : c;
          if (f.channel(ch).in_bounds(rr, cc)) acc += k.weight(ch, t) * f.channel(ch)(rr, cc);
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  auto on = [](const Point2& a, const Point2& b, const Point2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
  };
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on(q1, q2, p1)) || (d2 == 0 && on(q1, q2, p2)) ||
         (d3 == 0 && on(p1, p2, q1)) || (d4 == 0 && on(p1, p2, q2));
}

// O(n^2) check that no two non-adjacent edges touch and no vertex repeats.
inline bool is_simple(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[i] == v[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

// Star-shaped around (cx, cy), so always simple.
inline Polygon random_star(std::mt19937_64& rng, double cx, double cy, double rmin, double rmax,
                           int nmin = 5, int nmax = 12) {
  std::uniform_int_distribution<int> count(nmin, nmax);
  std::uniform_real_distribution<double> radius(rmin, rmax), jitter(-0.3, 0.3);
  const int n = count(rng);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * (i + 0.5 + jitter(rng)) / n;
    const double r = radius(rng);
    p.vertices.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return p;
}

inline Polygon box_polygon(double x0, double y0, double x1, double y1) {
  return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

inline FloatGrid to_float(const BitMask& m) {
  FloatGrid g(m.height(), m.width());
  for (std::size_t i = 0; i < m.size(); ++i) g.values()[i] = m.values()[i];
  return g;
}

}  // namespace oracle
