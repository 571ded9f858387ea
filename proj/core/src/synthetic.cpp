#include "contournet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace contournet {

namespace {

struct IntBox {
  double x0, y0, x1, y1;

  bool overlaps(const IntBox& o, double margin) const {
    return x0 - margin <= o.x1 && o.x0 - margin <= x1 && y0 - margin <= o.y1 && o.y0 - margin <= y1;
  }
};

IntBox box_of(const Polygon& poly) {
  const AABox b = bounding_box(poly);
  return {b.x_tl, b.y_tl, b.x_rb, b.y_rb};
}

IntBox box_of(const Streak& s) {
  // Pixel cells, not centers: a streak pixel (r, c) spans [c, c + 1].
  if (s.orientation == Orientation::kVertical) {
    return {double(s.fixed), double(s.start), double(s.fixed + 1), double(s.end + 1)};
  }
  return {double(s.start), double(s.fixed), double(s.end + 1), double(s.fixed + 1)};
}

Polygon make_quad(std::mt19937_64& rng, int height, int width) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = std::min(24.0 + 32.0 * unit(rng), width - 4.0);
  const double h = std::min(12.0 + 16.0 * unit(rng), height - 4.0);
  const bool rotated = unit(rng) < 0.5;
  const double angle = rotated ? (unit(rng) - 0.5) * (50.0 * M_PI / 180.0) : 0.0;
  const double cx = unit(rng) * width;
  const double cy = unit(rng) * height;
  const double c = std::cos(angle), s = std::sin(angle);
  const double hx[4] = {-w / 2, w / 2, w / 2, -w / 2};
  const double hy[4] = {-h / 2, -h / 2, h / 2, h / 2};
  Polygon poly;
  for (int k = 0; k < 4; ++k) {
    // Whole pixel corners keep axis-aligned texts free of half-covered
    // cells.
    double x = cx + c * hx[k] - s * hy[k];
    double y = cy + s * hx[k] + c * hy[k];
    if (!rotated) {
      x = std::round(x);
      y = std::round(y);
    }
    poly.vertices.push_back({x, y});
  }
  return poly;
}

bool inside_frame(const Polygon& poly, int height, int width) {
  for (const auto& v : poly.vertices) {
    if (v.x < 1.0 || v.y < 1.0 || v.x > width - 1.0 || v.y > height - 1.0) return false;
  }
  return true;
}

}  // namespace

SyntheticScene generate_synthetic_scene(std::uint64_t seed, int height, int width, int n_texts,
                                        int n_streaks, const SceneOptions& opts) {
  if (height < 32 || width < 32) throw InvalidConfig("synthetic scene: dimensions must be >= 32");
  if (n_texts < 0 || n_streaks < 0) throw InvalidConfig("synthetic scene: negative count");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticScene scene;
  scene.image = FloatGrid(height, width, 0.0);
  for (double& v : scene.image.values()) v = opts.background_noise * unit(rng);

  std::vector<IntBox> text_boxes;
  for (int t = 0; t < n_texts; ++t) {
    bool placed = false;
    for (int attempt = 0; attempt < opts.max_attempts && !placed; ++attempt) {
      Polygon poly = make_quad(rng, height, width);
      if (!inside_frame(poly, height, width)) continue;
      const IntBox box = box_of(poly);
      const bool clash = std::any_of(text_boxes.begin(), text_boxes.end(), [&](const IntBox& o) {
        return box.overlaps(o, opts.text_margin);
      });
      if (clash) continue;
      text_boxes.push_back(box);
      scene.texts.push_back({std::move(poly), false, "text" + std::to_string(t)});
      placed = true;
    }
    if (!placed) {
      throw PlacementError("synthetic scene: could not place text " + std::to_string(t) +
                           " after " + std::to_string(opts.max_attempts) + " attempts");
    }
  }

  for (const auto& rec : scene.texts) {
    const BitMask mask = rasterize_polygon(rec.polygon, height, width);
    const int phase = static_cast<int>(rng() & 1u);
    for (int i = 0; i < height; ++i) {
      for (int j = 0; j < width; ++j) {
        if (!mask(i, j)) continue;
        const bool bright = ((i + j + phase) & 1) == 0;
        scene.image(i, j) = bright ? 0.75 + 0.25 * unit(rng) : 0.25 + 0.2 * unit(rng);
      }
    }
  }

  std::vector<IntBox> streak_boxes;
  for (int s = 0; s < n_streaks; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < opts.max_attempts && !placed; ++attempt) {
      Streak streak;
      streak.orientation = unit(rng) < 0.5 ? Orientation::kVertical : Orientation::kHorizontal;
      const bool vertical = streak.orientation == Orientation::kVertical;
      const int along = vertical ? height : width;
      const int across = vertical ? width : height;
      const int length = std::min(along - 4, 16 + static_cast<int>(unit(rng) * 33.0));
      streak.fixed = 2 + static_cast<int>(unit(rng) * (across - 4));
      streak.start = 2 + static_cast<int>(unit(rng) * (along - 3 - length));
      streak.end = streak.start + length - 1;
      const IntBox box = box_of(streak);
      const bool clash =
          std::any_of(text_boxes.begin(), text_boxes.end(),
                      [&](const IntBox& o) { return box.overlaps(o, opts.streak_margin); }) ||
          std::any_of(streak_boxes.begin(), streak_boxes.end(),
                      [&](const IntBox& o) { return box.overlaps(o, 3.0); });
      if (clash) continue;
      streak_boxes.push_back(box);
      for (int t = streak.start; t <= streak.end; ++t) {
        if (vertical) scene.image(t, streak.fixed) = opts.streak_intensity;
        else scene.image(streak.fixed, t) = opts.streak_intensity;
      }
      scene.streaks.push_back(streak);
      placed = true;
    }
    if (!placed) {
      throw PlacementError("synthetic scene: could not place streak " + std::to_string(s) +
                           " after " + std::to_string(opts.max_attempts) + " attempts");
    }
  }
  return scene;
}

BitMask streak_mask(const SyntheticScene& scene) {
  BitMask mask(scene.image.height(), scene.image.width(), 0);
  for (const auto& s : scene.streaks) {
    for (int t = s.start; t <= s.end; ++t) {
      if (s.orientation == Orientation::kVertical) mask(t, s.fixed) = 1;
      else mask(s.fixed, t) = 1;
    }
  }
  return mask;
}

int default_text_count(int height, int width) {
  const long long area = static_cast<long long>(height) * width;
  return static_cast<int>(std::clamp<long long>(area / 5000, 1, 40));
}

int default_streak_count(int n_texts) { return std::max(1, (2 * n_texts) / 3); }

FeatureStack scene_features(const FloatGrid& image) {
  // Separable 5x5 minimum filter; cells beyond the border count as 0.
  const int h = image.height(), w = image.width();
  FloatGrid rows(h, w, 0.0), out(h, w, 0.0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double m = image(i, j);
      for (int d = -2; d <= 2; ++d) m = std::min(m, image.in_bounds(i, j + d) ? image(i, j + d) : 0.0);
      rows(i, j) = m;
    }
  }
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double m = rows(i, j);
      for (int d = -2; d <= 2; ++d) m = std::min(m, rows.in_bounds(i + d, j) ? rows(i + d, j) : 0.0);
      out(i, j) = m;
    }
  }
  return FeatureStack({image, out});
}

}  // namespace contournet
