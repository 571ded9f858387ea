#pragma once

#include <cstdint>
#include <vector>

#include "contournet/label_gen.hpp"
#include "contournet/lotm.hpp"

namespace contournet {

/// A 1-px straight distractor line. Vertical streaks occupy column
/// `fixed`, rows start..end inclusive; horizontal ones row `fixed`.
struct Streak {
  Orientation orientation = Orientation::kVertical;
  int fixed = 0;
  int start = 0;
  int end = 0;

  int length() const noexcept { return end - start + 1; }
  friend bool operator==(const Streak&, const Streak&) = default;
};

struct SyntheticScene {
  FloatGrid image;
  std::vector<AnnotationRecord> texts;
  std::vector<Streak> streaks;
};

struct SceneOptions {
  /// Text interiors are a checkerboard of dark [0.25, 0.45] and bright
  /// [0.75, 1.0] cells, so intensity changes between every pair of
  /// horizontal and vertical neighbours.
  double streak_intensity = 0.5;
  /// Background is uniform noise in [0, background_noise].
  double background_noise = 0.05;
  /// Minimum gap between text boxes, and between a streak and any text box.
  int text_margin = 8;
  int streak_margin = 6;
  int max_attempts = 1000;
};

/// Deterministic per seed. Texts are axis-aligned rectangles or rotated
/// quadrilaterals between 24x12 and 56x28 px. Throws InvalidConfig for
/// dimensions below 32 or negative counts, PlacementError when a shape
/// cannot be placed within the retry budget.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, int height, int width, int n_texts,
                                        int n_streaks, const SceneOptions& options = {});

/// Pixels covered by the scene's streaks.
BitMask streak_mask(const SyntheticScene& scene);

/// Number of texts and streaks used when a demo does not specify them:
/// about one text per 5000 px (at most 40) and two streaks per three texts.
int default_text_count(int height, int width);
int default_streak_count(int n_texts);

/// Stand-in for backbone features: channel 0 is the intensity, channel 1
/// its 5x5 minimum filter, which is low wherever background is within two
/// pixels.
FeatureStack scene_features(const FloatGrid& image);

}  // namespace contournet
