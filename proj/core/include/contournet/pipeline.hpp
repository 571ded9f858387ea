#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "contournet/decode.hpp"
#include "contournet/evaluation.hpp"
#include "contournet/io.hpp"
#include "contournet/lotm.hpp"
#include "contournet/synthetic.hpp"

namespace contournet {

struct DemoConfig {
  std::uint64_t seed = 0;
  int height = 720;
  int width = 1280;
  int train_scenes = 16;
  int test_scenes = 8;
  /// Per-scene counts; negative picks the size-based defaults.
  int texts_per_scene = -1;
  int streaks_per_scene = -1;
  double band = kDefaultBandWidth;
  double iou_threshold = kDefaultMatchIou;
  TrainConfig train;
  DecodeConfig decode;
  SceneOptions scene;
  int threads = 1;

  void validate() const;
};

/// Training hyper-parameters the demo uses unless told otherwise.
TrainConfig default_demo_training();
/// Decoding parameters for synthetic scenes: texts are at least
/// SceneOptions::text_margin apart, so clusters may link across small gaps.
DecodeConfig default_demo_decode();

struct DemoSceneResult {
  SyntheticScene scene;
  LotmMaps maps;
  ContourCandidates candidates;
  std::vector<Detection> detections;
  MatchResult match;
};

struct DemoResult {
  TrainResult training;
  std::vector<DemoSceneResult> test;
  EvaluationSummary summary;
  Prf metrics;
  /// Candidates on streak pixels, summed over the held-out scenes.
  std::size_t streak_candidates = 0;
  std::size_t streak_pixels = 0;
};

/// Seed of scene `index` in split `split` (0 = train, 1 = test).
std::uint64_t scene_seed(std::uint64_t seed, int split, int index);

/// Builds the training split, trains both directional kernels, then
/// decodes and scores the held-out split.
DemoResult run_demo(const DemoConfig& cfg);

/// Evaluates already trained kernels on the held-out split of `cfg`.
std::vector<DemoSceneResult> evaluate_kernels(const DemoConfig& cfg, const DirectionalKernel& hk,
                                              const DirectionalKernel& vk);

/// metrics.txt, summary.txt, loss_curve.csv, kernels.txt and, per held-out scene, the
/// image (PGM), both heatmaps, detections, ground truth and an SVG overlay.
void write_demo_artifacts(const DemoResult& result, const std::filesystem::path& dir);

}  // namespace contournet
