#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contournet/detection.hpp"
#include "contournet/geometry.hpp"

namespace contournet {

/// How directional NMS treats equal values inside one window.
enum class NmsTies {
  /// Only the first cell (leftmost / topmost) of a run of equal maxima
  /// survives.
  kFirstWins,
  /// Every cell equal to its window maximum survives.
  kKeepAll,
};

enum class RescoreMode {
  /// Both heatmaps must pass NMS and the threshold (the full re-scoring).
  kOrthogonal,
  /// Horizontal heatmap only; the single-direction ablation.
  kSingleDirection,
  /// No NMS; a cell passes if either heatmap exceeds the threshold.
  kNone,
};

struct Candidate {
  int row = 0;
  int col = 0;
  double confidence = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ContourCandidates {
  int height = 0;
  int width = 0;
  std::vector<Candidate> points;
};

struct DecodeConfig {
  double theta = 0.5;
  int nms_window = 3;
  NmsTies nms_ties = NmsTies::kKeepAll;
  /// With keep-all ties, values within this margin of the window maximum
  /// also survive.
  double nms_tolerance = 0.0;
  RescoreMode mode = RescoreMode::kOrthogonal;
  double alpha_scale = 1.5;
  int min_candidates = 4;
  /// Candidates closer than this (pixels) belong to the same region when a
  /// whole image is decoded.
  double cluster_link = 5.0;
  int iou_resolution = 256;

  void validate() const;
};

/// One-dimensional sliding-window local-maximum suppression along rows
/// (horizontal) or columns (vertical). Suppressed cells become 0. A
/// positive tolerance requires keep-all ties.
FloatGrid directional_nms(const FloatGrid& map, Orientation orientation, int window,
                          NmsTies ties = NmsTies::kFirstWins, double tolerance = 0.0);

/// Contour point candidates from the two heatmaps. In orthogonal mode a
/// cell qualifies when both NMS-filtered maps exceed theta; its confidence
/// is the smaller of the two filtered values.
ContourCandidates rescore(const FloatGrid& hmap, const FloatGrid& vmap,
                          const DecodeConfig& cfg = {});

/// Pixel-center coordinates (col + 0.5, row + 0.5) of each candidate.
std::vector<Point2> candidate_points(std::span<const Candidate> candidates);

Polygon convex_hull(std::span<const Point2> points);

/// Concave hull of `points`: Delaunay triangles with circumradius above
/// `alpha` are dropped, enclosed holes are filled back in, and the outer
/// boundary of the largest (by area) edge-connected remainder is returned.
/// Falls back to the convex hull when every triangle is dropped. Output
/// vertices are input points.
Polygon alpha_shape(std::span<const Point2> points, double alpha);

double median_nn_distance(std::span<const Point2> points);

struct RegionDecode {
  std::optional<Detection> detection;
  /// Why no detection was produced; empty on success.
  std::string diagnostic;
  ContourCandidates candidates;
};

/// Polygon from an already extracted candidate set.
RegionDecode reconstruct(std::span<const Candidate> candidates, const DecodeConfig& cfg = {});

/// Re-scoring followed by reconstruction, treating the whole grid as one
/// region.
RegionDecode decode_region(const FloatGrid& hmap, const FloatGrid& vmap,
                           const DecodeConfig& cfg = {});

/// Single-linkage groups of candidates at distance <= link.
std::vector<std::vector<Candidate>> cluster_candidates(std::span<const Candidate> candidates,
                                                       double link);

/// Clustering, then one reconstruction per cluster.
std::vector<Detection> decode_candidates(const ContourCandidates& candidates,
                                         const DecodeConfig& cfg = {});

/// Re-scoring followed by decode_candidates.
std::vector<Detection> decode_image(const FloatGrid& hmap, const FloatGrid& vmap,
                                    const DecodeConfig& cfg = {});

}  // namespace contournet
