#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "contournet/detection.hpp"
#include "contournet/label_gen.hpp"

namespace contournet {

struct MatchedPair {
  std::size_t det = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ignored = 0;
  std::vector<MatchedPair> pairs;
  /// Indices of detections discarded because they overlap a DO-NOT-CARE
  /// region.
  std::vector<std::size_t> ignored_dets;
};

struct Prf {
  double recall = 0.0;
  double precision = 0.0;
  double f = 0.0;
};

inline constexpr double kDefaultMatchIou = 0.5;

/// Greedy one-to-one matching in descending score order (stable, so ties
/// keep detection order). Each detection takes the candidate with the
/// highest IoU among unmatched positive GT and all DO-NOT-CARE GT; a
/// DO-NOT-CARE winner discards the detection instead of matching it.
/// Positive GT win exact IoU ties, then lower index.
MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<AnnotationRecord>& gts,
                             double iou_thresh = kDefaultMatchIou,
                             int resolution = kDefaultIouResolution);

/// Zero denominators give 0.
Prf prf(const MatchResult& m);
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn);

struct BucketMetrics {
  std::string name;
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // exclusive; +inf for the last bucket
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  Prf metrics;
};

/// Area tertiles of the non-ignored GT polygons.
std::vector<double> auto_bucket_boundaries(const std::vector<AnnotationRecord>& gts);

/// Bucket index of an area: the number of boundaries <= area.
std::size_t bucket_of(double area, const std::vector<double>& boundaries);

/// Per-size-bucket metrics. A matched pair counts as a true positive only
/// when detection and GT fall into the same bucket; otherwise it becomes a
/// false positive in the detection's bucket and a miss in the GT's.
std::vector<BucketMetrics> bucketed_prf(const std::vector<Detection>& dets,
                                        const std::vector<AnnotationRecord>& gts,
                                        const std::vector<double>& boundaries,
                                        double iou_thresh = kDefaultMatchIou,
                                        int resolution = kDefaultIouResolution);

/// Adds per-bucket counts of `more` into `into` and recomputes metrics.
void accumulate_buckets(std::vector<BucketMetrics>& into, const std::vector<BucketMetrics>& more);

}  // namespace contournet
