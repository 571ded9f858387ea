#include "contournet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace contournet {

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<AnnotationRecord>& gts,
                             double iou_thresh, int resolution) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw InvalidConfig("match_detections: IoU threshold must be in (0, 1)");
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    try {
      validate_polygon(dets[i].polygon);
    } catch (const InvalidPolygon& e) {
      throw InvalidPolygon("detection " + std::to_string(i) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    try {
      validate_polygon(gts[i].polygon);
    } catch (const InvalidPolygon& e) {
      throw InvalidPolygon("ground truth " + std::to_string(i) + ": " + e.what());
    }
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  MatchResult result;
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : order) {
    double best_iou = -1.0;
    std::size_t best_gt = gts.size();
    bool best_ignored = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const bool ignored = gts[g].ignore;
      if (!ignored && taken[g]) continue;
      const double iou = polygon_iou(dets[d].polygon, gts[g].polygon, resolution);
      const bool better = iou > best_iou || (iou == best_iou && best_ignored && !ignored);
      if (better) {
        best_iou = iou;
        best_gt = g;
        best_ignored = ignored;
      }
    }
    if (best_gt < gts.size() && best_iou >= iou_thresh) {
      if (best_ignored) {
        ++result.ignored;
        result.ignored_dets.push_back(d);
      } else {
        taken[best_gt] = true;
        ++result.tp;
        result.pairs.push_back({d, best_gt, best_iou});
      }
    } else {
      ++result.fp;
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gts[g].ignore && !taken[g]) ++result.fn;
  }
  return result;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf out;
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (out.precision + out.recall > 0.0) {
    out.f = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

Prf prf(const MatchResult& m) { return prf(m.tp, m.fp, m.fn); }

std::vector<double> auto_bucket_boundaries(const std::vector<AnnotationRecord>& gts) {
  std::vector<double> areas;
  for (const auto& g : gts) {
    if (!g.ignore) areas.push_back(polygon_area(g.polygon));
  }
  if (areas.empty()) return {};
  std::sort(areas.begin(), areas.end());
  // Nearest-rank tertiles.
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * areas.size()));
    return areas[std::min(areas.size() - 1, idx == 0 ? 0 : idx - 1)];
  };
  std::vector<double> bounds = {rank(1.0 / 3.0), rank(2.0 / 3.0)};
  // A boundary is the lower edge of the next bucket; nudge it past the
  // tertile value so that value stays in the lower bucket.
  for (auto& b : bounds) b = std::nextafter(b, std::numeric_limits<double>::infinity());
  return bounds;
}

std::size_t bucket_of(double area, const std::vector<double>& boundaries) {
  return static_cast<std::size_t>(
      std::upper_bound(boundaries.begin(), boundaries.end(), area) - boundaries.begin());
}

namespace {

std::vector<BucketMetrics> empty_buckets(const std::vector<double>& boundaries) {
  const std::size_t count = boundaries.size() + 1;
  static const char* kSizeNames[] = {"small", "middle", "large"};
  std::vector<BucketMetrics> buckets(count);
  for (std::size_t b = 0; b < count; ++b) {
    buckets[b].name = count == 3 ? kSizeNames[b] : "bucket" + std::to_string(b);
    buckets[b].lower = b == 0 ? 0.0 : boundaries[b - 1];
    buckets[b].upper = b + 1 < count ? boundaries[b] : std::numeric_limits<double>::infinity();
  }
  return buckets;
}

}  // namespace

std::vector<BucketMetrics> bucketed_prf(const std::vector<Detection>& dets,
                                        const std::vector<AnnotationRecord>& gts,
                                        const std::vector<double>& boundaries,
                                        double iou_thresh, int resolution) {
  if (!std::is_sorted(boundaries.begin(), boundaries.end())) {
    throw InvalidConfig("bucketed_prf: bucket boundaries must be sorted ascending");
  }
  const MatchResult m = match_detections(dets, gts, iou_thresh, resolution);
  auto buckets = empty_buckets(boundaries);

  std::vector<bool> det_matched(dets.size(), false);
  std::vector<bool> det_ignored(dets.size(), false);
  std::vector<bool> gt_matched(gts.size(), false);
  for (std::size_t d : m.ignored_dets) det_ignored[d] = true;
  for (const auto& pair : m.pairs) {
    det_matched[pair.det] = true;
    gt_matched[pair.gt] = true;
    const std::size_t db = bucket_of(polygon_area(dets[pair.det].polygon), boundaries);
    const std::size_t gb = bucket_of(polygon_area(gts[pair.gt].polygon), boundaries);
    if (db == gb) {
      ++buckets[db].tp;
    } else {
      ++buckets[db].fp;
      ++buckets[gb].fn;
    }
  }
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (!det_matched[d] && !det_ignored[d]) {
      ++buckets[bucket_of(polygon_area(dets[d].polygon), boundaries)].fp;
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gts[g].ignore && !gt_matched[g]) {
      ++buckets[bucket_of(polygon_area(gts[g].polygon), boundaries)].fn;
    }
  }
  for (auto& b : buckets) b.metrics = prf(b.tp, b.fp, b.fn);
  return buckets;
}

void accumulate_buckets(std::vector<BucketMetrics>& into, const std::vector<BucketMetrics>& more) {
  if (into.empty()) {
    into = more;
    return;
  }
  if (into.size() != more.size()) throw InvalidConfig("accumulate_buckets: bucket count mismatch");
  for (std::size_t b = 0; b < into.size(); ++b) {
    into[b].tp += more[b].tp;
    into[b].fp += more[b].fp;
    into[b].fn += more[b].fn;
    into[b].metrics = prf(into[b].tp, into[b].fp, into[b].fn);
  }
}

}  // namespace contournet
