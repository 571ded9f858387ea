#include "contournet/decode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace contournet {

void DecodeConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidConfig("decode: theta must be in (0, 1)");
  if (nms_window < 1 || nms_window % 2 == 0) {
    throw InvalidConfig("decode: NMS window must be odd and >= 1");
  }
  if (!(alpha_scale > 0.0)) throw InvalidConfig("decode: alpha scale must be positive");
  if (min_candidates < 4) throw InvalidConfig("decode: min_candidates must be >= 4");
  if (!(cluster_link > 0.0)) throw InvalidConfig("decode: cluster link must be positive");
  if (!(nms_tolerance >= 0.0) || (nms_tolerance > 0.0 && nms_ties != NmsTies::kKeepAll)) {
    throw InvalidConfig("decode: NMS tolerance must be >= 0 and needs keep-all ties");
  }
  if (iou_resolution < 16) throw InvalidConfig("decode: IoU resolution must be >= 16");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// For each position j, the maximum of line[j - radius .. j - 1] (clipped),
// via a monotone deque.
void left_window_max(const std::vector<double>& line, int radius, std::vector<double>& out) {
  const int n = static_cast<int>(line.size());
  std::deque<int> dq;
  for (int j = 0; j < n; ++j) {
    while (!dq.empty() && dq.front() < j - radius) dq.pop_front();
    out[j] = dq.empty() ? kNegInf : line[dq.front()];
    while (!dq.empty() && line[dq.back()] <= line[j]) dq.pop_back();
    dq.push_back(j);
  }
}

void suppress_line(std::vector<double>& line, int radius, NmsTies ties, double tolerance,
                   std::vector<double>& left, std::vector<double>& right,
                   std::vector<double>& reversed) {
  const int n = static_cast<int>(line.size());
  left_window_max(line, radius, left);
  reversed.assign(line.rbegin(), line.rend());
  left_window_max(reversed, radius, right);
  std::reverse(right.begin(), right.end());
  for (int j = 0; j < n; ++j) {
    const double v = line[j];
    const bool beats_left =
        ties == NmsTies::kFirstWins ? v > left[j] : v + tolerance >= left[j];
    const bool keep = beats_left && v + tolerance >= right[j];
    reversed[j] = keep ? v : 0.0;
  }
  std::copy(reversed.begin(), reversed.begin() + n, line.begin());
}

}  // namespace

FloatGrid directional_nms(const FloatGrid& map, Orientation orientation, int window,
                          NmsTies ties, double tolerance) {
  if (window < 1 || window % 2 == 0) {
    throw InvalidConfig("directional_nms: window must be odd and >= 1, got " +
                        std::to_string(window));
  }
  if (!(tolerance >= 0.0) || (tolerance > 0.0 && ties != NmsTies::kKeepAll)) {
    throw InvalidConfig("directional_nms: tolerance must be >= 0 and needs keep-all ties");
  }
  FloatGrid out = map;
  if (window == 1) return out;
  const int radius = window / 2;
  const bool horizontal = orientation == Orientation::kHorizontal;
  const int lines = horizontal ? map.height() : map.width();
  const int length = horizontal ? map.width() : map.height();
  std::vector<double> line(length), left(length), right(length), scratch(length);
  for (int l = 0; l < lines; ++l) {
    for (int t = 0; t < length; ++t) line[t] = horizontal ? map(l, t) : map(t, l);
    suppress_line(line, radius, ties, tolerance, left, right, scratch);
    for (int t = 0; t < length; ++t) {
      if (horizontal) out(l, t) = line[t];
      else out(t, l) = line[t];
    }
  }
  return out;
}

ContourCandidates rescore(const FloatGrid& hmap, const FloatGrid& vmap,
                          const DecodeConfig& cfg) {
  cfg.validate();
  require_same_shape(hmap, vmap, "rescore");
  ContourCandidates out{hmap.height(), hmap.width(), {}};

  switch (cfg.mode) {
    case RescoreMode::kOrthogonal: {
      const FloatGrid h = directional_nms(hmap, Orientation::kHorizontal, cfg.nms_window, cfg.nms_ties,
                                           cfg.nms_tolerance);
      const FloatGrid v = directional_nms(vmap, Orientation::kVertical, cfg.nms_window, cfg.nms_ties,
                                           cfg.nms_tolerance);
      for (int i = 0; i < h.height(); ++i) {
        for (int j = 0; j < h.width(); ++j) {
          if (h(i, j) > cfg.theta && v(i, j) > cfg.theta) {
            out.points.push_back({i, j, std::min(h(i, j), v(i, j))});
          }
        }
      }
      break;
    }
    case RescoreMode::kSingleDirection: {
      const FloatGrid h = directional_nms(hmap, Orientation::kHorizontal, cfg.nms_window, cfg.nms_ties,
                                           cfg.nms_tolerance);
      for (int i = 0; i < h.height(); ++i) {
        for (int j = 0; j < h.width(); ++j) {
          if (h(i, j) > cfg.theta) out.points.push_back({i, j, h(i, j)});
        }
      }
      break;
    }
    case RescoreMode::kNone: {
      for (int i = 0; i < hmap.height(); ++i) {
        for (int j = 0; j < hmap.width(); ++j) {
          const double best = std::max(hmap(i, j), vmap(i, j));
          if (best > cfg.theta) out.points.push_back({i, j, best});
        }
      }
      break;
    }
  }
  return out;
}

std::vector<Point2> candidate_points(std::span<const Candidate> candidates) {
  std::vector<Point2> pts;
  pts.reserve(candidates.size());
  for (const auto& c : candidates) pts.push_back({c.col + 0.5, c.row + 0.5});
  return pts;
}

RegionDecode reconstruct(std::span<const Candidate> candidates, const DecodeConfig& cfg) {
  cfg.validate();
  RegionDecode result;
  result.candidates.points.assign(candidates.begin(), candidates.end());
  if (candidates.size() < static_cast<std::size_t>(cfg.min_candidates)) {
    result.diagnostic = "too few candidates (" + std::to_string(candidates.size()) + ")";
    return result;
  }
  const auto pts = candidate_points(candidates);
  const double alpha = cfg.alpha_scale * median_nn_distance(pts);
  try {
    Polygon poly = alpha_shape(pts, alpha);
    double score = 0.0;
    for (const auto& c : candidates) score += c.confidence;
    score /= static_cast<double>(candidates.size());
    result.detection = Detection{std::move(poly), std::clamp(score, 0.0, 1.0)};
  } catch (const DegenerateGeometry& e) {
    result.diagnostic = e.what();
  } catch (const TooFewCandidates& e) {
    result.diagnostic = e.what();
  }
  return result;
}

RegionDecode decode_region(const FloatGrid& hmap, const FloatGrid& vmap,
                           const DecodeConfig& cfg) {
  ContourCandidates cands = rescore(hmap, vmap, cfg);
  RegionDecode result = reconstruct(cands.points, cfg);
  result.candidates = std::move(cands);
  return result;
}

std::vector<std::vector<Candidate>> cluster_candidates(std::span<const Candidate> candidates,
                                                       double link) {
  if (!(link > 0.0)) throw InvalidConfig("cluster_candidates: link must be positive");
  const std::size_t n = candidates.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // Bucket by cells of side `link`; neighbours can only be in adjacent cells.
  auto cell_of = [&](const Candidate& c) {
    return std::make_pair(static_cast<long long>(std::floor(c.col / link)),
                          static_cast<long long>(std::floor(c.row / link)));
  };
  auto key = [](long long cx, long long cy) {
    return (static_cast<unsigned long long>(cx) << 32) ^ static_cast<unsigned long long>(cy & 0xffffffff);
  };
  std::unordered_map<unsigned long long, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(candidates[i]);
    cells[key(cx, cy)].push_back(i);
  }
  const double link2 = link * link;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(candidates[i]);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find(key(cx + dx, cy + dy));
        if (it == cells.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i) continue;
          const double ddx = candidates[i].col - candidates[j].col;
          const double ddy = candidates[i].row - candidates[j].row;
          if (ddx * ddx + ddy * ddy <= link2) {
            const std::size_t a = find(i);
            const std::size_t b = find(j);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
          }
        }
      }
    }
  }

  std::vector<std::vector<Candidate>> clusters;
  std::unordered_map<std::size_t, std::size_t> index_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    auto [it, inserted] = index_of_root.emplace(root, clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].push_back(candidates[i]);
  }
  return clusters;
}

std::vector<Detection> decode_candidates(const ContourCandidates& cands,
                                         const DecodeConfig& cfg) {
  cfg.validate();
  std::vector<Detection> detections;
  for (const auto& cluster : cluster_candidates(cands.points, cfg.cluster_link)) {
    RegionDecode region = reconstruct(cluster, cfg);
    if (region.detection) detections.push_back(std::move(*region.detection));
  }
  return detections;
}

std::vector<Detection> decode_image(const FloatGrid& hmap, const FloatGrid& vmap,
                                    const DecodeConfig& cfg) {
  return decode_candidates(rescore(hmap, vmap, cfg), cfg);
}

}  // namespace contournet
