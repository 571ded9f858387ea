#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "contournet/geometry.hpp"

namespace contournet {

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before
/// any log is taken.
inline constexpr double kProbEpsilon = 1e-7;

struct LossWeights {
  double a_reg = 1.0;
  double hcp = 1.0;
  double vcp = 1.0;
  double box_cls = 1.0;
  double box_reg = 1.0;
};

/// The six terms of the detector objective.
struct LossComponents {
  double arpn_cls = 0.0;
  double arpn_reg = 0.0;
  double hcp = 0.0;
  double vcp = 0.0;
  double box_cls = 0.0;
  double box_reg = 0.0;
};

struct ScalarLoss {
  double loss = 0.0;
  double grad = 0.0;
};

struct VectorLoss {
  double loss = 0.0;
  std::vector<double> grad;
};

struct BoxLoss {
  double loss = 0.0;
  /// d loss / d (x_tl, y_tl, x_rb, y_rb) of the prediction.
  std::array<double, 4> grad{};
};

struct GridLoss {
  double loss = 0.0;
  FloatGrid grad;
};

/// -log((I + 1) / (U + 1)). Where an edge of `pred` coincides with the
/// matching edge of `gt` the function has a kink; the returned component is
/// the minimum-norm element of the subdifferential there (0 at pred == gt).
BoxLoss iou_loss(const AABox& pred, const AABox& gt);

/// Class-balanced binary cross-entropy averaged over non-ignored pixels.
/// Positives are weighted by N_neg / N, negatives by N_pos / N; when either
/// count is zero both weights fall back to 1. The gradient is zero where the
/// clamp is active.
GridLoss balanced_bce(const FloatGrid& pred, const BitMask& label,
                      const BitMask* ignore = nullptr);

VectorLoss smooth_l1(std::span<const double> pred, std::span<const double> target,
                     double beta = 1.0);

ScalarLoss cross_entropy(double prob, int label);

double combined_loss(const LossComponents& components, const LossWeights& weights);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::vector<double> relative_errors;
  std::vector<double> analytic;
  std::vector<double> numeric;
  double step = 0.0;
};

/// Evaluates the loss at `params`. When `grad` is non-empty it has the
/// same size as `params` and receives the analytic gradient.
using LossEvaluator =
    std::function<double(std::span<const double> params, std::span<double> grad)>;

inline constexpr double kDefaultGradStep = 1e-5;

/// Central differences against the analytic gradient. Relative error per
/// parameter is |a - n| / max(1, |a|, |n|).
GradCheckReport gradient_check(const LossEvaluator& evaluator,
                               std::span<const double> params,
                               double step = kDefaultGradStep);

}  // namespace contournet
