#include "contournet/losses.hpp"

#include <algorithm>
#include <cmath>

namespace contournet {

namespace {

double clamp_prob(double p) {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

// Minimum-norm element of the closed interval spanned by two one-sided
// derivatives.
double min_norm(double a, double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return lo > 0.0 ? lo : hi;
}

}  // namespace

BoxLoss iou_loss(const AABox& pred, const AABox& gt) {
  const double wp = pred.width();
  const double hp = pred.height();
  const double ix1 = std::max(pred.x_tl, gt.x_tl);
  const double iy1 = std::max(pred.y_tl, gt.y_tl);
  const double ix2 = std::min(pred.x_rb, gt.x_rb);
  const double iy2 = std::min(pred.y_rb, gt.y_rb);
  const double iw = std::max(0.0, ix2 - ix1);
  const double ih = std::max(0.0, iy2 - iy1);
  const double inter = iw * ih;
  const double uni = wp * hp + gt.area() - inter;

  BoxLoss out;
  out.loss = -std::log((inter + 1.0) / (uni + 1.0));

  // d_area: derivative of the prediction's area w.r.t. the coordinate.
  // d_inter: derivative of the intersection when the prediction's edge is
  // the one bounding the intersection.
  auto component = [&](double d_area, double d_inter, double own, double other,
                       bool inside_when_greater) {
    const double g_in = -d_inter / (inter + 1.0) + (d_area - d_inter) / (uni + 1.0);
    const double g_out = d_area / (uni + 1.0);
    if (own == other) return min_norm(g_in, g_out);
    const bool inside = inside_when_greater ? own > other : own < other;
    return inside ? g_in : g_out;
  };
  const bool overlap = iw > 0.0 && ih > 0.0;
  const double dx_inter = overlap ? ih : 0.0;
  const double dy_inter = overlap ? iw : 0.0;
  out.grad[0] = component(-hp, -dx_inter, pred.x_tl, gt.x_tl, true);
  out.grad[1] = component(-wp, -dy_inter, pred.y_tl, gt.y_tl, true);
  out.grad[2] = component(hp, dx_inter, pred.x_rb, gt.x_rb, false);
  out.grad[3] = component(wp, dy_inter, pred.y_rb, gt.y_rb, false);
  return out;
}

GridLoss balanced_bce(const FloatGrid& pred, const BitMask& label,
                      const BitMask* ignore) {
  require_same_shape(pred, label, "balanced_bce");
  if (ignore != nullptr) require_same_shape(pred, *ignore, "balanced_bce ignore");

  const std::size_t n = pred.size();
  auto kept = [&](std::size_t i) {
    return ignore == nullptr || ignore->values()[i] == 0;
  };
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept(i)) continue;
    if (label.values()[i]) ++n_pos;
    else ++n_neg;
  }

  GridLoss out{0.0, FloatGrid(pred.height(), pred.width(), 0.0)};
  const std::size_t total = n_pos + n_neg;
  if (total == 0) return out;

  double w_pos = 1.0;
  double w_neg = 1.0;
  if (n_pos > 0 && n_neg > 0) {
    w_pos = static_cast<double>(n_neg) / static_cast<double>(total);
    w_neg = static_cast<double>(n_pos) / static_cast<double>(total);
  }
  const double inv_total = 1.0 / static_cast<double>(total);

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept(i)) continue;
    const double raw = pred.values()[i];
    const double p = clamp_prob(raw);
    const bool clamped = p != raw;
    if (label.values()[i]) {
      sum += -w_pos * std::log(p);
      if (!clamped) out.grad.values()[i] = -w_pos / p * inv_total;
    } else {
      sum += -w_neg * std::log(1.0 - p);
      if (!clamped) out.grad.values()[i] = w_neg / (1.0 - p) * inv_total;
    }
  }
  out.loss = sum * inv_total;
  return out;
}

VectorLoss smooth_l1(std::span<const double> pred, std::span<const double> target,
                     double beta) {
  if (pred.size() != target.size()) {
    throw InvalidInput("smooth_l1: length mismatch");
  }
  if (!(beta > 0.0)) throw InvalidConfig("smooth_l1: beta must be positive");
  VectorLoss out{0.0, std::vector<double>(pred.size(), 0.0)};
  if (pred.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    const double ad = std::abs(d);
    if (ad < beta) {
      out.loss += 0.5 * d * d / beta;
      out.grad[i] = d / beta * inv_n;
    } else {
      out.loss += ad - 0.5 * beta;
      out.grad[i] = (d > 0.0 ? 1.0 : -1.0) * inv_n;
    }
  }
  out.loss *= inv_n;
  return out;
}

ScalarLoss cross_entropy(double prob, int label) {
  if (label != 0 && label != 1) throw InvalidInput("cross_entropy: label must be 0 or 1");
  const double p = clamp_prob(prob);
  const bool clamped = p != prob;
  ScalarLoss out;
  if (label == 1) {
    out.loss = -std::log(p);
    out.grad = clamped ? 0.0 : -1.0 / p;
  } else {
    out.loss = -std::log(1.0 - p);
    out.grad = clamped ? 0.0 : 1.0 / (1.0 - p);
  }
  return out;
}

double combined_loss(const LossComponents& c, const LossWeights& w) {
  const double parts[] = {c.arpn_cls, c.arpn_reg, c.hcp, c.vcp, c.box_cls, c.box_reg};
  for (double v : parts) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidInput("combined_loss: components must be finite and non-negative");
    }
  }
  const double weights[] = {w.a_reg, w.hcp, w.vcp, w.box_cls, w.box_reg};
  for (double v : weights) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidConfig("combined_loss: weights must be finite and non-negative");
    }
  }
  return c.arpn_cls + w.a_reg * c.arpn_reg + w.hcp * c.hcp + w.vcp * c.vcp +
         w.box_cls * c.box_cls + w.box_reg * c.box_reg;
}

GradCheckReport gradient_check(const LossEvaluator& evaluator,
                               std::span<const double> params, double step) {
  if (!(step > 0.0)) throw InvalidConfig("gradient_check: step must be positive");
  const std::size_t n = params.size();
  GradCheckReport report;
  report.step = step;
  report.analytic.assign(n, 0.0);
  report.numeric.assign(n, 0.0);
  report.relative_errors.assign(n, 0.0);

  std::vector<double> x(params.begin(), params.end());
  const double base = evaluator(x, report.analytic);
  if (!std::isfinite(base)) throw NumericalError("gradient_check: non-finite loss");

  for (std::size_t i = 0; i < n; ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = evaluator(x, {});
    x[i] = saved - step;
    const double minus = evaluator(x, {});
    x[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericalError("gradient_check: non-finite loss at parameter " +
                           std::to_string(i));
    }
    const double numeric = (plus - minus) / (2.0 * step);
    const double analytic = report.analytic[i];
    if (!std::isfinite(analytic)) {
      throw NumericalError("gradient_check: non-finite analytic gradient at parameter " +
                           std::to_string(i));
    }
    report.numeric[i] = numeric;
    const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    report.relative_errors[i] = std::abs(analytic - numeric) / denom;
    report.max_relative_error = std::max(report.max_relative_error, report.relative_errors[i]);
  }
  return report;
}

}  // namespace contournet
