#include "contournet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "contournet/losses.hpp"
#include "contournet/lotm.hpp"

namespace contournet {

namespace {

constexpr double kKinkMargin = 1e-3;

AABox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 20.0);
  std::uniform_real_distribution<double> size(0.5, 15.0);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

bool near_kink(const AABox& p, const AABox& g) {
  const double iw = std::min(p.x_rb, g.x_rb) - std::max(p.x_tl, g.x_tl);
  const double ih = std::min(p.y_rb, g.y_rb) - std::max(p.y_tl, g.y_tl);
  return std::abs(p.x_tl - g.x_tl) < kKinkMargin || std::abs(p.x_rb - g.x_rb) < kKinkMargin ||
         std::abs(p.y_tl - g.y_tl) < kKinkMargin || std::abs(p.y_rb - g.y_rb) < kKinkMargin ||
         std::abs(iw) < kKinkMargin || std::abs(ih) < kKinkMargin;
}

GradCheckReport iou_instance(std::mt19937_64& rng) {
  AABox pred, gt;
  do {
    pred = random_box(rng);
    gt = random_box(rng);
  } while (near_kink(pred, gt));
  const std::vector<double> params = {pred.x_tl, pred.y_tl, pred.x_rb, pred.y_rb};
  return gradient_check(
      [&](std::span<const double> p, std::span<double> grad) {
        const BoxLoss l = iou_loss({p[0], p[1], p[2], p[3]}, gt);
        if (!grad.empty()) std::copy(l.grad.begin(), l.grad.end(), grad.begin());
        return l.loss;
      },
      params);
}

GradCheckReport bce_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 12);
  std::uniform_real_distribution<double> prob(0.02, 0.98);
  std::bernoulli_distribution coin(0.4), rare(0.15);
  const int h = dim(rng), w = dim(rng);
  BitMask label(h, w, 0), ignore(h, w, 0);
  std::vector<double> params(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = prob(rng);
    label.values()[i] = coin(rng);
    ignore.values()[i] = rare(rng);
  }
  return gradient_check(
      [&](std::span<const double> p, std::span<double> grad) {
        const GridLoss l = balanced_bce(FloatGrid(h, w, std::vector<double>(p.begin(), p.end())),
                                        label, &ignore);
        if (!grad.empty()) std::copy(l.grad.values().begin(), l.grad.values().end(), grad.begin());
        return l.loss;
      },
      params);
}

GradCheckReport lotm_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(4, 12), chans(1, 3), kidx(0, 3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::bernoulli_distribution coin(0.3), rare(0.1);
  const int h = dim(rng), w = dim(rng), c = chans(rng), k = 1 + 2 * kidx(rng);
  FeatureStack features(c, h, w);
  for (int ch = 0; ch < c; ++ch) {
    for (double& v : features.channel(ch).values()) v = val(rng);
  }
  BitMask label(h, w, 0), ignore(h, w, 0);
  for (auto& v : label.values()) v = coin(rng);
  for (auto& v : ignore.values()) v = rare(rng);

  auto hk = DirectionalKernel::zeros(Orientation::kHorizontal, k, c);
  auto vk = DirectionalKernel::zeros(Orientation::kVertical, k, c);
  const std::size_t nw = hk.weights.size();
  std::vector<double> params(2 * nw + 2);
  for (double& p : params) p = 0.5 * val(rng);

  auto unpack = [&](std::span<const double> p) {
    std::copy(p.begin(), p.begin() + nw, hk.weights.begin());
    hk.bias = p[nw];
    std::copy(p.begin() + nw + 1, p.begin() + 2 * nw + 1, vk.weights.begin());
    vk.bias = p[2 * nw + 1];
  };
  return gradient_check(
      [&](std::span<const double> p, std::span<double> grad) {
        unpack(p);
        const LotmGradients g = lotm_backward(features, hk, vk, label, &ignore);
        if (!grad.empty()) {
          std::copy(g.grad_h.weights.begin(), g.grad_h.weights.end(), grad.begin());
          grad[nw] = g.grad_h.bias;
          std::copy(g.grad_v.weights.begin(), g.grad_v.weights.end(), grad.begin() + nw + 1);
          grad[2 * nw + 1] = g.grad_v.bias;
        }
        return g.loss;
      },
      params);
}

}  // namespace

std::vector<GradSuiteResult> run_gradient_suites(std::uint64_t seed, int instances,
                                                 double tolerance) {
  if (instances < 1) throw InvalidConfig("gradient suites: need at least one instance");
  using Generator = std::function<GradCheckReport(std::mt19937_64&)>;
  const std::pair<const char*, Generator> suites[] = {
      {"iou_loss", iou_instance}, {"balanced_bce", bce_instance}, {"lotm_backward", lotm_instance}};

  std::vector<GradSuiteResult> results;
  std::uint64_t stream = 0;
  for (const auto& [name, generate] : suites) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * ++stream));
    GradSuiteResult r;
    r.name = name;
    r.instances = instances;
    r.step = kDefaultGradStep;
    for (int i = 0; i < instances; ++i) {
      const GradCheckReport report = generate(rng);
      if (!(report.max_relative_error < tolerance)) ++r.failures;
      if (report.max_relative_error > r.max_relative_error) {
        r.max_relative_error = report.max_relative_error;
        r.worst_instance = i;
      }
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace contournet
