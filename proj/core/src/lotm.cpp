#include "contournet/lotm.hpp"

#include <cmath>
#include <random>

#include "contournet/losses.hpp"
#include "contournet/parallel.hpp"

namespace contournet {

DirectionalKernel DirectionalKernel::zeros(Orientation orientation, int k,
                                           int channels_in) {
  DirectionalKernel kernel{orientation, k, channels_in, {}, 0.0};
  if (k < 1 || k % 2 == 0) throw InvalidConfig("kernel size must be odd and >= 1");
  if (channels_in < 1) throw InvalidConfig("kernel needs at least one input channel");
  kernel.weights.assign(static_cast<std::size_t>(k) * channels_in, 0.0);
  return kernel;
}

void DirectionalKernel::validate() const {
  if (k < 1 || k % 2 == 0) {
    throw InvalidConfig("kernel size must be odd and >= 1, got " + std::to_string(k));
  }
  if (channels_in < 1) throw InvalidConfig("kernel needs at least one input channel");
  if (weights.size() != static_cast<std::size_t>(k) * channels_in) {
    throw InvalidConfig("kernel weight count does not match k * channels_in");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidConfig("kernel has a non-finite weight");
  }
  if (!std::isfinite(bias)) throw InvalidConfig("kernel has a non-finite bias");
}

FeatureStack::FeatureStack(std::vector<FloatGrid> channels)
    : channels_(std::move(channels)) {
  if (channels_.empty()) throw InvalidGrid("feature stack needs at least one channel");
  height_ = channels_.front().height();
  width_ = channels_.front().width();
  for (const auto& ch : channels_) {
    if (ch.height() != height_ || ch.width() != width_) {
      throw InvalidGrid("feature stack channels differ in shape");
    }
  }
}

FeatureStack::FeatureStack(int channels, int height, int width)
    : height_(height), width_(width) {
  if (channels < 1) throw InvalidGrid("feature stack needs at least one channel");
  channels_.assign(channels, FloatGrid(height, width, 0.0));
}

FeatureStack transpose(const FeatureStack& features) {
  std::vector<FloatGrid> out;
  out.reserve(features.channels());
  for (int c = 0; c < features.channels(); ++c) out.push_back(transpose(features.channel(c)));
  return FeatureStack(std::move(out));
}

FloatGrid directional_conv(const FeatureStack& features, const DirectionalKernel& kernel) {
  kernel.validate();
  if (kernel.channels_in != features.channels()) {
    throw InvalidConfig("directional_conv: kernel expects " +
                        std::to_string(kernel.channels_in) + " channels, input has " +
                        std::to_string(features.channels()));
  }
  const int h = features.height();
  const int w = features.width();
  const int r = (kernel.k - 1) / 2;
  const bool horizontal = kernel.orientation == Orientation::kHorizontal;
  FloatGrid out(h, w, kernel.bias);
  for (int c = 0; c < features.channels(); ++c) {
    const FloatGrid& in = features.channel(c);
    for (int t = 0; t < kernel.k; ++t) {
      const double wt = kernel.weight(c, t);
      const int off = t - r;
      if (horizontal) {
        const int c0 = std::max(0, -off);
        const int c1 = std::min(w, w - off);
        for (int i = 0; i < h; ++i) {
          for (int j = c0; j < c1; ++j) out(i, j) += wt * in(i, j + off);
        }
      } else {
        const int r0 = std::max(0, -off);
        const int r1 = std::min(h, h - off);
        for (int i = r0; i < r1; ++i) {
          for (int j = 0; j < w; ++j) out(i, j) += wt * in(i + off, j);
        }
      }
    }
  }
  return out;
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Accumulates d loss / d kernel given d loss / d pre-activation.
void accumulate_kernel_grad(const FeatureStack& features, const FloatGrid& dz,
                            DirectionalKernel& grad) {
  const int h = features.height();
  const int w = features.width();
  const int r = (grad.k - 1) / 2;
  const bool horizontal = grad.orientation == Orientation::kHorizontal;
  double db = 0.0;
  for (double v : dz.values()) db += v;
  grad.bias += db;
  for (int c = 0; c < features.channels(); ++c) {
    const FloatGrid& in = features.channel(c);
    for (int t = 0; t < grad.k; ++t) {
      const int off = t - r;
      double acc = 0.0;
      if (horizontal) {
        const int c0 = std::max(0, -off);
        const int c1 = std::min(w, w - off);
        for (int i = 0; i < h; ++i) {
          for (int j = c0; j < c1; ++j) acc += dz(i, j) * in(i, j + off);
        }
      } else {
        const int r0 = std::max(0, -off);
        const int r1 = std::min(h, h - off);
        for (int i = r0; i < r1; ++i) {
          for (int j = 0; j < w; ++j) acc += dz(i, j) * in(i + off, j);
        }
      }
      grad.weight(c, t) += acc;
    }
  }
}

void require_orientations(const DirectionalKernel& hk, const DirectionalKernel& vk) {
  if (hk.orientation != Orientation::kHorizontal) {
    throw InvalidConfig("LOTM: first kernel must be horizontal");
  }
  if (vk.orientation != Orientation::kVertical) {
    throw InvalidConfig("LOTM: second kernel must be vertical");
  }
}

}  // namespace

FloatGrid sigmoid_grid(const FloatGrid& grid) {
  FloatGrid out(grid.height(), grid.width(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values()[i] = sigmoid(grid.values()[i]);
  return out;
}

LotmMaps lotm_forward(const FeatureStack& features, const DirectionalKernel& hk,
                      const DirectionalKernel& vk) {
  require_orientations(hk, vk);
  return {sigmoid_grid(directional_conv(features, hk)),
          sigmoid_grid(directional_conv(features, vk))};
}

LotmGradients lotm_backward(const FeatureStack& features, const DirectionalKernel& hk,
                            const DirectionalKernel& vk, const BitMask& label,
                            const BitMask* ignore) {
  require_orientations(hk, vk);
  require_same_shape(features.channel(0), label, "lotm_backward label");
  if (ignore != nullptr && !ignore->empty()) {
    require_same_shape(features.channel(0), *ignore, "lotm_backward ignore");
  } else {
    ignore = nullptr;
  }

  LotmGradients out{0.0, DirectionalKernel::zeros(hk.orientation, hk.k, hk.channels_in),
                    DirectionalKernel::zeros(vk.orientation, vk.k, vk.channels_in)};
  auto branch = [&](const DirectionalKernel& kernel, DirectionalKernel& grad) {
    const FloatGrid p = sigmoid_grid(directional_conv(features, kernel));
    GridLoss bce = balanced_bce(p, label, ignore);
    // Chain through the sigmoid: dp/dz = p (1 - p).
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double pi = p.values()[i];
      bce.grad.values()[i] *= pi * (1.0 - pi);
    }
    accumulate_kernel_grad(features, bce.grad, grad);
    return bce.loss;
  };
  out.loss = branch(hk, out.grad_h) + branch(vk, out.grad_v);
  return out;
}

std::pair<DirectionalKernel, DirectionalKernel> init_kernels(int k, int channels_in,
                                                             std::uint64_t seed) {
  auto hk = DirectionalKernel::zeros(Orientation::kHorizontal, k, channels_in);
  auto vk = DirectionalKernel::zeros(Orientation::kVertical, k, channels_in);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (auto& w : hk.weights) w = dist(rng);
  hk.bias = dist(rng);
  for (auto& w : vk.weights) w = dist(rng);
  vk.bias = dist(rng);
  return {hk, vk};
}

namespace {

void axpy(DirectionalKernel& into, const DirectionalKernel& g, double scale) {
  for (std::size_t i = 0; i < into.weights.size(); ++i) into.weights[i] += scale * g.weights[i];
  into.bias += scale * g.bias;
}

}  // namespace

TrainResult train_toy(const std::vector<TrainSample>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw InvalidInput("train_toy: empty dataset");
  if (cfg.steps < 1) throw InvalidConfig("train_toy: steps must be >= 1");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidConfig("train_toy: learning rate must be finite and non-negative");
  }
  const int channels = dataset.front().features.channels();
  for (const auto& s : dataset) {
    if (s.features.channels() != channels) {
      throw InvalidGrid("train_toy: samples differ in channel count");
    }
    require_same_shape(s.features.channel(0), s.label, "train_toy label");
  }

  auto [hk, vk] = init_kernels(cfg.k, channels, cfg.seed);
  TrainResult result;
  result.loss_curve.reserve(cfg.steps + 1);
  std::vector<LotmGradients> per_sample(dataset.size());
  const double inv_n = 1.0 / static_cast<double>(dataset.size());

  for (int step = 0;; ++step) {
    parallel_for(dataset.size(), cfg.threads, [&](std::size_t i) {
      const auto& s = dataset[i];
      per_sample[i] = lotm_backward(s.features, hk, vk, s.label,
                                    s.ignore.empty() ? nullptr : &s.ignore);
    });
    double loss = 0.0;
    auto gh = DirectionalKernel::zeros(hk.orientation, hk.k, hk.channels_in);
    auto gv = DirectionalKernel::zeros(vk.orientation, vk.k, vk.channels_in);
    for (const auto& g : per_sample) {
      loss += g.loss;
      axpy(gh, g.grad_h, 1.0);
      axpy(gv, g.grad_v, 1.0);
    }
    result.loss_curve.push_back(loss * inv_n);
    if (step == cfg.steps) break;
    axpy(hk, gh, -cfg.learning_rate * inv_n);
    axpy(vk, gv, -cfg.learning_rate * inv_n);
  }
  result.hk = hk;
  result.vk = vk;
  return result;
}

DirectionalKernel make_edge_kernel(Orientation orientation, double gain, double bias,
                                   int channels_in) {
  auto kernel = DirectionalKernel::zeros(orientation, 3, channels_in);
  for (int c = 0; c < channels_in; ++c) {
    kernel.weight(c, 0) = -gain;
    kernel.weight(c, 1) = 2.0 * gain;
    kernel.weight(c, 2) = -gain;
  }
  kernel.bias = bias;
  return kernel;
}

}  // namespace contournet
