#pragma once

#include <cstdint>
#include <vector>

#include "contournet/grid.hpp"

namespace contournet {

/// 1 x k (horizontal) or k x 1 (vertical) correlation kernel over a
/// multi-channel input, producing one output channel.
///
/// weights[c * k + t] multiplies input channel c at tap t, where tap t
/// reads offset t - (k - 1) / 2 along the kernel axis. No kernel flip.
struct DirectionalKernel {
  Orientation orientation = Orientation::kHorizontal;
  int k = 3;
  int channels_in = 1;
  std::vector<double> weights;
  double bias = 0.0;

  /// Zero-initialised kernel with the given geometry.
  static DirectionalKernel zeros(Orientation orientation, int k, int channels_in);

  double& weight(int channel, int tap) { return weights[channel * k + tap]; }
  double weight(int channel, int tap) const { return weights[channel * k + tap]; }

  /// Throws InvalidConfig on even/non-positive k or a weight-count mismatch.
  void validate() const;

  friend bool operator==(const DirectionalKernel&, const DirectionalKernel&) = default;
};

/// Channel stack of equally shaped grids.
class FeatureStack {
 public:
  FeatureStack() = default;
  explicit FeatureStack(std::vector<FloatGrid> channels);
  FeatureStack(int channels, int height, int width);

  int channels() const noexcept { return static_cast<int>(channels_.size()); }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  FloatGrid& channel(int c) { return channels_[c]; }
  const FloatGrid& channel(int c) const { return channels_[c]; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<FloatGrid> channels_;
};

FeatureStack transpose(const FeatureStack& features);

/// "Same"-size correlation with zero padding along the kernel axis only.
FloatGrid directional_conv(const FeatureStack& features, const DirectionalKernel& kernel);

FloatGrid sigmoid_grid(const FloatGrid& grid);

struct LotmMaps {
  FloatGrid hmap;
  FloatGrid vmap;
};

LotmMaps lotm_forward(const FeatureStack& features, const DirectionalKernel& hk,
                      const DirectionalKernel& vk);

struct LotmGradients {
  double loss = 0.0;
  DirectionalKernel grad_h;
  DirectionalKernel grad_v;
};

/// Sum of the class-balanced BCE of both maps against the same label, with
/// gradients for every weight and bias.
LotmGradients lotm_backward(const FeatureStack& features, const DirectionalKernel& hk,
                            const DirectionalKernel& vk, const BitMask& label,
                            const BitMask* ignore = nullptr);

struct TrainSample {
  FeatureStack features;
  BitMask label;
  BitMask ignore;  // empty grid means "nothing ignored"
};

struct TrainConfig {
  int steps = 200;
  double learning_rate = 1.0;
  std::uint64_t seed = 0;
  int k = 3;
  int threads = 1;
};

struct TrainResult {
  DirectionalKernel hk;
  DirectionalKernel vk;
  /// Mean loss over the dataset: entry 0 before training, entry s after s
  /// updates (steps + 1 entries).
  std::vector<double> loss_curve;
};

/// Seeds both kernels uniformly in [-0.1, 0.1].
std::pair<DirectionalKernel, DirectionalKernel> init_kernels(int k, int channels_in,
                                                             std::uint64_t seed);

/// Full-batch gradient descent on the mean per-sample loss. Per-sample
/// gradients may be computed on several threads; they are always reduced
/// in sample order, so results do not depend on the thread count.
TrainResult train_toy(const std::vector<TrainSample>& dataset, const TrainConfig& cfg);

/// k = 3 second-difference kernel gain * [-1, 2, -1] with the given bias,
/// a fixed edge operator used as a reference texture detector.
DirectionalKernel make_edge_kernel(Orientation orientation, double gain, double bias,
                                   int channels_in = 1);

}  // namespace contournet
