#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "contournet/losses.hpp"
#include "contournet/lotm.hpp"
#include "oracles.hpp"

using namespace contournet;

namespace {

FeatureStack random_features(std::mt19937_64& rng, int c, int h, int w) {
  std::uniform_real_distribution<double> val(-1, 1);
  FeatureStack f(c, h, w);
  for (int ch = 0; ch < c; ++ch) {
    for (double& v : f.channel(ch).values()) v = val(rng);
  }
  return f;
}

DirectionalKernel random_kernel(std::mt19937_64& rng, Orientation o, int k, int c) {
  std::uniform_real_distribution<double> val(-1, 1);
  auto kernel = DirectionalKernel::zeros(o, k, c);
  for (double& w : kernel.weights) w = val(rng);
  kernel.bias = val(rng);
  return kernel;
}

}  // namespace

TEST(DirectionalConv, IdentityKernel) {
  std::mt19937_64 rng(1);
  const FeatureStack f = random_features(rng, 1, 5, 7);
  auto k = DirectionalKernel::zeros(Orientation::kHorizontal, 1, 1);
  k.weights[0] = 1.0;
  EXPECT_EQ(directional_conv(f, k), f.channel(0));
}

TEST(DirectionalConv, StepEdgeResponse) {
  FeatureStack f(1, 1, 5);
  f.channel(0).values() = {0, 0, 1, 1, 1};
  auto k = DirectionalKernel::zeros(Orientation::kHorizontal, 3, 1);
  k.weights = {-0.5, 0.0, 0.5};
  const FloatGrid out = directional_conv(f, k);
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_EQ(out(0, 1), 0.5);
  EXPECT_EQ(out(0, 2), 0.5);
  EXPECT_EQ(out(0, 3), 0.0);
  // The last column sees the zero padding.
  EXPECT_EQ(out(0, 4), -0.5);
}

TEST(DirectionalConv, MatchesDirectDefinition) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 14), chans(1, 3), kidx(0, 3);
  for (int t = 0; t < 100; ++t) {
    const int c = chans(rng), k = 1 + 2 * kidx(rng);
    const FeatureStack f = random_features(rng, c, dim(rng), dim(rng));
    for (Orientation o : {Orientation::kHorizontal, Orientation::kVertical}) {
      const auto kernel = random_kernel(rng, o, k, c);
      const FloatGrid got = directional_conv(f, kernel), want = oracle::brute_conv(f, kernel);
      for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got.values()[i], want.values()[i], 1e-12);
    }
  }
}

TEST(DirectionalConv, VerticalIsTransposedHorizontal) {
  std::mt19937_64 rng(6);
  const FeatureStack f = random_features(rng, 2, 6, 9);
  auto h = random_kernel(rng, Orientation::kHorizontal, 5, 2);
  auto v = h;
  v.orientation = Orientation::kVertical;
  EXPECT_EQ(directional_conv(f, v), transpose(directional_conv(transpose(f), h)));
}

TEST(DirectionalConv, ChannelMismatch) {
  EXPECT_THROW(directional_conv(FeatureStack(2, 3, 3), DirectionalKernel::zeros(Orientation::kHorizontal, 3, 1)),
               InvalidConfig);
  EXPECT_THROW(DirectionalKernel::zeros(Orientation::kHorizontal, 4, 1), InvalidConfig);
}

TEST(Sigmoid, Fixtures) {
  FloatGrid g(1, 4);
  g.values() = {0.0, std::log(3.0), 800.0, -800.0};
  const FloatGrid s = sigmoid_grid(g);
  EXPECT_EQ(s(0, 0), 0.5);
  EXPECT_NEAR(s(0, 1), 0.75, 1e-15);
  EXPECT_NEAR(s(0, 2), 1.0, 1e-15);
  EXPECT_NEAR(s(0, 3), 0.0, 1e-15);
  for (double v : s.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(LotmForward, ZeroKernelsGiveHalf) {
  const FeatureStack f(2, 4, 6);
  const auto maps = lotm_forward(f, DirectionalKernel::zeros(Orientation::kHorizontal, 3, 2),
                                 DirectionalKernel::zeros(Orientation::kVertical, 3, 2));
  EXPECT_EQ(maps.hmap, FloatGrid(4, 6, 0.5));
  EXPECT_EQ(maps.vmap, FloatGrid(4, 6, 0.5));
}

TEST(LotmForward, SwappedOrientationsRejected) {
  const FeatureStack f(1, 4, 4);
  EXPECT_THROW(lotm_forward(f, DirectionalKernel::zeros(Orientation::kVertical, 3, 1),
                            DirectionalKernel::zeros(Orientation::kHorizontal, 3, 1)),
               InvalidConfig);
}

TEST(LotmBackward, MatchesCentralDifferences) {
  std::mt19937_64 rng(15);
  std::bernoulli_distribution bit(0.35);
  for (int t = 0; t < 10; ++t) {
    const FeatureStack f = random_features(rng, 2, 8, 8);
    BitMask label(8, 8), ignore(8, 8);
    for (auto& v : label.values()) v = bit(rng);
    ignore(3, 3) = 1;
    auto hk = random_kernel(rng, Orientation::kHorizontal, 3, 2);
    auto vk = random_kernel(rng, Orientation::kVertical, 3, 2);
    const LotmGradients g = lotm_backward(f, hk, vk, label, &ignore);

    std::vector<double> params(hk.weights);
    params.push_back(hk.bias);
    params.insert(params.end(), vk.weights.begin(), vk.weights.end());
    params.push_back(vk.bias);
    const std::size_t nw = hk.weights.size();
    const auto numeric = oracle::central_difference(
        [&](std::span<const double> p) {
          auto h = hk, v = vk;
          std::copy(p.begin(), p.begin() + nw, h.weights.begin());
          h.bias = p[nw];
          std::copy(p.begin() + nw + 1, p.begin() + 2 * nw + 1, v.weights.begin());
          v.bias = p[2 * nw + 1];
          const LotmMaps m = lotm_forward(f, h, v);
          return balanced_bce(m.hmap, label, &ignore).loss + balanced_bce(m.vmap, label, &ignore).loss;
        },
        params);
    std::vector<double> analytic(g.grad_h.weights);
    analytic.push_back(g.grad_h.bias);
    analytic.insert(analytic.end(), g.grad_v.weights.begin(), g.grad_v.weights.end());
    analytic.push_back(g.grad_v.bias);
    for (std::size_t i = 0; i < params.size(); ++i) {
      ASSERT_NEAR(analytic[i], numeric[i], 1e-6 * std::max(1.0, std::abs(numeric[i]))) << t << "/" << i;
    }
  }
}

TEST(LotmBackward, AllIgnoredGivesZero) {
  std::mt19937_64 rng(3);
  const FeatureStack f = random_features(rng, 1, 5, 5);
  const BitMask all(5, 5, 1);
  const auto g = lotm_backward(f, random_kernel(rng, Orientation::kHorizontal, 3, 1),
                               random_kernel(rng, Orientation::kVertical, 3, 1), all, &all);
  EXPECT_EQ(g.loss, 0.0);
  for (double w : g.grad_h.weights) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(g.grad_v.bias, 0.0);
}

TEST(LotmBackward, SaturatedCorrectMapsHaveNoGradient) {
  // A huge positive bias saturates both maps at 1 on an all-positive label.
  FeatureStack f(1, 4, 4);
  auto hk = DirectionalKernel::zeros(Orientation::kHorizontal, 3, 1);
  auto vk = DirectionalKernel::zeros(Orientation::kVertical, 3, 1);
  hk.bias = vk.bias = 50.0;
  const auto g = lotm_backward(f, hk, vk, BitMask(4, 4, 1));
  EXPECT_LT(g.loss, 1e-6);
  EXPECT_EQ(g.grad_h.bias, 0.0);
  EXPECT_EQ(g.grad_v.bias, 0.0);
}

TEST(LotmBackward, ShapeMismatch) {
  EXPECT_THROW(lotm_backward(FeatureStack(1, 4, 4), DirectionalKernel::zeros(Orientation::kHorizontal, 3, 1),
                             DirectionalKernel::zeros(Orientation::kVertical, 3, 1), BitMask(4, 5, 0)),
               InvalidGrid);
}

namespace {

// Vertical bar of texture; the label is its outline.
TrainSample bar_sample() {
  FeatureStack f(1, 12, 12);
  BitMask label(12, 12, 0);
  for (int r = 2; r < 10; ++r) {
    for (int c = 4; c < 8; ++c) f.channel(0)(r, c) = ((r + c) % 2) ? 1.0 : 0.3;
    label(r, 4) = label(r, 7) = 1;
  }
  return {f, label, BitMask()};
}

}  // namespace

TEST(TrainToy, HalvesLossOnOneSample) {
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.learning_rate = 20.0;
  const TrainResult r = train_toy({bar_sample()}, cfg);
  ASSERT_EQ(r.loss_curve.size(), 301u);
  EXPECT_LT(r.loss_curve.back(), 0.5 * r.loss_curve.front());
}

TEST(TrainToy, ZeroLearningRateIsFlat) {
  TrainConfig cfg;
  cfg.steps = 10;
  cfg.learning_rate = 0.0;
  const TrainResult r = train_toy({bar_sample()}, cfg);
  for (double l : r.loss_curve) EXPECT_EQ(l, r.loss_curve.front());
}

TEST(TrainToy, DeterministicAcrossRunsAndThreads) {
  TrainConfig cfg;
  cfg.steps = 25;
  cfg.learning_rate = 5.0;
  cfg.seed = 77;
  const std::vector<TrainSample> data = {bar_sample(), bar_sample()};
  const TrainResult a = train_toy(data, cfg);
  const TrainResult b = train_toy(data, cfg);
  cfg.threads = 3;
  const TrainResult c = train_toy(data, cfg);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  EXPECT_EQ(a.loss_curve, c.loss_curve);
  EXPECT_EQ(a.hk, c.hk);
}

TEST(TrainToy, Errors) {
  EXPECT_THROW(train_toy({}, {}), InvalidInput);
  TrainConfig bad;
  bad.steps = 0;
  EXPECT_THROW(train_toy({bar_sample()}, bad), InvalidConfig);
}
