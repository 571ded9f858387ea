#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contournet/decode.hpp"
#include "contournet/geometry.hpp"
#include "contournet/label_gen.hpp"
#include "contournet/lotm.hpp"
#include "contournet/pipeline.hpp"
#include "contournet/synthetic.hpp"

using namespace contournet;

namespace {

Polygon star(double cx, double cy, double r0, double r1, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(r0, r1);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * i / n;
    const double rad = r(rng);
    p.vertices.push_back({cx + rad * std::cos(t), cy + rad * std::sin(t)});
  }
  return p;
}

FloatGrid random_map(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  FloatGrid g(side, side);
  for (double& v : g.values()) v = u(rng);
  return g;
}

}  // namespace

static void BM_Rasterize(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Polygon p = star(side / 2.0, side / 2.0, side * 0.2, side * 0.45, 16, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_polygon(p, side, side));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Rasterize)->Arg(128)->Arg(512);

static void BM_Edt(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const BitMask mask = rasterize_polygon(star(side / 2.0, side / 2.0, side * 0.2, side * 0.45, 16, 2), side, side);
  for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance_transform(mask));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Edt)->Arg(128)->Arg(512);

static void BM_ContourBand(benchmark::State& state) {
  const Polygon p = star(256, 256, 60, 200, 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(contour_band_label(p, 512, 512));
}
BENCHMARK(BM_ContourBand);

static void BM_PolygonIou(benchmark::State& state) {
  const Polygon a = star(50, 50, 20, 40, 12, 4), b = star(55, 48, 20, 40, 12, 5);
  const int resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(polygon_iou(a, b, resolution));
}
BENCHMARK(BM_PolygonIou)->Arg(64)->Arg(256);

static void BM_DirectionalNms(benchmark::State& state) {
  const FloatGrid map = random_map(256, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(directional_nms(map, Orientation::kHorizontal, 3, NmsTies::kKeepAll));
  }
  state.SetItemsProcessed(state.iterations() * map.size());
}
BENCHMARK(BM_DirectionalNms);

static void BM_AlphaShape(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<Point2> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng)};
  const double alpha = 1.5 * median_nn_distance(pts);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_shape(pts, alpha));
}
BENCHMARK(BM_AlphaShape)->Arg(100)->Arg(1000);

static void BM_LotmForwardBackward(benchmark::State& state) {
  const SyntheticScene scene = generate_synthetic_scene(8, 128, 128, 3, 2);
  const FeatureStack f = scene_features(scene.image);
  const auto hk = DirectionalKernel::zeros(Orientation::kHorizontal, 3, f.channels());
  const auto vk = DirectionalKernel::zeros(Orientation::kVertical, 3, f.channels());
  BitMask label(128, 128, 0);
  for (const auto& t : scene.texts) mask_union_inplace(label, contour_band_label(t.polygon, 128, 128));
  for (auto _ : state) benchmark::DoNotOptimize(lotm_backward(f, hk, vk, label, nullptr));
}
BENCHMARK(BM_LotmForwardBackward);

BENCHMARK_MAIN();
