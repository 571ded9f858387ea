#include "contournet/pipeline.hpp"

#include <cstdio>

#include "contournet/annotations.hpp"
#include "contournet/parallel.hpp"
#include "contournet/svg.hpp"

namespace contournet {

void DemoConfig::validate() const {
  if (height < 32 || width < 32) throw InvalidConfig("demo: image dimensions must be >= 32");
  if (train_scenes < 1 || test_scenes < 1) throw InvalidConfig("demo: need at least one scene per split");
  if (!(band > 0.0)) throw InvalidConfig("demo: band must be positive");
  decode.validate();
}

TrainConfig default_demo_training() {
  TrainConfig cfg;
  cfg.steps = 200;
  cfg.learning_rate = 100.0;
  cfg.k = 3;
  return cfg;
}

DecodeConfig default_demo_decode() {
  DecodeConfig cfg;
  cfg.nms_tolerance = 0.1;
  cfg.cluster_link = 6.0;
  return cfg;
}

std::uint64_t scene_seed(std::uint64_t seed, int split, int index) {
  // splitmix64 finalizer over a packed (seed, split, index) key.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + (static_cast<std::uint64_t>(split) << 32) +
                    static_cast<std::uint64_t>(index) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

SyntheticScene make_scene(const DemoConfig& cfg, int split, int index) {
  const int texts = cfg.texts_per_scene >= 0 ? cfg.texts_per_scene
                                             : default_text_count(cfg.height, cfg.width);
  const int streaks = cfg.streaks_per_scene >= 0 ? cfg.streaks_per_scene
                                                 : default_streak_count(texts);
  return generate_synthetic_scene(scene_seed(cfg.seed, split, index), cfg.height, cfg.width,
                                  texts, streaks, cfg.scene);
}

}  // namespace

std::vector<DemoSceneResult> evaluate_kernels(const DemoConfig& cfg, const DirectionalKernel& hk,
                                              const DirectionalKernel& vk) {
  cfg.validate();
  std::vector<DemoSceneResult> out(cfg.test_scenes);
  parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    auto& r = out[i];
    r.scene = make_scene(cfg, 1, static_cast<int>(i));
    r.maps = lotm_forward(scene_features(r.scene.image), hk, vk);
    r.candidates = rescore(r.maps.hmap, r.maps.vmap, cfg.decode);
    r.detections = decode_candidates(r.candidates, cfg.decode);
    r.match = match_detections(r.detections, r.scene.texts, cfg.iou_threshold,
                               cfg.decode.iou_resolution);
  });
  return out;
}

DemoResult run_demo(const DemoConfig& cfg) {
  cfg.validate();
  std::vector<TrainSample> dataset(cfg.train_scenes);
  parallel_for(dataset.size(), cfg.threads, [&](std::size_t i) {
    const SyntheticScene scene = make_scene(cfg, 0, static_cast<int>(i));
    TrainingSample labels = build_training_sample(scene.texts, cfg.height, cfg.width, cfg.band);
    dataset[i] = {scene_features(scene.image), std::move(labels.contour), std::move(labels.ignore)};
  });

  TrainConfig train = cfg.train;
  train.threads = cfg.threads;
  DemoResult result;
  result.training = train_toy(dataset, train);
  result.test = evaluate_kernels(cfg, result.training.hk, result.training.vk);

  std::vector<AnnotationRecord> all_gts;
  for (const auto& r : result.test) all_gts.insert(all_gts.end(), r.scene.texts.begin(), r.scene.texts.end());
  auto& s = result.summary;
  s.iou_threshold = cfg.iou_threshold;
  s.images = result.test.size();
  s.bucket_boundaries = auto_bucket_boundaries(all_gts);
  for (const auto& r : result.test) {
    s.tp += r.match.tp;
    s.fp += r.match.fp;
    s.fn += r.match.fn;
    s.ignored += r.match.ignored;
    accumulate_buckets(s.buckets, bucketed_prf(r.detections, r.scene.texts, s.bucket_boundaries,
                                               cfg.iou_threshold, cfg.decode.iou_resolution));
  }
  result.metrics = prf(s.tp, s.fp, s.fn);
  for (const auto& r : result.test) {
    const BitMask streaks = streak_mask(r.scene);
    result.streak_pixels += popcount(streaks);
    for (const auto& c : r.candidates.points) result.streak_candidates += streaks(c.row, c.col);
  }
  return result;
}

void write_demo_artifacts(const DemoResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "metrics.txt", format_metrics_report(result.summary));
  const auto& curve_values = result.training.loss_curve;
  char summary[512];
  std::snprintf(summary, sizeof summary,
                "initial_loss = %.17g\nfinal_loss = %.17g\nloss_reduction = %.6f\n"
                "recall = %.6f\nprecision = %.6f\nf_measure = %.6f\n"
                "streak_candidates = %zu\nstreak_pixels = %zu\n",
                curve_values.front(), curve_values.back(),
                1.0 - curve_values.back() / curve_values.front(), result.metrics.recall,
                result.metrics.precision, result.metrics.f, result.streak_candidates,
                result.streak_pixels);
  write_file_atomic(dir / "summary.txt", summary);

  std::string curve = "step,loss\n";
  for (std::size_t i = 0; i < result.training.loss_curve.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, result.training.loss_curve[i]);
    curve += buf;
  }
  write_file_atomic(dir / "loss_curve.csv", curve);
  write_file_atomic(dir / "kernels.txt",
                    kernel_to_text(result.training.hk) + "\n" + kernel_to_text(result.training.vk));

  for (std::size_t i = 0; i < result.test.size(); ++i) {
    const auto& r = result.test[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "test_%02zu", i);
    const std::string base = stem;
    const int h = r.scene.image.height(), w = r.scene.image.width();
    write_file_atomic(dir / (base + ".pgm"), encode_pgm(r.scene.image));
    write_heatmap(dir / (base + "_hmap.cthm"), r.maps.hmap);
    write_heatmap(dir / (base + "_vmap.cthm"), r.maps.vmap);
    write_file_atomic(dir / (base + "_dets.jsonl"), detections_to_jsonl(r.detections));
    write_file_atomic(dir / (base + "_gt.jsonl"), to_canonical_jsonl(r.scene.texts));
    write_file_atomic(dir / (base + ".svg"),
                      render_overlay_svg(h, w, r.scene.texts, r.detections,
                                         candidate_points(r.candidates.points)));
  }
}

}  // namespace contournet
