#include <gtest/gtest.h>

#include <filesystem>

#include "contournet/pipeline.hpp"
#include "contournet/synthetic.hpp"
#include "oracles.hpp"

using namespace contournet;
namespace fs = std::filesystem;

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = generate_synthetic_scene(5, 96, 96, 3, 2);
  const auto b = generate_synthetic_scene(5, 96, 96, 3, 2);
  const auto c = generate_synthetic_scene(6, 96, 96, 3, 2);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.texts, b.texts);
  EXPECT_EQ(a.streaks, b.streaks);
  EXPECT_NE(a.image, c.image);
}

TEST(Synthetic, ShapesInBoundsAndStreaksClearOfText) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_synthetic_scene(seed, 128, 128, 3, 3);
    ASSERT_EQ(s.texts.size(), 3u);
    ASSERT_EQ(s.streaks.size(), 3u);
    BitMask text(128, 128, 0);
    for (const auto& t : s.texts) {
      EXPECT_TRUE(oracle::is_simple(t.polygon));
      for (const auto& v : t.polygon.vertices) {
        EXPECT_GE(v.x, 0.0);
        EXPECT_LE(v.x, 128.0);
        EXPECT_GE(v.y, 0.0);
        EXPECT_LE(v.y, 128.0);
      }
      mask_union_inplace(text, rasterize_polygon(t.polygon, 128, 128));
    }
    const BitMask streaks = streak_mask(s);
    std::size_t expected = 0;
    for (const auto& k : s.streaks) expected += k.length();
    EXPECT_EQ(popcount(streaks), expected);
    for (std::size_t i = 0; i < text.size(); ++i) ASSERT_FALSE(text.values()[i] && streaks.values()[i]);
  }
}

TEST(Synthetic, Errors) {
  EXPECT_THROW(generate_synthetic_scene(0, 16, 64, 1, 0), InvalidConfig);
  EXPECT_THROW(generate_synthetic_scene(0, 64, 64, -1, 0), InvalidConfig);
  EXPECT_THROW(generate_synthetic_scene(0, 32, 32, 40, 0), PlacementError);
}

TEST(Synthetic, DefaultCounts) {
  EXPECT_EQ(default_text_count(128, 128), 3);
  EXPECT_EQ(default_text_count(32, 32), 1);
  EXPECT_EQ(default_text_count(4000, 4000), 40);
  EXPECT_EQ(default_streak_count(3), 2);
  EXPECT_EQ(default_streak_count(1), 1);
}

TEST(SceneFeatures, MinFilterChannel) {
  FloatGrid img(11, 11, 1.0);
  img(5, 5) = 0.0;
  const FeatureStack f = scene_features(img);
  ASSERT_EQ(f.channels(), 2);
  EXPECT_EQ(f.channel(0), img);
  EXPECT_EQ(f.channel(1)(3, 3), 0.0);
  EXPECT_EQ(f.channel(1)(2, 5), 1.0);
  // Cells beyond the border count as dark.
  EXPECT_EQ(f.channel(1)(0, 5), 0.0);
}

TEST(Demo, SmallRunLearnsAndWritesArtifacts) {
  DemoConfig cfg;
  cfg.height = cfg.width = 96;
  cfg.train_scenes = 4;
  cfg.test_scenes = 2;
  cfg.train = default_demo_training();
  cfg.train.steps = 40;
  cfg.decode = default_demo_decode();
  const DemoResult r = run_demo(cfg);
  ASSERT_EQ(r.training.loss_curve.size(), 41u);
  EXPECT_LT(r.training.loss_curve.back(), r.training.loss_curve.front());
  EXPECT_EQ(r.test.size(), 2u);
  EXPECT_GT(r.streak_pixels, 0u);

  cfg.threads = 3;
  const DemoResult threaded = run_demo(cfg);
  EXPECT_EQ(threaded.training.loss_curve, r.training.loss_curve);
  EXPECT_EQ(threaded.summary.tp, r.summary.tp);

  const fs::path dir = fs::temp_directory_path() / "contournet_demo_test";
  fs::remove_all(dir);
  write_demo_artifacts(r, dir);
  for (const char* name : {"metrics.txt", "summary.txt", "loss_curve.csv", "kernels.txt", "test_00.svg",
                           "test_01_hmap.cthm", "test_01_dets.jsonl", "test_00.pgm"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  fs::remove_all(dir);
}

TEST(Demo, InvalidConfig) {
  DemoConfig cfg;
  cfg.train_scenes = 0;
  EXPECT_THROW(run_demo(cfg), InvalidConfig);
}

TEST(SceneSeed, DistinctAcrossSplits) {
  EXPECT_NE(scene_seed(0, 0, 0), scene_seed(0, 1, 0));
  EXPECT_NE(scene_seed(0, 0, 0), scene_seed(0, 0, 1));
  EXPECT_EQ(scene_seed(9, 1, 3), scene_seed(9, 1, 3));
}
