// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/study.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lightstack/error.hpp"
#include "lightstack/report.hpp"
#include "lightstack/sim_config.hpp"
#include "test_support.hpp"

namespace lightstack {
namespace {

DatasetManifest single_region(
    const std::array<std::optional<DetectionSet>, kConditionCount>& dets) {
  DatasetManifest m;
  m.objects.push_back(
      {"obj-0", {testing::annotated_stack("reg-0", "obj-0",
                                          BoundingBox(0, 0, 10, 10))
                     .with_detections(dets)}});
  return m;
}

std::array<std::optional<DetectionSet>, kConditionCount> empty_dets() {
  std::array<std::optional<DetectionSet>, kConditionCount> d;
  for (auto& s : d) s = DetectionSet{};
  return d;
}

TEST(EvaluateTest, CutoffSplitsCountsButNotScores) {
  auto dets = empty_dets();
  dets[0] = DetectionSet({Detection(BoundingBox(0, 0, 10, 10), 0.68)});
  const DatasetManifest m = single_region(dets);
  const std::vector<ImageRef> first = {ImageRef{0, 0, 0}};

  const Evaluation below = evaluate_images(m, first, 0.65, 0.5);
  EXPECT_EQ(below.counts, (MatchCounts{1, 0, 0}));

  const Evaluation above = evaluate_images(m, first, 0.7, 0.5);
  EXPECT_EQ(above.counts, (MatchCounts{0, 0, 1}));
  ASSERT_EQ(above.scored.size(), 1u);
  EXPECT_TRUE(above.scored[0].is_tp);
  EXPECT_EQ(average_precision(above.scored, above.ground_truth), 1.0);
}

TEST(EvaluateTest, PerImageCountsEveryCopy) {
  auto dets = empty_dets();
  dets[5] = DetectionSet({Detection(BoundingBox(0, 0, 10, 10), 0.9)});
  const DatasetManifest m = fuse_manifest(single_region(dets), {0.5});
  std::vector<ImageRef> all;
  for (std::size_t c = 0; c < kConditionCount; ++c) all.push_back({0, 0, c});
  const Evaluation fused = evaluate_images(m, all, 0.7, 0.5);
  EXPECT_EQ(fused.counts, (MatchCounts{12, 0, 0}));
  EXPECT_EQ(fused.ground_truth, 12u);

  const std::vector<RegionRef> region = {RegionRef{0, 0}};
  const Evaluation pooled = evaluate_regions(m, region, 0.7, 0.5, 1, FusionParams{0.5});
  EXPECT_EQ(pooled.counts, (MatchCounts{1, 0, 0}));
  EXPECT_EQ(pooled.ground_truth, 1u);
}

TEST(EvaluateTest, MissingDetectionsAreListed) {
  const DatasetManifest m = testing::grid_manifest(1, 2);
  std::vector<ImageRef> refs = {{0, 0, 0}, {0, 1, 4}};
  try {
    evaluate_images(m, refs, 0.7, 0.5);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2 image(s)"), std::string::npos) << what;
    EXPECT_NE(what.find("reg-0/C/low"), std::string::npos) << what;
    EXPECT_NE(what.find("reg-1/UD/medium"), std::string::npos) << what;
  }
}

TEST(StudyConfigTest, Validation) {
  StudyConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.study_id = 7;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = StudyConfig{};
  cfg.trials = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = StudyConfig{};
  cfg.confidence_cutoff = 1.5;
  EXPECT_THROW(validate(cfg), ValidationError);
  EXPECT_EQ(parse_ap_mode("grid"), ApMode::kGrid);
  EXPECT_EQ(parse_eval_mode("per_region"), EvalMode::kPerRegion);
  EXPECT_THROW(parse_eval_mode("x"), ValidationError);
}

class StudyFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    SceneConfig scene;
    scene.region_count = 400;
    manifest_ = generate_dataset(scene, 5);
    split_ = split_objectwise(manifest_, kDefaultSplitRatios, 6);
  }

  StudyReport run(const StudyConfig& cfg,
                  const DetectorNoiseModel& noise = DetectorNoiseModel{}) {
    SimulatedDetectionSource source(manifest_, noise, 99, cfg.threads);
    return run_study(manifest_, split_, source, cfg);
  }

  DatasetManifest manifest_;
  SplitAssignment split_;
};

TEST_F(StudyFixture, RowLayout) {
  StudyConfig cfg;
  cfg.trials = 2;
  const std::pair<int, std::size_t> expected[] = {{1, 4}, {2, 8}, {3, 4}, {4, 2}};
  for (const auto& [id, rows] : expected) {
    cfg.study_id = id;
    const StudyReport r = run(cfg);
    EXPECT_EQ(r.rows.size(), rows) << id;
  }
  cfg.study_id = 4;
  const StudyReport r4 = run(cfg);
  EXPECT_EQ(r4.rows[0].train, "All Train");
  EXPECT_EQ(r4.rows[1].train, "All Train + late fusion");
  EXPECT_EQ(r4.rows[1].test, "All Test");
}

TEST_F(StudyFixture, StudiesOneAndThreeShareTestImages) {
  StudyConfig cfg;
  cfg.study_id = 1;
  const StudyReport one = run(cfg);
  cfg.study_id = 3;
  const StudyReport three = run(cfg);
  for (std::size_t i = 0; i < kModalityCount; ++i) {
    EXPECT_EQ(one.rows[i].test, three.rows[i].test);
    EXPECT_EQ(one.rows[i].first.ground_truth, three.rows[i].first.ground_truth);
    EXPECT_GT(one.rows[i].first.ground_truth, 0u);
  }
}

TEST_F(StudyFixture, UnfusedStudyFourIsTheSumOfStudyThree) {
  StudyConfig cfg;
  cfg.study_id = 3;
  const StudyReport three = run(cfg);
  cfg.study_id = 4;
  const StudyReport four = run(cfg);
  MatchCounts sum;
  std::size_t gt = 0;
  for (const StudyRow& row : three.rows) {
    sum += row.first.counts;
    gt += row.first.ground_truth;
  }
  EXPECT_EQ(four.rows[0].first.counts, sum);
  EXPECT_EQ(four.rows[0].first.ground_truth, gt);
}

TEST_F(StudyFixture, StudyTwoTrialStatistics) {
  StudyConfig cfg;
  cfg.study_id = 2;
  cfg.trials = 1;
  for (const StudyRow& row : run(cfg).rows) {
    EXPECT_FALSE(row.ap_std.has_value());
    EXPECT_EQ(row.trial_ap.size(), 1u);
  }
  cfg.trials = 4;
  const StudyReport r = run(cfg);
  for (const StudyRow& row : r.rows) {
    ASSERT_EQ(row.trial_ap.size(), 4u);
    ASSERT_TRUE(row.ap_std.has_value());
    const double mean =
        std::accumulate(row.trial_ap.begin(), row.trial_ap.end(), 0.0) / 4.0;
    double ss = 0.0;
    for (double ap : row.trial_ap) ss += (ap - mean) * (ap - mean);
    EXPECT_NEAR(row.metrics.ap, mean, 1e-15);
    EXPECT_NEAR(*row.ap_std, std::sqrt(ss / 3.0), 1e-15);
  }
  // Training subsets are shared by the four test modalities.
  EXPECT_EQ(r.rows[0].trial_seeds, r.rows[2].trial_seeds);
  EXPECT_NE(r.rows[0].trial_seeds, r.rows[1].trial_seeds);
  std::size_t seed_entries = 0;
  for (const auto& [key, value] : r.provenance) {
    seed_entries += key.rfind("selection_seed.", 0) == 0 ? 1 : 0;
  }
  EXPECT_EQ(seed_entries, 8u);
}

TEST_F(StudyFixture, ReportsAreReproducibleAcrossThreads) {
  StudyConfig cfg;
  cfg.study_id = 2;
  cfg.trials = 2;
  const std::string once = render_csv(run(cfg));
  EXPECT_EQ(render_csv(run(cfg)), once);
  cfg.threads = 5;
  EXPECT_EQ(render_csv(run(cfg)), once);
  cfg.seed = 1;
  EXPECT_NE(render_csv(run(cfg)), once);
}

TEST(StudyTest, NoiselessStudyOneIsPerfect) {
  const SimulationConfig sim = simulation_preset("noiseless");
  SceneConfig scene = sim.scene;
  scene.region_count = 300;
  const DatasetManifest m = generate_dataset(scene, 1);
  const SplitAssignment split = split_objectwise(m, kDefaultSplitRatios, 2);
  SimulatedDetectionSource source(m, sim.detector, 3);
  StudyConfig cfg;
  for (const StudyRow& row : run_study(m, split, source, cfg).rows) {
    EXPECT_EQ(row.metrics.precision, 1.0) << row.test;
    EXPECT_EQ(row.metrics.recall, 1.0) << row.test;
    EXPECT_EQ(row.metrics.f1, 1.0) << row.test;
    EXPECT_EQ(row.metrics.ap, 1.0) << row.test;
  }
}

TEST(StudyTest, FusionHelpsComplementaryScenes) {
  const SimulationConfig sim = simulation_preset("complementary");
  SceneConfig scene = sim.scene;
  scene.region_count = 600;
  const DatasetManifest m = generate_dataset(scene, 4);
  const SplitAssignment split = split_objectwise(m, kDefaultSplitRatios, 5);
  for (EvalMode mode : {EvalMode::kPerImage, EvalMode::kPerRegion}) {
    SimulatedDetectionSource source(m, sim.detector, 6);
    StudyConfig cfg;
    cfg.study_id = 4;
    cfg.eval_mode = mode;
    const StudyReport r = run_study(m, split, source, cfg);
    if (mode == EvalMode::kPerImage) {
      EXPECT_GT(r.rows[1].metrics.recall, r.rows[0].metrics.recall + 0.1);
    } else {
      // Pooling already recovers the copies; fusion removes the duplicates.
      EXPECT_GT(r.rows[1].metrics.precision, r.rows[0].metrics.precision);
    }
    EXPECT_GT(r.rows[1].metrics.ap, r.rows[0].metrics.ap) << to_string(mode);
  }
}

TEST(DetectionSourceTest, KeyedLookupOrder) {
  const DatasetManifest m = testing::grid_manifest(1, 1);
  DetectionTable trial, desc, fallback;
  trial["reg-0/C/low"].add(Detection(BoundingBox(0, 0, 1, 1), 0.1));
  desc["reg-0/C/low"].add(Detection(BoundingBox(0, 0, 1, 1), 0.2));
  fallback["reg-0/C/low"].add(Detection(BoundingBox(0, 0, 1, 1), 0.3));
  KeyedDetectionSource source(m, {{"quarter_regions#1", trial},
                                  {"quarter_regions", desc}},
                              fallback);
  auto conf = [&](const std::string& d, std::size_t t) {
    TrainingSubset s;
    s.descriptor = d;
    s.trial = t;
    return (*source.detections_for(s)->image({0, 0, 0}).detections)[0]
        .confidence();
  };
  EXPECT_EQ(conf("quarter_regions", 1), 0.1);
  EXPECT_EQ(conf("quarter_regions", 0), 0.2);
  EXPECT_EQ(conf("full", 0), 0.3);

  KeyedDetectionSource strict(m, {{"full", desc}});
  TrainingSubset other;
  other.descriptor = "random_modalities";
  EXPECT_THROW(strict.detections_for(other), ValidationError);
}

}  // namespace
}  // namespace lightstack
