// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Study harness. A study picks training subsets and test images from a
// split manifest, asks a DetectionSource for the test-side detections a
// detector trained on that subset would produce, and scores them.
//
//   Study 1: train single_modality(m), test m, for each modality.
//   Study 2: train random_modalities or quarter_regions (N seeded trials),
//            test each modality.
//   Study 3: train on everything, test each modality.
//   Study 4: train on everything, test on all images, without and with
//            late fusion.

#ifndef LIGHTSTACK_STUDY_HPP_
#define LIGHTSTACK_STUDY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lightstack/core.hpp"
#include "lightstack/detections_io.hpp"
#include "lightstack/fusion.hpp"
#include "lightstack/manifest.hpp"
#include "lightstack/metrics.hpp"
#include "lightstack/protocol.hpp"
#include "lightstack/simulator.hpp"

namespace lightstack {

enum class ApMode { kDistinct, kGrid };
std::string_view to_string(ApMode m);
ApMode parse_ap_mode(std::string_view name);

// How fused (and, in Study 4, unfused) all-condition test sets are scored.
//   kPerImage:  each image against its own annotation copies.
//   kPerRegion: the region's pooled detections once against the region's
//               distinct defects.
enum class EvalMode { kPerImage, kPerRegion };
std::string_view to_string(EvalMode m);
EvalMode parse_eval_mode(std::string_view name);

struct StudyConfig {
  int study_id = 1;
  double confidence_cutoff = 0.7;
  double iou_threshold = 0.5;
  // Trials per randomized strategy (Study 2).
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  FusionParams fusion;
  EvalMode eval_mode = EvalMode::kPerImage;
  ApMode ap_mode = ApMode::kDistinct;
  std::vector<double> ap_grid = default_threshold_grid();
  ExposureScope exposure_scope = ExposureScope::kPerImage;
  Split eval_split = Split::kTest;
  unsigned threads = 1;
};

// Throws ValidationError on an unknown study id, zero trials, or out of
// range thresholds.
void validate(const StudyConfig& config);

// The training side of one experiment.
struct TrainingSubset {
  // "single_modality(C)", "random_modalities", "quarter_regions", "full".
  std::string descriptor;
  SelectionSpec spec;
  std::size_t trial = 0;
  std::vector<ImageRef> images;
};

// Supplies test-side detections for a detector trained on a given subset.
// The returned manifest must keep the layout of the study manifest.
class DetectionSource {
 public:
  virtual ~DetectionSource() = default;
  virtual std::shared_ptr<const DatasetManifest> detections_for(
      const TrainingSubset& subset) = 0;
  // Short description recorded in the report provenance.
  virtual std::string describe() const = 0;
};

// Same detections regardless of the training subset.
class FixedDetectionSource : public DetectionSource {
 public:
  explicit FixedDetectionSource(DatasetManifest with_detections);
  std::shared_ptr<const DatasetManifest> detections_for(
      const TrainingSubset& subset) override;
  std::string describe() const override { return "fixed"; }

 private:
  std::shared_ptr<const DatasetManifest> manifest_;
};

// Detection tables keyed by training descriptor. A key "descriptor#t"
// matches trial t only and wins over the plain descriptor. Subsets without a
// key fall back to `fallback` when given, else throw ValidationError.
class KeyedDetectionSource : public DetectionSource {
 public:
  KeyedDetectionSource(DatasetManifest base,
                       std::map<std::string, DetectionTable> tables,
                       std::optional<DetectionTable> fallback = std::nullopt);
  std::shared_ptr<const DatasetManifest> detections_for(
      const TrainingSubset& subset) override;
  std::string describe() const override;

 private:
  DatasetManifest base_;
  std::map<std::string, DetectionTable> tables_;
  std::optional<DetectionTable> fallback_;
  std::map<std::string, std::shared_ptr<const DatasetManifest>> cache_;
};

// Runs the simulated detector. The noise model may depend on the subset;
// each (descriptor, trial) draws from its own derived seed.
class SimulatedDetectionSource : public DetectionSource {
 public:
  using NoiseFn = std::function<DetectorNoiseModel(const TrainingSubset&)>;

  SimulatedDetectionSource(DatasetManifest manifest, DetectorNoiseModel noise,
                           std::uint64_t seed, unsigned threads = 1);
  SimulatedDetectionSource(DatasetManifest manifest, NoiseFn noise,
                           std::uint64_t seed, unsigned threads = 1);
  std::shared_ptr<const DatasetManifest> detections_for(
      const TrainingSubset& subset) override;
  std::string describe() const override;

 private:
  DatasetManifest manifest_;
  NoiseFn noise_;
  std::uint64_t seed_;
  unsigned threads_;
  std::map<std::string, std::shared_ptr<const DatasetManifest>> cache_;
};

struct Evaluation {
  // Counts at the confidence cutoff.
  MatchCounts counts;
  // Every detection, labelled independently of the cutoff.
  std::vector<ScoredDetection> scored;
  std::size_t ground_truth = 0;

  Evaluation& operator+=(const Evaluation& o);
};

// Scores each image against its own annotations and aggregates. Throws
// ValidationError listing the image ids that carry no detections.
Evaluation evaluate_images(const DatasetManifest& manifest,
                           std::span<const ImageRef> images,
                           double confidence_cutoff, double iou_threshold,
                           unsigned threads = 1);

// Scores whole regions: the detections of all 12 images are pooled and
// matched once against the region's distinct defects. With `fusion`, the
// pool is reduced by NMS before matching.
Evaluation evaluate_regions(
    const DatasetManifest& manifest, std::span<const RegionRef> regions,
    double confidence_cutoff, double iou_threshold, unsigned threads = 1,
    const std::optional<FusionParams>& fusion = std::nullopt);

// Replaces every region's detections with its fused set.
DatasetManifest fuse_manifest(const DatasetManifest& manifest,
                              const FusionParams& params, unsigned threads = 1);

// AP of an evaluation under the configured mode.
double average_precision(const Evaluation& e, const StudyConfig& config);

struct StudyRow {
  std::string train;
  std::string test;
  // Precision, recall and F1 of the first trial. AP is the mean over trials.
  MetricRow metrics;
  // Sample standard deviation of per-trial AP; set iff trials > 1.
  std::optional<double> ap_std;
  std::vector<double> trial_ap;
  std::vector<std::uint64_t> trial_seeds;
  // Evaluation of the first trial, kept for PR curves and cross-checks.
  Evaluation first;
};

struct StudyReport {
  int study_id = 0;
  std::size_t trials = 1;
  std::vector<StudyRow> rows;
  // Ordered key/value pairs: seeds, parameters, format versions.
  std::vector<std::pair<std::string, std::string>> provenance;
};

// Test images of `modality` in the evaluation split; shared by Studies 1-3.
std::vector<ImageRef> study_test_images(const DatasetManifest& manifest,
                                        const SplitAssignment& split,
                                        const StudyConfig& config,
                                        std::optional<Modality> modality);

StudyReport run_study(const DatasetManifest& manifest,
                      const SplitAssignment& split, DetectionSource& source,
                      const StudyConfig& config);

}  // namespace lightstack

#endif  // LIGHTSTACK_STUDY_HPP_
