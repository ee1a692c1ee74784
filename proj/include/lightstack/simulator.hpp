// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic multi-illumination datasets and a simulated detector. Defect
// visibility is realized as a binary flag per (defect, condition); the
// detector only fires on visible copies and adds Poisson clutter.

#ifndef LIGHTSTACK_SIMULATOR_HPP_
#define LIGHTSTACK_SIMULATOR_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lightstack/core.hpp"
#include "lightstack/manifest.hpp"

namespace lightstack {

// Visibility of one defect kind. Per-condition probability is
// min(1, modality_visibility[m] * exposure_multiplier[e]).
struct DefectProfile {
  std::string kind;
  double weight = 1.0;
  std::array<double, kModalityCount> modality_visibility{};

  std::array<double, kConditionCount> condition_visibility(
      const std::array<double, kExposureCount>& exposure_multipliers) const;
};

std::vector<DefectProfile> default_defect_profiles();

enum class VisibilityModel {
  // Independent Bernoulli draw per condition, redrawn until at least one
  // condition is visible.
  kIndependent,
  // Each defect is visible under exactly one modality (uniform), in all three
  // of its exposures.
  kComplementary,
};

enum class AnnotatorPrior {
  // Uniform over the conditions where the defect is visible.
  kUniform,
  // Weighted by reference_annotation_profile().
  kReferenceProfile,
};

std::string_view to_string(VisibilityModel v);
VisibilityModel parse_visibility_model(std::string_view name);
std::string_view to_string(AnnotatorPrior p);
AnnotatorPrior parse_annotator_prior(std::string_view name);

// Approximate per-condition share of the conditions annotators pick when
// free to choose. The values are coarse, so treat them as a shape prior
// only. Sums to 1 in condition-index order.
const std::array<double, kConditionCount>& reference_annotation_profile();

struct SceneConfig {
  std::size_t region_count = 100;
  std::size_t min_regions_per_object = 1;
  std::size_t max_regions_per_object = 4;
  double image_width = 640.0;
  double image_height = 480.0;
  // Weight of k defects per region at index k.
  std::vector<double> defects_per_region = {0.0, 0.75, 0.20, 0.05};
  double min_defect_size = 16.0;
  double max_defect_size = 96.0;
  std::vector<DefectProfile> profiles = default_defect_profiles();
  std::array<double, kExposureCount> exposure_multipliers = {0.8, 1.0, 0.9};
  // Probability that a region's defects are visible under no condition.
  double invisible_rate = 0.008;
  VisibilityModel visibility_model = VisibilityModel::kIndependent;
  AnnotatorPrior annotator_prior = AnnotatorPrior::kReferenceProfile;
  // Write the annotation on all 12 images (true) or only on the source image.
  bool propagate = true;
};

// Throws ValidationError describing the first problem found, including a
// defect size that cannot fit in the image.
void validate(const SceneConfig& config);

// low + (high - low) * Beta(alpha, beta).
struct ConfidenceModel {
  double alpha = 2.0;
  double beta = 2.0;
  double low = 0.0;
  double high = 1.0;
};

struct DetectorNoiseModel {
  // Probability of detecting a defect copy that is visible, per condition.
  std::array<double, kConditionCount> detect_probability = {
      0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
  // Gaussian stddev in pixels added to each box coordinate.
  double jitter_stddev = 2.0;
  ConfidenceModel true_confidence = {5.0, 2.0, 0.0, 1.0};
  // Mean number of false positives per image.
  double false_positive_rate = 0.5;
  ConfidenceModel false_confidence = {2.0, 5.0, 0.0, 1.0};
  double min_false_positive_size = 16.0;
  double max_false_positive_size = 96.0;
};

void validate(const DetectorNoiseModel& noise);

// Deterministic in (config, seed); `threads` only changes wall time.
// Region r draws from derive_seed(seed, {"region", r}).
DatasetManifest generate_dataset(const SceneConfig& config, std::uint64_t seed,
                                 unsigned threads = 1);

// Fills the detections of every image. Each image draws from a generator
// seeded by (seed, image_id). True detections come only from annotation
// copies flagged visible; boxes are clamped to the image when its size is
// known. Deterministic in (manifest, noise, seed).
DatasetManifest simulate_detections(const DatasetManifest& manifest,
                                    const DetectorNoiseModel& noise,
                                    std::uint64_t seed, unsigned threads = 1);

}  // namespace lightstack

#endif  // LIGHTSTACK_SIMULATOR_HPP_
