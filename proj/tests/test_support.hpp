// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Fixture builders and random generators shared by the tests.

#ifndef LIGHTSTACK_TESTS_TEST_SUPPORT_HPP_
#define LIGHTSTACK_TESTS_TEST_SUPPORT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lightstack/core.hpp"
#include "lightstack/manifest.hpp"
#include "lightstack/metrics.hpp"

namespace lightstack::testing {

// A stack with no annotations and no detections.
inline RegionStack empty_stack(const std::string& region_id,
                               const std::string& object_id = "obj-0",
                               bool visible = true) {
  std::vector<ImageRecord> images;
  for (LightingCondition c : all_conditions()) {
    ImageRecord img;
    img.region_id = region_id;
    img.condition = c;
    images.push_back(img);
  }
  return RegionStack(region_id, object_id, visible, std::move(images));
}

// One defect "d0" with `box` on every image, drawn on `source`.
inline RegionStack annotated_stack(const std::string& region_id,
                                   const std::string& object_id,
                                   const BoundingBox& box,
                                   LightingCondition source = {}) {
  std::vector<ImageRecord> images;
  for (LightingCondition c : all_conditions()) {
    ImageRecord img;
    img.region_id = region_id;
    img.condition = c;
    img.annotations.push_back(Annotation{box, "d0", source, true});
    images.push_back(img);
  }
  return RegionStack(region_id, object_id, true, std::move(images));
}

// `objects` objects with `regions_per_object` annotated regions each.
inline DatasetManifest grid_manifest(std::size_t objects,
                                     std::size_t regions_per_object) {
  DatasetManifest m;
  std::size_t r = 0;
  for (std::size_t o = 0; o < objects; ++o) {
    ObjectEntry obj{"obj-" + std::to_string(o), {}};
    for (std::size_t k = 0; k < regions_per_object; ++k, ++r) {
      const double x = static_cast<double>(r % 50) * 10.0;
      obj.regions.push_back(annotated_stack("reg-" + std::to_string(r),
                                            obj.object_id,
                                            BoundingBox(x, 0, x + 8, 8)));
    }
    m.objects.push_back(std::move(obj));
  }
  return m;
}

// Boxes on a coarse integer lattice so that ties and exact overlaps occur.
inline BoundingBox random_box(std::mt19937_64& rng, int extent = 20) {
  std::uniform_int_distribution<int> pos(0, extent);
  std::uniform_int_distribution<int> size(1, extent / 2);
  const double x = pos(rng);
  const double y = pos(rng);
  return BoundingBox(x, y, x + size(rng), y + size(rng));
}

// Confidences on a tenth grid, so equal confidences are common.
inline DetectionSet random_detections(std::mt19937_64& rng, std::size_t max_n,
                                      int extent = 20) {
  std::uniform_int_distribution<std::size_t> count(0, max_n);
  std::uniform_int_distribution<int> conf(0, 10);
  DetectionSet out;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    out.add(Detection(random_box(rng, extent), conf(rng) / 10.0));
  }
  return out;
}

inline std::vector<ScoredDetection> random_scored(std::mt19937_64& rng,
                                                  std::size_t max_n,
                                                  std::size_t& ground_truth) {
  std::uniform_int_distribution<std::size_t> count(0, max_n);
  std::uniform_int_distribution<int> conf(0, 20);
  std::bernoulli_distribution tp(0.5);
  std::vector<ScoredDetection> out(count(rng));
  std::size_t tps = 0;
  for (ScoredDetection& s : out) {
    s.confidence = conf(rng) / 20.0;
    s.is_tp = tp(rng);
    tps += s.is_tp ? 1 : 0;
  }
  std::uniform_int_distribution<std::size_t> extra(0, 5);
  ground_truth = tps + extra(rng);
  return out;
}

}  // namespace lightstack::testing

#endif  // LIGHTSTACK_TESTS_TEST_SUPPORT_HPP_
