// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef LIGHTSTACK_FUSION_HPP_
#define LIGHTSTACK_FUSION_HPP_

#include "lightstack/core.hpp"

namespace lightstack {

struct FusionParams {
  // NMS IoU threshold; a candidate is suppressed when IoU >= theta.
  double theta = 0.5;
};

// Throws ValidationError unless 0 < theta <= 1.
void validate(const FusionParams& params);

// Greedy hard NMS. Repeatedly keeps the top-ranked remaining detection
// (ranks_before, then input order) and drops every remaining detection whose
// IoU with it is >= theta. Output is in selection order and carries the
// original confidences.
DetectionSet nms(const DetectionSet& detections, const FusionParams& params);

// Late fusion over one region: pools the detections of all 12 images in
// condition-index order, runs nms on the pool and assigns the kept set to
// every image. Images without detections contribute nothing. Annotations and
// visibility are left untouched.
RegionStack fuse_region(const RegionStack& stack, const FusionParams& params);

}  // namespace lightstack

#endif  // LIGHTSTACK_FUSION_HPP_
