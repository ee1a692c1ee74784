// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "lightstack/error.hpp"
#include "lightstack/metrics.hpp"

namespace lightstack {

void validate(const FusionParams& params) {
  if (!(params.theta > 0.0 && params.theta <= 1.0)) {
    throw ValidationError("NMS threshold theta must lie in (0, 1]");
  }
}

DetectionSet nms(const DetectionSet& detections, const FusionParams& params) {
  validate(params);
  const std::size_t n = detections.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return ranks_before(detections[a], detections[b]);
                   });

  std::vector<bool> removed(n, false);
  DetectionSet kept;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t k = order[pos];
    if (removed[k]) continue;
    kept.add(detections[k]);
    const BoundingBox& anchor = detections[k].box();
    for (std::size_t rest = pos + 1; rest < n; ++rest) {
      const std::size_t z = order[rest];
      if (!removed[z] && iou(anchor, detections[z].box()) >= params.theta) {
        removed[z] = true;
      }
    }
  }
  return kept;
}

RegionStack fuse_region(const RegionStack& stack, const FusionParams& params) {
  DetectionSet pooled;
  for (const ImageRecord& img : stack.images()) {
    if (img.detections) pooled.append(*img.detections);
  }
  return stack.with_uniform_detections(nms(pooled, params));
}

}  // namespace lightstack
