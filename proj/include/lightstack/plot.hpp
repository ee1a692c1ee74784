// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Scored-detection files and precision/recall plots.
//
// Scored file:
//   # lightstack-scored v1
//   # ground_truth=42
//   confidence,is_tp
//   0.93,1
//   0.41,0

#ifndef LIGHTSTACK_PLOT_HPP_
#define LIGHTSTACK_PLOT_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lightstack/metrics.hpp"

namespace lightstack {

struct ScoredData {
  std::size_t ground_truth = 0;
  std::vector<ScoredDetection> scored;

  friend bool operator==(const ScoredData&, const ScoredData&) = default;
};

void save_scored(const ScoredData& data, std::ostream& out);
ScoredData load_scored(std::istream& in, const std::string& source = "scored");

struct PRCurve {
  std::string label;
  std::vector<PRPoint> points;
};

// Throws ValidationError when `data` holds no detections and no ground
// truth.
PRCurve make_curve(std::string label, const ScoredData& data,
                   std::span<const double> thresholds);

// Header "label,threshold,precision,recall"; one row per point, values in
// shortest round-trip form.
std::string render_pr_csv(std::span<const PRCurve> curves);

// Recall on x, precision on y, both axes [0, 1]. Each curve is one
// <polyline> plus one <circle> per point.
std::string render_pr_svg(std::span<const PRCurve> curves);

}  // namespace lightstack

#endif  // LIGHTSTACK_PLOT_HPP_
