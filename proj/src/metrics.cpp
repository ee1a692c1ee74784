// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "lightstack/error.hpp"

namespace lightstack {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw =
      std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double ih =
      std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = box_area(a) + box_area(b) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

MatchResult match_detections(const DetectionSet& dets,
                             std::span<const BoundingBox> gts,
                             double iou_threshold, double confidence_cutoff) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("IoU threshold must lie in (0, 1]");
  }
  MatchResult out;
  out.is_tp.assign(dets.size(), false);
  out.matched_gt.assign(dets.size(), -1);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return ranks_before(dets[a], dets[b]);
                   });

  std::vector<bool> taken(gts.size(), false);
  std::size_t matched_at_cutoff = 0;
  for (std::size_t di : order) {
    const Detection& d = dets[di];
    long best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(d.box(), gts[g]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<long>(g);
      }
    }
    const bool above_cutoff = d.confidence() >= confidence_cutoff;
    if (best >= 0 && best_iou >= iou_threshold) {
      taken[static_cast<std::size_t>(best)] = true;
      out.is_tp[di] = true;
      out.matched_gt[di] = best;
      if (above_cutoff) {
        ++out.counts.tp;
        ++matched_at_cutoff;
      }
    } else if (above_cutoff) {
      ++out.counts.fp;
    }
  }
  out.counts.fn = gts.size() - matched_at_cutoff;
  return out;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

PrecisionRecallF1 precision_recall_f1(const MatchCounts& counts) {
  PrecisionRecallF1 out;
  const auto tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fp > 0) {
    out.precision = tp / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    out.recall = tp / static_cast<double>(counts.tp + counts.fn);
  }
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  return grid;
}

namespace {

std::vector<ScoredDetection> sorted_by_confidence(
    std::span<const ScoredDetection> scored) {
  std::vector<ScoredDetection> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredDetection& a, const ScoredDetection& b) {
                     return a.confidence > b.confidence;
                   });
  return sorted;
}

}  // namespace

// Accumulates sum_t dTP_t * P_t and divides by G once at the end. This is the
// same quantity as sum_t (R_t - R_{t-1}) P_t but stays exact for a perfect
// detector (sum of dTP is exactly G).
double average_precision(std::span<const ScoredDetection> scored,
                         std::size_t ground_truth_count) {
  if (ground_truth_count == 0) return 0.0;
  const std::vector<ScoredDetection> sorted = sorted_by_confidence(scored);
  double weighted = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].confidence;
    std::size_t new_tp = 0;
    for (; i < sorted.size() && sorted[i].confidence == t; ++i) {
      if (sorted[i].is_tp) {
        ++new_tp;
      } else {
        ++fp;
      }
    }
    tp += new_tp;
    if (new_tp > 0) {
      const double precision =
          static_cast<double>(tp) / static_cast<double>(tp + fp);
      weighted += static_cast<double>(new_tp) * precision;
    }
  }
  return weighted / static_cast<double>(ground_truth_count);
}

double average_precision_on_grid(std::span<const ScoredDetection> scored,
                                 std::size_t ground_truth_count,
                                 std::span<const double> thresholds) {
  if (ground_truth_count == 0) return 0.0;
  std::vector<double> grid(thresholds.begin(), thresholds.end());
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::vector<ScoredDetection> sorted = sorted_by_confidence(scored);

  double weighted = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  for (double t : grid) {
    std::size_t new_tp = 0;
    for (; i < sorted.size() && sorted[i].confidence >= t; ++i) {
      if (sorted[i].is_tp) {
        ++new_tp;
      } else {
        ++fp;
      }
    }
    tp += new_tp;
    if (new_tp > 0) {
      const double precision =
          static_cast<double>(tp) / static_cast<double>(tp + fp);
      weighted += static_cast<double>(new_tp) * precision;
    }
  }
  return weighted / static_cast<double>(ground_truth_count);
}

std::vector<PRPoint> pr_curve(std::span<const ScoredDetection> scored,
                              std::size_t ground_truth_count,
                              std::span<const double> thresholds) {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] >= 0.0 && thresholds[k] <= 1.0)) {
      throw ValidationError("PR threshold outside [0, 1]");
    }
    if (k > 0 && !(thresholds[k] > thresholds[k - 1])) {
      throw ValidationError("PR thresholds must be strictly ascending");
    }
  }
  std::vector<PRPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    MatchCounts c;
    for (const ScoredDetection& s : scored) {
      if (s.confidence < t) continue;
      if (s.is_tp) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    c.fn = ground_truth_count >= c.tp ? ground_truth_count - c.tp : 0;
    const PrecisionRecallF1 prf = precision_recall_f1(c);
    out.push_back(PRPoint{t, prf.precision, prf.recall});
  }
  return out;
}

}  // namespace lightstack
