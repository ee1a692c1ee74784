// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Single-class detection metrics: IoU, greedy one-to-one matching,
// Precision/Recall/F1 at a confidence cutoff, AP as the recall-weighted sum
// of precision over thresholds, and PR-curve sampling.

#ifndef LIGHTSTACK_METRICS_HPP_
#define LIGHTSTACK_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "lightstack/core.hpp"

namespace lightstack {

// Intersection over union in [0, 1]. Symmetric; 0 when interiors are
// disjoint (touching edges included).
double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

// One detection reduced to what AP needs.
struct ScoredDetection {
  double confidence = 0.0;
  bool is_tp = false;

  friend bool operator==(const ScoredDetection&,
                         const ScoredDetection&) = default;
};

struct MatchResult {
  // Counts over detections with confidence >= the cutoff passed in.
  MatchCounts counts;
  // One label per input detection, in input order. Detections below the
  // cutoff are still labelled (their labels do not depend on the cutoff).
  std::vector<bool> is_tp;
  // Index of the matched ground truth per detection, or -1.
  std::vector<long> matched_gt;
};

// Greedy one-to-one matching. Detections are visited in ranks_before order
// (input position breaks remaining ties); each takes the unmatched ground
// truth with maximal IoU, lowest index on equal IoU, and is a TP when that
// IoU >= iou_threshold. Because a cutoff only removes a suffix of the visit
// order, labels are identical for every cutoff.
MatchResult match_detections(const DetectionSet& dets,
                             std::span<const BoundingBox> gts,
                             double iou_threshold,
                             double confidence_cutoff = 0.0);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 is taken as 0 for each ratio.
PrecisionRecallF1 precision_recall_f1(const MatchCounts& counts);
// F1 from an already computed precision/recall pair.
double f1_score(double precision, double recall);

struct MetricRow {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap = 0.0;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

// The 9-point confidence grid {0.1, ..., 0.9}, ascending.
std::vector<double> default_threshold_grid();

// AP = sum_t (R_t - R_{t-1}) P_t over the distinct confidence values in
// decreasing order, with R_0 = 0. Returns 0 when ground_truth_count == 0.
double average_precision(std::span<const ScoredDetection> scored,
                         std::size_t ground_truth_count);

// Same sum over a fixed threshold grid (any order; it is visited in
// decreasing order). A threshold with no detections at or above it
// contributes precision 0 and does not move recall.
double average_precision_on_grid(std::span<const ScoredDetection> scored,
                                 std::size_t ground_truth_count,
                                 std::span<const double> thresholds);

// One point per threshold. Thresholds must be ascending and inside [0, 1]
// (ValidationError otherwise).
std::vector<PRPoint> pr_curve(std::span<const ScoredDetection> scored,
                              std::size_t ground_truth_count,
                              std::span<const double> thresholds);

}  // namespace lightstack

#endif  // LIGHTSTACK_METRICS_HPP_
