// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Domain vocabulary shared by every module: boxes, lighting conditions,
// annotations, detections and the 12-image region stack.

#ifndef LIGHTSTACK_CORE_HPP_
#define LIGHTSTACK_CORE_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lightstack {

// Axis-aligned box in continuous image coordinates (origin top-left, x to
// the right, y down). Area is width * height with no +1 pixel correction.
class BoundingBox {
 public:
  // Throws ValidationError unless all coordinates are finite and the box has
  // strictly positive width and height.
  BoundingBox(double x_min, double y_min, double x_max, double y_max);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  // Lexicographic on (x_min, y_min, x_max, y_max).
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

double box_area(const BoundingBox& b);

enum class Modality : int { kC = 0, kUD = 1, kLR = 2, kUDLR = 3 };
enum class Exposure : int { kLow = 0, kMedium = 1, kHigh = 2 };

inline constexpr std::size_t kModalityCount = 4;
inline constexpr std::size_t kExposureCount = 3;
inline constexpr std::size_t kConditionCount = kModalityCount * kExposureCount;

inline constexpr std::array<Modality, kModalityCount> kAllModalities = {
    Modality::kC, Modality::kUD, Modality::kLR, Modality::kUDLR};
inline constexpr std::array<Exposure, kExposureCount> kAllExposures = {
    Exposure::kLow, Exposure::kMedium, Exposure::kHigh};

std::string_view to_string(Modality m);
std::string_view to_string(Exposure e);
// Throw ValidationError on unknown names.
Modality parse_modality(std::string_view name);
Exposure parse_exposure(std::string_view name);

struct LightingCondition {
  Modality modality = Modality::kC;
  Exposure exposure = Exposure::kLow;

  friend bool operator==(const LightingCondition&,
                         const LightingCondition&) = default;
};

// 3 * modality + exposure, so (C, low) -> 0 and (UDLR, high) -> 11.
constexpr std::size_t condition_index(LightingCondition c) {
  return 3 * static_cast<std::size_t>(c.modality) +
         static_cast<std::size_t>(c.exposure);
}

// Inverse of condition_index. Throws ValidationError for index >= 12.
LightingCondition condition_from_index(std::size_t index);

// All 12 conditions in canonical index order.
const std::array<LightingCondition, kConditionCount>& all_conditions();

// "UD/low" style label.
std::string condition_label(LightingCondition c);

struct Annotation {
  BoundingBox box;
  std::string defect_id;
  // The condition the annotator drew the box on.
  LightingCondition source_condition;
  // Whether the defect is visible under the condition of the image carrying
  // this copy. Simulated data fills it from the realized visibility; for
  // externally annotated data it stays true.
  bool visible = true;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

class Detection {
 public:
  // Throws ValidationError unless 0 <= confidence <= 1.
  Detection(BoundingBox box, double confidence);

  const BoundingBox& box() const { return box_; }
  double confidence() const { return confidence_; }

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  BoundingBox box_;
  double confidence_;
};

// Deterministic ranking used wherever detections are ordered by score:
// higher confidence first, then larger area, then lexicographically smaller
// coordinates. Callers that need a total order add the input position as the
// last key (stable sort).
bool ranks_before(const Detection& a, const Detection& b);

// Ordered detections for one image or one pooled stack. Order is exactly
// insertion order.
class DetectionSet {
 public:
  DetectionSet() = default;
  explicit DetectionSet(std::vector<Detection> items)
      : items_(std::move(items)) {}

  void add(Detection d) { items_.push_back(std::move(d)); }
  void append(const DetectionSet& other);

  std::span<const Detection> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Detection& operator[](std::size_t i) const { return items_[i]; }

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;

 private:
  std::vector<Detection> items_;
};

// "<region_id>/<modality>/<exposure>", e.g. "reg-00007/UD/low".
std::string make_image_id(std::string_view region_id, LightingCondition c);

struct ImageRecord {
  std::string image_id;
  std::string region_id;
  LightingCondition condition;
  std::string uri;
  std::vector<Annotation> annotations;
  std::optional<DetectionSet> detections;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

// The 12 pixel-registered images of one defective region. Images are held
// in condition-index order regardless of construction order.
class RegionStack {
 public:
  // Validates: exactly 12 images, one per condition; every image belongs to
  // region_id; defect ids unique within an image; a defect id carries the
  // same source condition everywhere; invisible stacks carry no annotations.
  RegionStack(std::string region_id, std::string object_id, bool visible,
              std::vector<ImageRecord> images);

  const std::string& region_id() const { return region_id_; }
  const std::string& object_id() const { return object_id_; }
  bool visible() const { return visible_; }

  std::span<const ImageRecord, kConditionCount> images() const {
    return std::span<const ImageRecord, kConditionCount>(images_);
  }
  const ImageRecord& image(LightingCondition c) const {
    return images_[condition_index(c)];
  }

  // Copy with per-image detections replaced, indexed by condition index.
  RegionStack with_detections(
      const std::array<std::optional<DetectionSet>, kConditionCount>& dets)
      const;
  // Copy with every image's detections set to the same list.
  RegionStack with_uniform_detections(const DetectionSet& dets) const;

  friend bool operator==(const RegionStack&, const RegionStack&) = default;

 private:
  std::string region_id_;
  std::string object_id_;
  bool visible_ = false;
  std::array<ImageRecord, kConditionCount> images_;
};

}  // namespace lightstack

#endif  // LIGHTSTACK_CORE_HPP_
