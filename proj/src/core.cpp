// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/core.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "lightstack/error.hpp"

namespace lightstack {

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& field, const std::string& what)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : "") +
            (field.empty() ? "" : ": field '" + field + "'") + ": " + what),
      line_(line),
      field_(field) {}

BoundingBox::BoundingBox(double x_min, double y_min, double x_max,
                         double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) ||
      !std::isfinite(x_max) || !std::isfinite(y_max)) {
    throw ValidationError("bounding box has non-finite coordinates");
  }
  if (!(x_max > x_min) || !(y_max > y_min)) {
    std::ostringstream os;
    os << "bounding box (" << x_min << ", " << y_min << ", " << x_max << ", "
       << y_max << ") has non-positive extent";
    throw ValidationError(os.str());
  }
}

double box_area(const BoundingBox& b) { return b.width() * b.height(); }

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kC:
      return "C";
    case Modality::kUD:
      return "UD";
    case Modality::kLR:
      return "LR";
    case Modality::kUDLR:
      return "UDLR";
  }
  return "?";
}

std::string_view to_string(Exposure e) {
  switch (e) {
    case Exposure::kLow:
      return "low";
    case Exposure::kMedium:
      return "medium";
    case Exposure::kHigh:
      return "high";
  }
  return "?";
}

Modality parse_modality(std::string_view name) {
  for (Modality m : kAllModalities) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown modality '" + std::string(name) +
                        "' (expected C, UD, LR or UDLR)");
}

Exposure parse_exposure(std::string_view name) {
  for (Exposure e : kAllExposures) {
    if (to_string(e) == name) return e;
  }
  throw ValidationError("unknown exposure '" + std::string(name) +
                        "' (expected low, medium or high)");
}

LightingCondition condition_from_index(std::size_t index) {
  if (index >= kConditionCount) {
    throw ValidationError("condition index " + std::to_string(index) +
                          " out of range [0, 11]");
  }
  return LightingCondition{static_cast<Modality>(index / 3),
                           static_cast<Exposure>(index % 3)};
}

const std::array<LightingCondition, kConditionCount>& all_conditions() {
  static const auto table = [] {
    std::array<LightingCondition, kConditionCount> out{};
    for (std::size_t i = 0; i < kConditionCount; ++i) {
      out[i] = condition_from_index(i);
    }
    return out;
  }();
  return table;
}

std::string condition_label(LightingCondition c) {
  std::string out(to_string(c.modality));
  out += '/';
  out += to_string(c.exposure);
  return out;
}

Detection::Detection(BoundingBox box, double confidence)
    : box_(box), confidence_(confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw ValidationError("detection confidence " +
                          std::to_string(confidence) + " outside [0, 1]");
  }
}

bool ranks_before(const Detection& a, const Detection& b) {
  if (a.confidence() != b.confidence()) {
    return a.confidence() > b.confidence();
  }
  const double area_a = box_area(a.box());
  const double area_b = box_area(b.box());
  if (area_a != area_b) return area_a > area_b;
  return a.box() < b.box();
}

void DetectionSet::append(const DetectionSet& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

std::string make_image_id(std::string_view region_id, LightingCondition c) {
  std::string out(region_id);
  out += '/';
  out += condition_label(c);
  return out;
}

RegionStack::RegionStack(std::string region_id, std::string object_id,
                         bool visible, std::vector<ImageRecord> images)
    : region_id_(std::move(region_id)),
      object_id_(std::move(object_id)),
      visible_(visible) {
  if (images.size() != kConditionCount) {
    throw ValidationError("region " + region_id_ + " has " +
                          std::to_string(images.size()) +
                          " images, expected 12");
  }
  std::array<bool, kConditionCount> seen{};
  std::map<std::string, std::size_t> source_of_defect;
  for (ImageRecord& img : images) {
    const std::size_t idx = condition_index(img.condition);
    if (seen[idx]) {
      throw ValidationError("region " + region_id_ +
                            " has duplicate condition " +
                            condition_label(img.condition));
    }
    seen[idx] = true;
    const std::string expected_id = make_image_id(region_id_, img.condition);
    if (img.image_id.empty()) img.image_id = expected_id;
    if (img.image_id != expected_id) {
      throw ValidationError("image id " + img.image_id + " does not match " +
                            expected_id);
    }
    if (img.region_id != region_id_) {
      throw ValidationError("image " + img.image_id + " belongs to region " +
                            img.region_id + ", not " + region_id_);
    }
    if (!visible_ && !img.annotations.empty()) {
      throw ValidationError("region " + region_id_ +
                            " is flagged not visible but image " +
                            img.image_id + " carries annotations");
    }
    std::set<std::string> ids;
    for (const Annotation& a : img.annotations) {
      if (!ids.insert(a.defect_id).second) {
        throw ValidationError("defect id " + a.defect_id +
                              " repeated within image " + img.image_id);
      }
      const std::size_t src = condition_index(a.source_condition);
      auto [it, inserted] = source_of_defect.emplace(a.defect_id, src);
      if (!inserted && it->second != src) {
        throw ValidationError("defect " + a.defect_id + " in region " +
                              region_id_ +
                              " has inconsistent source conditions");
      }
    }
    images_[idx] = std::move(img);
  }
}

RegionStack RegionStack::with_detections(
    const std::array<std::optional<DetectionSet>, kConditionCount>& dets)
    const {
  RegionStack out = *this;
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    out.images_[i].detections = dets[i];
  }
  return out;
}

RegionStack RegionStack::with_uniform_detections(
    const DetectionSet& dets) const {
  RegionStack out = *this;
  for (ImageRecord& img : out.images_) img.detections = dets;
  return out;
}

}  // namespace lightstack
