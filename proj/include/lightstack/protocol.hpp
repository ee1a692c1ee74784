// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Dataset protocol operations: annotation propagation, object-wise
// train/val/test splits, the image-subset selection strategies used by the
// studies, and annotation frequency per lighting condition.

#ifndef LIGHTSTACK_PROTOCOL_HPP_
#define LIGHTSTACK_PROTOCOL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightstack/core.hpp"
#include "lightstack/manifest.hpp"

namespace lightstack {

// Copies every defect's box to all 12 images. Copies that already existed
// keep their visibility flag; new copies are marked visible. Throws
// ValidationError when one defect id carries different boxes on two images.
RegionStack propagate_annotations(const RegionStack& stack);
DatasetManifest propagate_annotations(const DatasetManifest& manifest);

enum class Split : int { kTrain = 0, kVal = 1, kTest = 2 };

std::string_view to_string(Split s);
Split parse_split(std::string_view name);

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultSplitRatios = {0.70, 0.15, 0.15};

struct SplitAssignment {
  std::map<std::string, Split> by_object;
  std::uint64_t seed = 0;
  SplitRatios ratios = kDefaultSplitRatios;

  // Throws ValidationError for an object that is not assigned.
  Split of(const std::string& object_id) const;
  std::array<std::size_t, 3> counts() const;

  friend bool operator==(const SplitAssignment&,
                         const SplitAssignment&) = default;
};

// Largest-remainder apportionment of n seats; remainder ties go to the
// earlier entry (train, then val, then test).
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios);

// Seeded shuffle of the manifest's objects followed by apportionment.
// Requires at least 3 objects and positive ratios summing to 1 (1e-9).
SplitAssignment split_objectwise(const DatasetManifest& manifest,
                                 const SplitRatios& ratios,
                                 std::uint64_t seed);

// Split file:
//   # lightstack-split v1
//   # seed=42
//   # ratios=0.7,0.15,0.15
//   object_id,split
//   obj-00000,train
void save_split(const SplitAssignment& split, std::ostream& out);
SplitAssignment load_split(std::istream& in,
                           const std::string& source = "split");

// Regions of `manifest` whose object falls in `which`, in manifest order.
std::vector<RegionRef> regions_in_split(const DatasetManifest& manifest,
                                        const SplitAssignment& split,
                                        Split which);

enum class SelectionStrategy {
  kSingleModality,
  kRandomModalities,
  kQuarterRegions,
  kFull,
};

std::string_view to_string(SelectionStrategy s);
// Accepts single_modality, random_modalities, quarter_regions, full.
SelectionStrategy parse_strategy(std::string_view name);

// Scope of the exposure draw in kRandomModalities: one exposure per chosen
// image, or one exposure shared by the region's three images.
enum class ExposureScope { kPerImage, kPerRegion };

std::string_view to_string(ExposureScope s);
ExposureScope parse_exposure_scope(std::string_view name);

struct SelectionSpec {
  SelectionStrategy strategy = SelectionStrategy::kFull;
  // Used by kSingleModality.
  Modality modality = Modality::kC;
  // Mandatory for kRandomModalities and kQuarterRegions.
  std::optional<std::uint64_t> seed;
  ExposureScope exposure_scope = ExposureScope::kPerImage;
};

// Short human-readable form, e.g. "single_modality(UD)".
std::string describe(const SelectionSpec& spec);

// Applies `spec` to the given regions. Output is sorted by (region position
// in manifest, condition index):
//   single_modality(m): the 3 exposures of m for every region.
//   random_modalities:  per region, 3 of the 4 modalities chosen uniformly,
//                       one exposure each.
//   quarter_regions:    floor(N/4) regions from a seeded permutation, all 12
//                       images each.
//   full:               every image.
std::vector<ImageRef> select_images(const DatasetManifest& manifest,
                                    std::span<const RegionRef> regions,
                                    const SelectionSpec& spec);
std::vector<ImageRef> select_images(const DatasetManifest& manifest,
                                    const SplitAssignment& split, Split which,
                                    const SelectionSpec& spec);

// Fraction of annotated defects whose annotator-chosen source condition is
// each of the 12 conditions (index order). All zeros when nothing is
// annotated.
std::array<double, kConditionCount> annotation_frequency(
    const DatasetManifest& manifest);

}  // namespace lightstack

#endif  // LIGHTSTACK_PROTOCOL_HPP_
