// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/protocol.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "lightstack/error.hpp"
#include "test_support.hpp"

namespace lightstack {
namespace {

// Stack whose annotations sit only on the listed (condition, defect) pairs.
RegionStack sparse_stack(
    const std::vector<std::pair<LightingCondition, Annotation>>& placed) {
  std::vector<ImageRecord> images;
  for (LightingCondition c : all_conditions()) {
    ImageRecord img;
    img.region_id = "r";
    img.condition = c;
    for (const auto& [where, a] : placed) {
      if (where == c) img.annotations.push_back(a);
    }
    images.push_back(img);
  }
  return RegionStack("r", "o", true, images);
}

TEST(PropagateTest, SingleAnnotationReachesEveryImage) {
  const LightingCondition ud_low{Modality::kUD, Exposure::kLow};
  const Annotation a{BoundingBox(1, 2, 3, 4), "d0", ud_low, true};
  const RegionStack out = propagate_annotations(sparse_stack({{ud_low, a}}));
  for (const ImageRecord& img : out.images()) {
    ASSERT_EQ(img.annotations.size(), 1u);
    EXPECT_EQ(img.annotations[0], a);
  }
}

TEST(PropagateTest, TwoDefectsOnDifferentImages) {
  const LightingCondition c1{Modality::kC, Exposure::kHigh};
  const LightingCondition c2{Modality::kLR, Exposure::kMedium};
  const Annotation a{BoundingBox(0, 0, 5, 5), "d0", c1, true};
  const Annotation b{BoundingBox(10, 10, 20, 20), "d1", c2, true};
  const RegionStack out =
      propagate_annotations(sparse_stack({{c1, a}, {c2, b}}));
  for (const ImageRecord& img : out.images()) {
    ASSERT_EQ(img.annotations.size(), 2u);
    std::set<std::string> ids;
    for (const Annotation& x : img.annotations) ids.insert(x.defect_id);
    EXPECT_EQ(ids, (std::set<std::string>{"d0", "d1"}));
  }
}

TEST(PropagateTest, KeepsExistingVisibilityAndIsIdempotent) {
  const LightingCondition src{Modality::kC, Exposure::kLow};
  const LightingCondition other{Modality::kUD, Exposure::kLow};
  Annotation hidden{BoundingBox(0, 0, 5, 5), "d0", src, false};
  const Annotation shown{BoundingBox(0, 0, 5, 5), "d0", src, true};
  const RegionStack once =
      propagate_annotations(sparse_stack({{src, shown}, {other, hidden}}));
  EXPECT_FALSE(once.image(other).annotations[0].visible);
  EXPECT_TRUE(once.image({Modality::kLR, Exposure::kLow}).annotations[0].visible);
  EXPECT_EQ(propagate_annotations(once), once);
}

TEST(PropagateTest, InvisibleStackIsUnchanged) {
  const RegionStack hidden = testing::empty_stack("r", "o", false);
  const RegionStack out = propagate_annotations(hidden);
  EXPECT_EQ(out, hidden);
  for (const ImageRecord& img : out.images()) {
    EXPECT_TRUE(img.annotations.empty());
  }
}

TEST(PropagateTest, ConflictingBoxesAreRejected) {
  const LightingCondition c1{Modality::kC, Exposure::kLow};
  const LightingCondition c2{Modality::kUD, Exposure::kLow};
  const Annotation a{BoundingBox(0, 0, 5, 5), "d0", c1, true};
  const Annotation b{BoundingBox(0, 0, 6, 5), "d0", c1, true};
  EXPECT_THROW(propagate_annotations(sparse_stack({{c1, a}, {c2, b}})),
               ValidationError);
}

TEST(SplitTest, Apportion) {
  EXPECT_EQ(apportion(100, kDefaultSplitRatios),
            (std::array<std::size_t, 3>{70, 15, 15}));
  EXPECT_EQ(apportion(10, kDefaultSplitRatios),
            (std::array<std::size_t, 3>{7, 2, 1}));
  EXPECT_EQ(apportion(3, kDefaultSplitRatios),
            (std::array<std::size_t, 3>{2, 1, 0}));
  for (std::size_t n = 0; n < 300; ++n) {
    const auto a = apportion(n, kDefaultSplitRatios);
    EXPECT_EQ(a[0] + a[1] + a[2], n);
  }
}

TEST(SplitTest, ObjectWiseAndDeterministic) {
  const DatasetManifest m = testing::grid_manifest(100, 3);
  const SplitAssignment a = split_objectwise(m, kDefaultSplitRatios, 5);
  EXPECT_EQ(a.counts(), (std::array<std::size_t, 3>{70, 15, 15}));
  EXPECT_EQ(split_objectwise(m, kDefaultSplitRatios, 5), a);
  EXPECT_NE(split_objectwise(m, kDefaultSplitRatios, 6).by_object, a.by_object);

  std::size_t total = 0;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    for (const RegionRef& r : regions_in_split(m, a, s)) {
      EXPECT_EQ(a.of(m.region(r).object_id()), s);
      ++total;
    }
  }
  EXPECT_EQ(total, m.region_count());
}

TEST(SplitTest, RejectsBadInputs) {
  EXPECT_THROW(split_objectwise(testing::grid_manifest(2, 1),
                                kDefaultSplitRatios, 1),
               ValidationError);
  const DatasetManifest m = testing::grid_manifest(10, 1);
  EXPECT_THROW(split_objectwise(m, {0.5, 0.5, 0.5}, 1), ValidationError);
  EXPECT_THROW(split_objectwise(m, {1.0, 0.0, 0.0}, 1), ValidationError);
}

TEST(SplitTest, FileRoundTrip) {
  const DatasetManifest m = testing::grid_manifest(20, 1);
  const SplitAssignment a = split_objectwise(m, kDefaultSplitRatios, 99);
  std::ostringstream out;
  save_split(a, out);
  const std::string header =
      "# lightstack-split v1\n# seed=99\n# ratios=0.7,0.15,0.15\n";
  EXPECT_EQ(out.str().substr(0, header.size()), header);
  std::istringstream in(out.str());
  EXPECT_EQ(load_split(in), a);

  std::istringstream bad("object_id,split\nobj-0,holdout\n");
  EXPECT_THROW(load_split(bad), ParseError);
}

TEST(SelectTest, SingleModality) {
  const DatasetManifest m = testing::grid_manifest(250, 4);
  const std::vector<RegionRef> all = m.region_refs();
  SelectionSpec spec;
  spec.strategy = SelectionStrategy::kSingleModality;
  spec.modality = Modality::kUDLR;
  const auto refs = select_images(m, all, spec);
  EXPECT_EQ(refs.size(), 3000u);
  for (const ImageRef& r : refs) {
    EXPECT_EQ(m.image(r).condition.modality, Modality::kUDLR);
  }
  EXPECT_TRUE(std::is_sorted(refs.begin(), refs.end()));
}

TEST(SelectTest, RandomModalities) {
  const DatasetManifest m = testing::grid_manifest(250, 4);
  const std::vector<RegionRef> all = m.region_refs();
  for (ExposureScope scope : {ExposureScope::kPerImage, ExposureScope::kPerRegion}) {
    SelectionSpec spec;
    spec.strategy = SelectionStrategy::kRandomModalities;
    spec.seed = 12;
    spec.exposure_scope = scope;
    const auto refs = select_images(m, all, spec);
    ASSERT_EQ(refs.size(), 3000u);
    std::array<std::size_t, kModalityCount> modality_use{};
    for (std::size_t i = 0; i < refs.size(); i += 3) {
      std::set<Modality> mods;
      std::set<Exposure> exps;
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(refs[i + k].region_index, refs[i].region_index);
        EXPECT_EQ(refs[i + k].object_index, refs[i].object_index);
        const LightingCondition c = m.image(refs[i + k]).condition;
        mods.insert(c.modality);
        exps.insert(c.exposure);
        ++modality_use[static_cast<std::size_t>(c.modality)];
      }
      EXPECT_EQ(mods.size(), 3u);
      if (scope == ExposureScope::kPerRegion) EXPECT_EQ(exps.size(), 1u);
    }
    // Each modality is dropped in about a quarter of the regions.
    for (std::size_t use : modality_use) EXPECT_NEAR(use, 750.0, 90.0);
    EXPECT_EQ(select_images(m, all, spec), refs);
  }
}

TEST(SelectTest, QuarterRegions) {
  const DatasetManifest m = testing::grid_manifest(5071, 1);
  SelectionSpec spec;
  spec.strategy = SelectionStrategy::kQuarterRegions;
  spec.seed = 4;
  const auto refs = select_images(m, m.region_refs(), spec);
  EXPECT_EQ(refs.size(), 15204u);
  std::set<std::size_t> regions;
  for (const ImageRef& r : refs) regions.insert(r.object_index);
  EXPECT_EQ(regions.size(), 1267u);
}

TEST(SelectTest, RandomStrategiesNeedASeed) {
  const DatasetManifest m = testing::grid_manifest(4, 1);
  SelectionSpec spec;
  spec.strategy = SelectionStrategy::kQuarterRegions;
  EXPECT_THROW(select_images(m, m.region_refs(), spec), ValidationError);
  EXPECT_EQ(describe(SelectionSpec{SelectionStrategy::kSingleModality,
                                   Modality::kUD, std::nullopt,
                                   ExposureScope::kPerImage}),
            "single_modality(UD)");
  EXPECT_EQ(parse_strategy("quarter_regions"),
            SelectionStrategy::kQuarterRegions);
  EXPECT_THROW(parse_strategy("half"), ValidationError);
}

TEST(AnnotationFrequencyTest, AllOnOneCondition) {
  const DatasetManifest m = testing::grid_manifest(10, 2);
  const auto f = annotation_frequency(m);
  EXPECT_EQ(f[0], 1.0);
  for (std::size_t c = 1; c < kConditionCount; ++c) EXPECT_EQ(f[c], 0.0);
  const auto none = annotation_frequency(DatasetManifest{});
  for (double v : none) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace lightstack
