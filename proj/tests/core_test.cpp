// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "lightstack/error.hpp"
#include "test_support.hpp"

namespace lightstack {
namespace {

TEST(ConditionTest, IndexFollowsCanonicalOrder) {
  EXPECT_EQ(condition_index({Modality::kC, Exposure::kLow}), 0u);
  EXPECT_EQ(condition_index({Modality::kUDLR, Exposure::kHigh}), 11u);
  EXPECT_EQ(condition_index({Modality::kUD, Exposure::kMedium}), 4u);
}

TEST(ConditionTest, IndexIsABijection) {
  std::set<std::size_t> seen;
  for (Modality m : kAllModalities) {
    for (Exposure e : kAllExposures) {
      const LightingCondition c{m, e};
      const std::size_t i = condition_index(c);
      EXPECT_LT(i, kConditionCount);
      EXPECT_EQ(condition_from_index(i), c);
      seen.insert(i);
    }
  }
  EXPECT_EQ(seen.size(), kConditionCount);
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    EXPECT_EQ(condition_index(all_conditions()[i]), i);
  }
  EXPECT_THROW(condition_from_index(12), ValidationError);
}

TEST(ConditionTest, NamesRoundTrip) {
  for (Modality m : kAllModalities) EXPECT_EQ(parse_modality(to_string(m)), m);
  for (Exposure e : kAllExposures) EXPECT_EQ(parse_exposure(to_string(e)), e);
  EXPECT_EQ(condition_label({Modality::kUD, Exposure::kLow}), "UD/low");
  EXPECT_THROW(parse_modality("U D"), ValidationError);
  EXPECT_THROW(parse_exposure("max"), ValidationError);
}

TEST(BoundingBoxTest, Area) {
  EXPECT_EQ(box_area(BoundingBox(0, 0, 10, 10)), 100.0);
  EXPECT_EQ(box_area(BoundingBox(0, 0, 1, 1)), 1.0);
  EXPECT_EQ(box_area(BoundingBox(2.5, 0, 7.5, 4)), 20.0);
}

TEST(BoundingBoxTest, RejectsDegenerateAndNonFinite) {
  EXPECT_THROW(BoundingBox(0, 0, 0, 1), ValidationError);
  EXPECT_THROW(BoundingBox(0, 0, 1, 0), ValidationError);
  EXPECT_THROW(BoundingBox(5, 0, 1, 1), ValidationError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(BoundingBox(nan, 0, 1, 1), ValidationError);
  EXPECT_THROW(BoundingBox(0, 0, inf, 1), ValidationError);
}

TEST(DetectionTest, ConfidenceRange) {
  const BoundingBox b(0, 0, 1, 1);
  EXPECT_NO_THROW(Detection(b, 0.0));
  EXPECT_NO_THROW(Detection(b, 1.0));
  EXPECT_THROW(Detection(b, -0.01), ValidationError);
  EXPECT_THROW(Detection(b, 1.01), ValidationError);
  EXPECT_THROW(Detection(b, std::numeric_limits<double>::quiet_NaN()),
               ValidationError);
}

TEST(RanksBeforeTest, ConfidenceThenAreaThenCoordinates) {
  const Detection high(BoundingBox(0, 0, 1, 1), 0.9);
  const Detection low(BoundingBox(0, 0, 10, 10), 0.8);
  EXPECT_TRUE(ranks_before(high, low));
  EXPECT_FALSE(ranks_before(low, high));

  const Detection big(BoundingBox(5, 5, 15, 15), 0.5);
  const Detection small(BoundingBox(0, 0, 5, 5), 0.5);
  EXPECT_TRUE(ranks_before(big, small));

  const Detection left(BoundingBox(0, 0, 2, 2), 0.5);
  const Detection right(BoundingBox(1, 0, 3, 2), 0.5);
  EXPECT_TRUE(ranks_before(left, right));
  EXPECT_FALSE(ranks_before(left, left));
}

TEST(RanksBeforeTest, IsAStrictWeakOrder) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const DetectionSet s = testing::random_detections(rng, 6, 4);
    for (const Detection& a : s.items()) {
      EXPECT_FALSE(ranks_before(a, a));
      for (const Detection& b : s.items()) {
        if (ranks_before(a, b)) EXPECT_FALSE(ranks_before(b, a));
        for (const Detection& c : s.items()) {
          if (ranks_before(a, b) && ranks_before(b, c)) {
            EXPECT_TRUE(ranks_before(a, c));
          }
        }
      }
    }
  }
}

TEST(ImageIdTest, Format) {
  EXPECT_EQ(make_image_id("reg-00007", {Modality::kUDLR, Exposure::kMedium}),
            "reg-00007/UDLR/medium");
}

TEST(RegionStackTest, OrdersImagesAndFillsIds) {
  std::vector<ImageRecord> images;
  for (std::size_t i = kConditionCount; i-- > 0;) {
    ImageRecord img;
    img.region_id = "r";
    img.condition = condition_from_index(i);
    images.push_back(img);
  }
  const RegionStack s("r", "o", true, images);
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    EXPECT_EQ(condition_index(s.images()[i].condition), i);
    EXPECT_EQ(s.images()[i].image_id,
              make_image_id("r", condition_from_index(i)));
  }
}

TEST(RegionStackTest, RejectsBrokenStacks) {
  std::vector<ImageRecord> images;
  for (LightingCondition c : all_conditions()) {
    ImageRecord img;
    img.region_id = "r";
    img.condition = c;
    images.push_back(img);
  }
  {
    auto eleven = images;
    eleven.pop_back();
    EXPECT_THROW(RegionStack("r", "o", true, eleven), ValidationError);
  }
  {
    auto dup = images;
    dup[1].condition = dup[0].condition;
    EXPECT_THROW(RegionStack("r", "o", true, dup), ValidationError);
  }
  {
    auto foreign = images;
    foreign[3].region_id = "other";
    EXPECT_THROW(RegionStack("r", "o", true, foreign), ValidationError);
  }
  {
    auto bad_id = images;
    bad_id[2].image_id = "r/C/nope";
    EXPECT_THROW(RegionStack("r", "o", true, bad_id), ValidationError);
  }
  const Annotation a{BoundingBox(0, 0, 1, 1), "d0", {}, true};
  {
    auto hidden = images;
    hidden[0].annotations.push_back(a);
    EXPECT_THROW(RegionStack("r", "o", false, hidden), ValidationError);
  }
  {
    auto twice = images;
    twice[0].annotations = {a, a};
    EXPECT_THROW(RegionStack("r", "o", true, twice), ValidationError);
  }
  {
    auto sources = images;
    Annotation b = a;
    b.source_condition = {Modality::kLR, Exposure::kHigh};
    sources[0].annotations.push_back(a);
    sources[1].annotations.push_back(b);
    EXPECT_THROW(RegionStack("r", "o", true, sources), ValidationError);
  }
}

TEST(RegionStackTest, WithDetections) {
  const RegionStack s = testing::empty_stack("r");
  DetectionSet d;
  d.add(Detection(BoundingBox(0, 0, 1, 1), 0.5));
  const RegionStack u = s.with_uniform_detections(d);
  for (const ImageRecord& img : u.images()) EXPECT_EQ(img.detections, d);
  EXPECT_FALSE(s.images()[0].detections.has_value());

  std::array<std::optional<DetectionSet>, kConditionCount> per;
  per[5] = d;
  const RegionStack p = s.with_detections(per);
  EXPECT_EQ(p.images()[5].detections, d);
  EXPECT_FALSE(p.images()[4].detections.has_value());
}

}  // namespace
}  // namespace lightstack
