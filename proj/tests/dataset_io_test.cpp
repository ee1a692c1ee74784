// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "lightstack/detections_io.hpp"
#include "lightstack/error.hpp"
#include "lightstack/io.hpp"
#include "lightstack/manifest.hpp"
#include "lightstack/simulator.hpp"
#include "test_support.hpp"

namespace lightstack {
namespace {

std::string dump(const DatasetManifest& m) {
  std::ostringstream out;
  save_manifest(m, out);
  return out.str();
}

DatasetManifest parse(const std::string& text) {
  std::istringstream in(text);
  return load_manifest(in, "m.jsonl");
}

DatasetManifest small_simulated(std::size_t regions, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.region_count = regions;
  return generate_dataset(cfg, seed);
}

TEST(ManifestTest, EmptyManifestRoundTrips) {
  const DatasetManifest empty;
  const DatasetManifest back = parse(dump(empty));
  EXPECT_EQ(back.region_count(), 0u);
  EXPECT_EQ(back, empty);
}

TEST(ManifestTest, RoundTripIsExactAndByteIdentical) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DatasetManifest m = small_simulated(100, seed);
    const std::string text = dump(m);
    const DatasetManifest back = parse(text);
    EXPECT_EQ(back.image_count(), 1200u);
    EXPECT_EQ(back, m);
    EXPECT_EQ(dump(back), text);
  }
}

TEST(ManifestTest, HeaderAndRecordLayout) {
  const std::string text = dump(testing::grid_manifest(1, 1));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            R"({"record_kind":"manifest","schema_version":1,"generator":"external","seed":null,"image_width":0.0,"image_height":0.0})");
  std::getline(in, line);
  EXPECT_EQ(line,
            R"({"record_kind":"object","object_id":"obj-0","region_count":1})");
  std::getline(in, line);
  EXPECT_EQ(line,
            R"({"record_kind":"image","object_id":"obj-0","region_id":"reg-0","modality":"C","exposure":"low","uri":"","visible":true,"annotations":[["d0",0.0,0.0,8.0,8.0,true,true]]})");
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

TEST(ManifestTest, DuplicateConditionIsAValidationError) {
  auto lines = lines_of(dump(testing::grid_manifest(1, 1)));
  // Turn (reg-0, C, medium) into a second (reg-0, C, low).
  std::string& l = lines[3];
  l.replace(l.find("\"medium\""), 8, "\"low\"");
  try {
    parse(join(lines));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate condition C/low"),
              std::string::npos)
        << e.what();
  }
}

TEST(ManifestTest, MalformedRecordsNameLineAndField) {
  const std::string good = dump(testing::grid_manifest(1, 1));
  struct Case {
    std::size_t line;
    std::string from, to, field;
  };
  const Case cases[] = {
      {3, "\"modality\":\"C\"", "\"modality\":\"X\"", "modality"},
      {3, "\"uri\":\"\"", "\"uri\":\"\",\"extra\":1", "extra"},
      {4, "\"visible\":true,", "", "visible"},
      {1, "\"schema_version\":1", "\"schema_version\":9", "schema_version"},
      {3, "[\"d0\",0.0", "[\"d0\",\"zero\"", "annotations"},
      {2, "\"region_count\":1", "\"region_count\":-1", "region_count"},
  };
  for (const Case& c : cases) {
    auto lines = lines_of(good);
    std::string& l = lines[c.line - 1];
    const std::size_t at = l.find(c.from);
    ASSERT_NE(at, std::string::npos) << c.from;
    l.replace(at, c.from.size(), c.to);
    try {
      parse(join(lines));
      ADD_FAILURE() << "no error for " << c.to;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line) << e.what();
      EXPECT_EQ(e.field(), c.field) << e.what();
    }
  }
  EXPECT_THROW(parse("not json\n"), ParseError);
  auto truncated = lines_of(good);
  truncated.pop_back();
  EXPECT_THROW(parse(join(truncated)), Error);
}

TEST(ManifestTest, ValidateRejectsDuplicateIds) {
  DatasetManifest m = testing::grid_manifest(2, 1);
  m.objects[1].object_id = m.objects[0].object_id;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(ManifestTest, IndexImages) {
  const DatasetManifest m = testing::grid_manifest(2, 2);
  const auto index = index_images(m);
  EXPECT_EQ(index.size(), 48u);
  const ImageRef ref = index.at("reg-3/LR/high");
  EXPECT_EQ(ref, (ImageRef{1, 1, 8}));
  EXPECT_EQ(m.image(ref).image_id, "reg-3/LR/high");
}

TEST(DetectionsIoTest, RoundTripWithEmptyMarkers) {
  DetectionTable t;
  DetectionSet d;
  d.add(Detection(BoundingBox(0.1, 0.2, 3.5, 4.25), 0.875));
  d.add(Detection(BoundingBox(1, 1, 2, 2), 1.0 / 3.0));
  t["reg-0/C/low"] = d;
  t["reg-0/C/medium"] = DetectionSet{};
  std::ostringstream out;
  save_detections(t, out);
  EXPECT_EQ(out.str(),
            "image_id,x_min,y_min,x_max,y_max,confidence\n"
            "reg-0/C/low,0.1,0.2,3.5,4.25,0.875\n"
            "reg-0/C/low,1,1,2,2,0.3333333333333333\n"
            "reg-0/C/medium,,,,,\n");
  std::istringstream in(out.str());
  EXPECT_EQ(load_detections(in), t);
}

TEST(DetectionsIoTest, ParseErrors) {
  const std::string header = "image_id,x_min,y_min,x_max,y_max,confidence\n";
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_detections(in, "d.csv");
  };
  try {
    load(header + "a,0,0,1,1,0.5\na,0,0,1,x,0.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "y_max");
  }
  EXPECT_THROW(load("id,x\n"), ParseError);
  EXPECT_THROW(load(header + "a,0,0,1,1\n"), ParseError);
  EXPECT_THROW(load(header + "a,0,0,1,1,1.5\n"), Error);
  EXPECT_THROW(load(header + "a,2,0,1,1,0.5\n"), Error);
  EXPECT_NO_THROW(load("# comment\n" + header + "a,,,,,\n"));
}

TEST(DetectionsIoTest, AttachAndExtract) {
  const DatasetManifest m = testing::grid_manifest(1, 2);
  DetectionTable t;
  t["reg-1/UD/low"].add(Detection(BoundingBox(0, 0, 1, 1), 0.5));
  const DatasetManifest with = attach_detections(m, t);
  EXPECT_EQ(with.objects[0].regions[1].image({Modality::kUD, Exposure::kLow})
                .detections->size(),
            1u);
  EXPECT_FALSE(with.objects[0].regions[0].images()[0].detections.has_value());
  EXPECT_EQ(extract_detections(with), t);

  DetectionTable bad;
  bad["reg-9/C/low"] = DetectionSet{};
  EXPECT_THROW(attach_detections(m, bad), ValidationError);
}

TEST(IoTest, FormatAndParseDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  double v = 0.0;
  EXPECT_TRUE(parse_double("0.30000000000000004", v));
  EXPECT_EQ(v, 0.1 + 0.2);
  EXPECT_FALSE(parse_double("1e", v));
  EXPECT_FALSE(parse_double("", v));
  EXPECT_FALSE(parse_double("1 ", v));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    ASSERT_TRUE(parse_double(format_double(x), v));
    EXPECT_EQ(v, x);
  }
}

}  // namespace
}  // namespace lightstack
