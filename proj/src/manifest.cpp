// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/manifest.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>

#include "json.hpp"
#include "lightstack/error.hpp"

namespace lightstack {

using Json = nlohmann::ordered_json;

std::size_t DatasetManifest::region_count() const {
  std::size_t n = 0;
  for (const ObjectEntry& o : objects) n += o.regions.size();
  return n;
}

std::vector<RegionRef> DatasetManifest::region_refs() const {
  std::vector<RegionRef> out;
  out.reserve(region_count());
  for (std::size_t o = 0; o < objects.size(); ++o) {
    for (std::size_t r = 0; r < objects[o].regions.size(); ++r) {
      out.push_back(RegionRef{o, r});
    }
  }
  return out;
}

void DatasetManifest::validate() const {
  std::set<std::string> object_ids;
  std::set<std::string> region_ids;
  for (const ObjectEntry& o : objects) {
    if (o.object_id.empty()) throw ValidationError("empty object id");
    if (!object_ids.insert(o.object_id).second) {
      throw ValidationError("duplicate object id " + o.object_id);
    }
    for (const RegionStack& r : o.regions) {
      if (r.object_id() != o.object_id) {
        throw ValidationError("region " + r.region_id() + " claims object " +
                              r.object_id() + " but is listed under " +
                              o.object_id);
      }
      if (!region_ids.insert(r.region_id()).second) {
        throw ValidationError("duplicate region id " + r.region_id());
      }
    }
  }
}

std::map<std::string, ImageRef> index_images(const DatasetManifest& manifest) {
  std::map<std::string, ImageRef> out;
  for (const RegionRef& rr : manifest.region_refs()) {
    const RegionStack& region = manifest.region(rr);
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      out.emplace(region.images()[c].image_id,
                  ImageRef{rr.object_index, rr.region_index, c});
    }
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 6> kHeaderKeys = {
    "record_kind", "schema_version", "generator",
    "seed",        "image_width",    "image_height"};
constexpr std::array<std::string_view, 3> kObjectKeys = {
    "record_kind", "object_id", "region_count"};
constexpr std::array<std::string_view, 8> kImageKeys = {
    "record_kind", "object_id", "region_id", "modality",   "exposure",
    "uri",         "visible",   "annotations"};

// Reads one manifest line and checks its keys against the fixed layout.
class LineReader {
 public:
  LineReader(const std::string& source, std::size_t line)
      : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& field,
                         const std::string& what) const {
    throw ParseError(source_, line_, field, what);
  }

  Json parse(const std::string& text) const {
    try {
      Json j = Json::parse(text);
      if (!j.is_object()) fail("", "record is not a JSON object");
      return j;
    } catch (const Json::parse_error& e) {
      fail("", std::string("invalid JSON: ") + e.what());
    }
  }

  template <std::size_t N>
  void expect_keys(const Json& j,
                   const std::array<std::string_view, N>& keys) const {
    std::size_t expected = 0;
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (expected >= N) fail(key, "unknown field");
      if (key != keys[expected]) {
        bool known = false;
        for (std::string_view k : keys) known = known || (k == key);
        if (known && !j.contains(keys[expected])) {
          fail(std::string(keys[expected]), "missing field");
        }
        fail(key, known ? "field out of order (expected '" +
                              std::string(keys[expected]) + "')"
                        : "unknown field");
      }
      ++expected;
    }
    if (expected < N) {
      fail(std::string(keys[expected]), "missing field");
    }
  }

  std::string string_field(const Json& j, const char* key) const {
    const Json& v = j.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  double number_field(const Json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  bool bool_field(const Json& v, const std::string& key) const {
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::uint64_t count_field(const Json& v, const std::string& key) const {
    if (!v.is_number_unsigned()) {
      fail(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::size_t line() const { return line_; }

 private:
  const std::string& source_;
  std::size_t line_;
};

struct PendingAnnotation {
  std::string defect_id;
  double coords[4];
  bool source;
  bool visible;
  std::size_t line;
};

struct PendingImage {
  ImageRecord record;
  std::vector<PendingAnnotation> annotations;
};

// Collects the image records of one region until it can be validated.
struct PendingRegion {
  std::string region_id;
  std::string object_id;
  bool visible = false;
  std::size_t first_line = 0;
  std::array<bool, kConditionCount> seen{};
  std::vector<PendingImage> images;
};

RegionStack finish_region(PendingRegion& pending, const std::string& source) {
  if (pending.images.size() != kConditionCount) {
    throw ValidationError(source + ":" + std::to_string(pending.first_line) +
                          ": region " + pending.region_id + " has " +
                          std::to_string(pending.images.size()) +
                          " image records, expected 12");
  }
  // Resolve every defect's source condition from its flagged copy.
  std::map<std::string, std::size_t> source_of;
  for (const PendingImage& img : pending.images) {
    for (const PendingAnnotation& a : img.annotations) {
      if (!a.source) continue;
      if (!source_of.emplace(a.defect_id, condition_index(img.record.condition))
               .second) {
        throw ValidationError(source + ":" + std::to_string(a.line) +
                              ": defect " + a.defect_id + " in region " +
                              pending.region_id +
                              " flagged as source on two images");
      }
    }
  }
  std::vector<ImageRecord> records;
  records.reserve(kConditionCount);
  for (PendingImage& img : pending.images) {
    for (const PendingAnnotation& a : img.annotations) {
      auto it = source_of.find(a.defect_id);
      if (it == source_of.end()) {
        throw ValidationError(source + ":" + std::to_string(a.line) +
                              ": defect " + a.defect_id + " in region " +
                              pending.region_id +
                              " has no source-flagged annotation");
      }
      try {
        img.record.annotations.push_back(Annotation{
            BoundingBox(a.coords[0], a.coords[1], a.coords[2], a.coords[3]),
            a.defect_id, condition_from_index(it->second), a.visible});
      } catch (const ValidationError& e) {
        throw ParseError(source, a.line, "annotations", e.what());
      }
    }
    records.push_back(std::move(img.record));
  }
  try {
    return RegionStack(pending.region_id, pending.object_id, pending.visible,
                       std::move(records));
  } catch (const ValidationError& e) {
    throw ValidationError(source + ":" + std::to_string(pending.first_line) +
                          ": " + e.what());
  }
}

}  // namespace

DatasetManifest load_manifest(std::istream& in, const std::string& source) {
  DatasetManifest manifest;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t regions_expected = 0;
  std::optional<PendingRegion> pending;

  auto flush_region = [&] {
    if (!pending) return;
    manifest.objects.back().regions.push_back(finish_region(*pending, source));
    pending.reset();
  };
  auto close_object = [&](std::size_t at_line) {
    flush_region();
    if (!manifest.objects.empty() &&
        manifest.objects.back().regions.size() != regions_expected) {
      throw ValidationError(
          source + ":" + std::to_string(at_line) + ": object " +
          manifest.objects.back().object_id + " declares " +
          std::to_string(regions_expected) + " regions but lists " +
          std::to_string(manifest.objects.back().regions.size()));
    }
  };

  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    LineReader rd(source, line_no);
    const Json j = rd.parse(text);
    if (!j.contains("record_kind") || !j.at("record_kind").is_string()) {
      rd.fail("record_kind", "missing or not a string");
    }
    const std::string kind = j.at("record_kind").get<std::string>();

    if (!have_header) {
      if (kind != "manifest") rd.fail("record_kind", "first record must be 'manifest'");
      rd.expect_keys(j, kHeaderKeys);
      const std::uint64_t version =
          rd.count_field(j.at("schema_version"), "schema_version");
      if (version != kManifestSchemaVersion) {
        rd.fail("schema_version", "unsupported version " + std::to_string(version));
      }
      manifest.metadata.schema_version = static_cast<int>(version);
      manifest.metadata.generator = rd.string_field(j, "generator");
      if (!j.at("seed").is_null()) {
        manifest.metadata.seed = rd.count_field(j.at("seed"), "seed");
      }
      manifest.metadata.image_width =
          rd.number_field(j.at("image_width"), "image_width");
      manifest.metadata.image_height =
          rd.number_field(j.at("image_height"), "image_height");
      have_header = true;
      continue;
    }

    if (kind == "object") {
      rd.expect_keys(j, kObjectKeys);
      close_object(line_no);
      ObjectEntry entry;
      entry.object_id = rd.string_field(j, "object_id");
      if (entry.object_id.empty()) rd.fail("object_id", "empty");
      regions_expected = rd.count_field(j.at("region_count"), "region_count");
      manifest.objects.push_back(std::move(entry));
      continue;
    }
    if (kind != "image") rd.fail("record_kind", "unknown record kind '" + kind + "'");
    rd.expect_keys(j, kImageKeys);
    if (manifest.objects.empty()) {
      rd.fail("object_id", "image record before any object header");
    }
    const std::string object_id = rd.string_field(j, "object_id");
    if (object_id != manifest.objects.back().object_id) {
      rd.fail("object_id", "does not match the enclosing object header " +
                               manifest.objects.back().object_id);
    }
    const std::string region_id = rd.string_field(j, "region_id");
    if (region_id.empty()) rd.fail("region_id", "empty");
    const bool visible = rd.bool_field(j.at("visible"), "visible");

    LightingCondition cond;
    try {
      cond.modality = parse_modality(rd.string_field(j, "modality"));
    } catch (const ValidationError& e) {
      rd.fail("modality", e.what());
    }
    try {
      cond.exposure = parse_exposure(rd.string_field(j, "exposure"));
    } catch (const ValidationError& e) {
      rd.fail("exposure", e.what());
    }

    if (pending && pending->region_id != region_id) flush_region();
    if (!pending) {
      pending.emplace();
      pending->region_id = region_id;
      pending->object_id = object_id;
      pending->visible = visible;
      pending->first_line = line_no;
    }
    if (pending->visible != visible) {
      rd.fail("visible", "differs from other images of region " + region_id);
    }
    const std::size_t ci = condition_index(cond);
    if (pending->seen[ci]) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": duplicate condition " + condition_label(cond) +
                            " for region " + region_id);
    }
    pending->seen[ci] = true;

    PendingImage img;
    img.record.region_id = region_id;
    img.record.condition = cond;
    img.record.image_id = make_image_id(region_id, cond);
    img.record.uri = rd.string_field(j, "uri");

    const Json& anns = j.at("annotations");
    if (!anns.is_array()) rd.fail("annotations", "expected an array");
    for (const Json& a : anns) {
      if (!a.is_array() || a.size() != 7) {
        rd.fail("annotations",
                "each annotation must be [defect_id, x_min, y_min, x_max, "
                "y_max, source, visible]");
      }
      PendingAnnotation pa{};
      if (!a[0].is_string()) rd.fail("annotations", "defect_id must be a string");
      pa.defect_id = a[0].get<std::string>();
      for (int k = 0; k < 4; ++k) {
        pa.coords[k] = rd.number_field(a[static_cast<std::size_t>(k + 1)],
                                       "annotations");
      }
      pa.source = rd.bool_field(a[5], "annotations");
      pa.visible = rd.bool_field(a[6], "annotations");
      pa.line = line_no;
      img.annotations.push_back(std::move(pa));
    }
    pending->images.push_back(std::move(img));
  }
  if (!have_header) {
    throw ParseError(source, line_no, "", "missing manifest header record");
  }
  close_object(line_no);
  manifest.validate();
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, std::ostream& out) {
  Json header;
  header["record_kind"] = "manifest";
  header["schema_version"] = manifest.metadata.schema_version;
  header["generator"] = manifest.metadata.generator;
  if (manifest.metadata.seed) {
    header["seed"] = *manifest.metadata.seed;
  } else {
    header["seed"] = nullptr;
  }
  header["image_width"] = manifest.metadata.image_width;
  header["image_height"] = manifest.metadata.image_height;
  out << header.dump() << '\n';

  for (const ObjectEntry& obj : manifest.objects) {
    Json oj;
    oj["record_kind"] = "object";
    oj["object_id"] = obj.object_id;
    oj["region_count"] = obj.regions.size();
    out << oj.dump() << '\n';
    for (const RegionStack& region : obj.regions) {
      for (const ImageRecord& img : region.images()) {
        Json ij;
        ij["record_kind"] = "image";
        ij["object_id"] = obj.object_id;
        ij["region_id"] = region.region_id();
        ij["modality"] = to_string(img.condition.modality);
        ij["exposure"] = to_string(img.condition.exposure);
        ij["uri"] = img.uri;
        ij["visible"] = region.visible();
        Json anns = Json::array();
        for (const Annotation& a : img.annotations) {
          anns.push_back(Json::array(
              {a.defect_id, a.box.x_min(), a.box.y_min(), a.box.x_max(),
               a.box.y_max(), a.source_condition == img.condition, a.visible}));
        }
        ij["annotations"] = std::move(anns);
        out << ij.dump() << '\n';
      }
    }
  }
}

}  // namespace lightstack
