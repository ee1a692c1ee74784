// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Dataset manifest: objects, their region stacks, and the line-delimited
// JSON file format.
//
// File layout, one JSON object per line, keys in exactly this order:
//
//   {"record_kind":"manifest","schema_version":1,"generator":"...",
//    "seed":7,"image_width":640.0,"image_height":480.0}
//   {"record_kind":"object","object_id":"obj-00000","region_count":2}
//   {"record_kind":"image","object_id":"obj-00000","region_id":"reg-00000",
//    "modality":"C","exposure":"low","uri":"...","visible":true,
//    "annotations":[["d0",10.0,12.0,40.0,33.5,true,true]]}
//
// Each object header is followed by region_count * 12 image records; the 12
// records of a region are contiguous. An annotation tuple is
// (defect_id, x_min, y_min, x_max, y_max, source, visible): `source` marks
// the image the annotator drew on (exactly one per defect and region) and
// `visible` is the per-condition visibility of that copy. "seed" may be null
// and image sizes may be 0 when unknown.

#ifndef LIGHTSTACK_MANIFEST_HPP_
#define LIGHTSTACK_MANIFEST_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lightstack/core.hpp"

namespace lightstack {

inline constexpr int kManifestSchemaVersion = 1;

struct ManifestMetadata {
  int schema_version = kManifestSchemaVersion;
  std::string generator = "external";
  std::optional<std::uint64_t> seed;
  double image_width = 0.0;
  double image_height = 0.0;

  friend bool operator==(const ManifestMetadata&,
                         const ManifestMetadata&) = default;
};

struct ObjectEntry {
  std::string object_id;
  std::vector<RegionStack> regions;

  friend bool operator==(const ObjectEntry&, const ObjectEntry&) = default;
};

// Position of one image inside a manifest. Stays valid across copies that
// keep the object/region layout (e.g. after attaching detections).
struct ImageRef {
  std::size_t object_index = 0;
  std::size_t region_index = 0;
  std::size_t condition = 0;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
  friend auto operator<=>(const ImageRef&, const ImageRef&) = default;
};

struct RegionRef {
  std::size_t object_index = 0;
  std::size_t region_index = 0;

  friend bool operator==(const RegionRef&, const RegionRef&) = default;
  friend auto operator<=>(const RegionRef&, const RegionRef&) = default;
};

struct DatasetManifest {
  ManifestMetadata metadata;
  std::vector<ObjectEntry> objects;

  std::size_t region_count() const;
  std::size_t image_count() const { return region_count() * kConditionCount; }

  // Regions in manifest order.
  std::vector<RegionRef> region_refs() const;

  const RegionStack& region(const RegionRef& r) const {
    return objects[r.object_index].regions[r.region_index];
  }
  const RegionStack& region(const ImageRef& r) const {
    return objects[r.object_index].regions[r.region_index];
  }
  const ImageRecord& image(const ImageRef& r) const {
    return region(r).images()[r.condition];
  }

  // Throws ValidationError on duplicate object or region ids, or a region
  // whose object_id disagrees with its owning entry.
  void validate() const;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

// image_id -> position, for every image of the manifest.
std::map<std::string, ImageRef> index_images(const DatasetManifest& manifest);

// `source` names the stream in error messages. Throws ParseError for
// malformed lines (with line number and field) and ValidationError for
// invariant violations such as a duplicate (region, condition).
DatasetManifest load_manifest(std::istream& in,
                              const std::string& source = "manifest");
void save_manifest(const DatasetManifest& manifest, std::ostream& out);

}  // namespace lightstack

#endif  // LIGHTSTACK_MANIFEST_HPP_
