// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/detections_io.hpp"

#include <array>
#include <istream>
#include <ostream>

#include "lightstack/error.hpp"
#include "lightstack/io.hpp"

namespace lightstack {

namespace {

constexpr std::string_view kHeader =
    "image_id,x_min,y_min,x_max,y_max,confidence";
constexpr std::array<const char*, 5> kNumericFields = {
    "x_min", "y_min", "x_max", "y_max", "confidence"};

}  // namespace

DetectionTable load_detections(std::istream& in, const std::string& source) {
  DetectionTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != kHeader) {
        throw ParseError(source, line_no, "",
                         "expected header '" + std::string(kHeader) + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (fields.size() != 6) {
      throw ParseError(source, line_no, "",
                       "expected 6 comma-separated fields, got " +
                           std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "image_id", "empty");
    DetectionSet& set = table[std::string(fields[0])];

    bool all_empty = true;
    for (std::size_t k = 1; k < 6; ++k) all_empty = all_empty && fields[k].empty();
    if (all_empty) continue;

    std::array<double, 5> v{};
    for (std::size_t k = 0; k < 5; ++k) {
      if (!parse_double(fields[k + 1], v[k])) {
        throw ParseError(source, line_no, kNumericFields[k],
                         "not a number: '" + std::string(fields[k + 1]) + "'");
      }
    }
    try {
      set.add(Detection(BoundingBox(v[0], v[1], v[2], v[3]), v[4]));
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, "", e.what());
    }
  }
  if (!have_header) {
    throw ParseError(source, line_no, "", "missing header line");
  }
  return table;
}

void save_detections(const DetectionTable& table, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& [image_id, set] : table) {
    if (set.empty()) {
      out << image_id << ",,,,,\n";
      continue;
    }
    for (const Detection& d : set.items()) {
      out << image_id << ',' << format_double(d.box().x_min()) << ','
          << format_double(d.box().y_min()) << ','
          << format_double(d.box().x_max()) << ','
          << format_double(d.box().y_max()) << ','
          << format_double(d.confidence()) << '\n';
    }
  }
}

DatasetManifest attach_detections(const DatasetManifest& manifest,
                                  const DetectionTable& table) {
  const auto index = index_images(manifest);
  for (const auto& [image_id, set] : table) {
    (void)set;
    if (!index.contains(image_id)) {
      throw ValidationError("detections reference unknown image " + image_id);
    }
  }
  DatasetManifest out;
  out.metadata = manifest.metadata;
  out.objects.reserve(manifest.objects.size());
  for (const ObjectEntry& obj : manifest.objects) {
    ObjectEntry copy{obj.object_id, {}};
    copy.regions.reserve(obj.regions.size());
    for (const RegionStack& region : obj.regions) {
      std::array<std::optional<DetectionSet>, kConditionCount> dets;
      for (std::size_t c = 0; c < kConditionCount; ++c) {
        const ImageRecord& img = region.images()[c];
        auto it = table.find(img.image_id);
        dets[c] = it != table.end() ? std::optional<DetectionSet>(it->second)
                                    : img.detections;
      }
      copy.regions.push_back(region.with_detections(dets));
    }
    out.objects.push_back(std::move(copy));
  }
  return out;
}

DetectionTable extract_detections(const DatasetManifest& manifest) {
  DetectionTable table;
  for (const ObjectEntry& obj : manifest.objects) {
    for (const RegionStack& region : obj.regions) {
      for (const ImageRecord& img : region.images()) {
        if (img.detections) table.emplace(img.image_id, *img.detections);
      }
    }
  }
  return table;
}

}  // namespace lightstack
