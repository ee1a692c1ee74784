// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Detections file: the import path for external detector output.
//
//   image_id,x_min,y_min,x_max,y_max,confidence
//   reg-00000/C/low,10.5,20,48.25,61,0.91
//   reg-00000/C/medium,,,,,
//
// One detection per line. A line whose five numeric fields are all empty
// marks an image that was processed and produced no detections, so "no
// detections" and "not processed" stay distinguishable. Lines starting with
// '#' are comments.

#ifndef LIGHTSTACK_DETECTIONS_IO_HPP_
#define LIGHTSTACK_DETECTIONS_IO_HPP_

#include <iosfwd>
#include <map>
#include <string>

#include "lightstack/core.hpp"
#include "lightstack/manifest.hpp"

namespace lightstack {

// image_id -> detections in file order.
using DetectionTable = std::map<std::string, DetectionSet>;

DetectionTable load_detections(std::istream& in,
                               const std::string& source = "detections");
// Images in image_id order; empty sets are written as marker lines.
void save_detections(const DetectionTable& table, std::ostream& out);

// Copy of `manifest` with detections attached to every image listed in
// `table`. Unknown image ids are a ValidationError. Images absent from the
// table keep whatever they had.
DatasetManifest attach_detections(const DatasetManifest& manifest,
                                  const DetectionTable& table);

// Every image that carries detections.
DetectionTable extract_detections(const DatasetManifest& manifest);

}  // namespace lightstack

#endif  // LIGHTSTACK_DETECTIONS_IO_HPP_
