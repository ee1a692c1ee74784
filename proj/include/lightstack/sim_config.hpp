// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Simulator configuration file. JSON with two optional sections:
//
//   {
//     "scene": {
//       "region_count": 100,
//       "regions_per_object": [1, 4],
//       "image_size": [640, 480],
//       "defects_per_region": [0, 0.75, 0.2, 0.05],
//       "defect_size": [16, 96],
//       "exposure_multipliers": {"low": 0.8, "medium": 1.0, "high": 0.9},
//       "invisible_rate": 0.008,
//       "visibility_model": "independent",     // or "complementary"
//       "annotator_prior": "reference_profile", // or "uniform"
//       "propagate": true,
//       "profiles": [
//         {"kind": "scratch", "weight": 0.4,
//          "visibility": {"C": 0.35, "UD": 0.8, "LR": 0.8, "UDLR": 0.9}}
//       ]
//     },
//     "detector": {
//       "detect_probability": 0.9,            // or 12 values, index order
//       "jitter_stddev": 2.0,
//       "true_confidence":  {"alpha": 5, "beta": 2, "low": 0, "high": 1},
//       "false_positive_rate": 0.5,
//       "false_confidence": {"alpha": 2, "beta": 5, "low": 0, "high": 1},
//       "false_positive_size": [16, 96]
//     }
//   }
//
// Missing keys keep their defaults; unknown keys are rejected.

#ifndef LIGHTSTACK_SIM_CONFIG_HPP_
#define LIGHTSTACK_SIM_CONFIG_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "lightstack/simulator.hpp"

namespace lightstack {

struct SimulationConfig {
  SceneConfig scene;
  DetectorNoiseModel detector;
};

// Named starting points:
//   default        the stock profiles and detector.
//   all_visible    every defect visible everywhere, no hidden regions.
//   noiseless      all_visible scene, detector that reproduces ground truth
//                  exactly with confidence 0.95 and no clutter.
//   complementary  each defect visible under one modality only, plus a
//                  cluttered detector.
SimulationConfig simulation_preset(std::string_view name);
std::vector<std::string> simulation_preset_names();

// Overlays `json_text` on `base`. Throws ParseError for malformed JSON or
// unknown/mistyped keys, ValidationError if the result is invalid.
SimulationConfig parse_simulation_config(
    std::string_view json_text, const SimulationConfig& base = {},
    const std::string& source = "config");

// Full config with every key, pretty-printed.
std::string dump_simulation_config(const SimulationConfig& config);

}  // namespace lightstack

#endif  // LIGHTSTACK_SIM_CONFIG_HPP_
