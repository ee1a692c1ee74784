// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/sim_config.hpp"

#include <set>

#include "json.hpp"
#include "lightstack/error.hpp"

namespace lightstack {

using Json = nlohmann::ordered_json;

SimulationConfig simulation_preset(std::string_view name) {
  SimulationConfig cfg;
  if (name == "default") return cfg;

  auto all_visible = [](SceneConfig& scene) {
    for (DefectProfile& p : scene.profiles) p.modality_visibility.fill(1.0);
    scene.exposure_multipliers = {1.0, 1.0, 1.0};
    scene.invisible_rate = 0.0;
  };
  if (name == "all_visible") {
    all_visible(cfg.scene);
    return cfg;
  }
  if (name == "noiseless") {
    all_visible(cfg.scene);
    cfg.detector.detect_probability.fill(1.0);
    cfg.detector.jitter_stddev = 0.0;
    cfg.detector.true_confidence = {2.0, 2.0, 0.95, 0.95};
    cfg.detector.false_positive_rate = 0.0;
    return cfg;
  }
  if (name == "complementary") {
    cfg.scene.visibility_model = VisibilityModel::kComplementary;
    cfg.scene.invisible_rate = 0.0;
    cfg.detector.jitter_stddev = 1.5;
    cfg.detector.false_positive_rate = 0.5;
    return cfg;
  }
  throw ValidationError("unknown simulation preset '" + std::string(name) +
                        "'");
}

std::vector<std::string> simulation_preset_names() {
  return {"default", "all_visible", "noiseless", "complementary"};
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& source) : source_(source) {}

  [[noreturn]] void fail(const std::string& path,
                         const std::string& what) const {
    throw ParseError(source_, 0, path, what);
  }

  void only_keys(const Json& j, const std::string& path,
                 std::initializer_list<std::string_view> keys) const {
    if (!j.is_object()) fail(path, "expected an object");
    const std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (!allowed.contains(key)) fail(path + "." + key, "unknown key");
    }
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  std::size_t count(const Json& j, const std::string& path) const {
    if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
  }

  bool boolean(const Json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const Json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  std::pair<double, double> pair(const Json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [a, b]");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  }

  void confidence(const Json& j, const std::string& path,
                  ConfidenceModel& out) const {
    only_keys(j, path, {"alpha", "beta", "low", "high"});
    if (j.contains("alpha")) out.alpha = number(j["alpha"], path + ".alpha");
    if (j.contains("beta")) out.beta = number(j["beta"], path + ".beta");
    if (j.contains("low")) out.low = number(j["low"], path + ".low");
    if (j.contains("high")) out.high = number(j["high"], path + ".high");
  }

  template <class F>
  auto enum_value(const Json& j, const std::string& path, F parse) const {
    try {
      return parse(string(j, path));
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
  }

 private:
  const std::string& source_;
};

void read_scene(const Reader& rd, const Json& j, SceneConfig& s) {
  rd.only_keys(j, "scene",
               {"region_count", "regions_per_object", "image_size",
                "defects_per_region", "defect_size", "exposure_multipliers",
                "invisible_rate", "visibility_model", "annotator_prior",
                "propagate", "profiles"});
  if (j.contains("region_count")) {
    s.region_count = rd.count(j["region_count"], "scene.region_count");
  }
  if (j.contains("regions_per_object")) {
    const Json& r = j["regions_per_object"];
    if (!r.is_array() || r.size() != 2) {
      rd.fail("scene.regions_per_object", "expected [min, max]");
    }
    s.min_regions_per_object = rd.count(r[0], "scene.regions_per_object[0]");
    s.max_regions_per_object = rd.count(r[1], "scene.regions_per_object[1]");
  }
  if (j.contains("image_size")) {
    std::tie(s.image_width, s.image_height) =
        rd.pair(j["image_size"], "scene.image_size");
  }
  if (j.contains("defects_per_region")) {
    const Json& d = j["defects_per_region"];
    if (!d.is_array()) rd.fail("scene.defects_per_region", "expected an array");
    s.defects_per_region.clear();
    for (const Json& w : d) {
      s.defects_per_region.push_back(rd.number(w, "scene.defects_per_region"));
    }
  }
  if (j.contains("defect_size")) {
    std::tie(s.min_defect_size, s.max_defect_size) =
        rd.pair(j["defect_size"], "scene.defect_size");
  }
  if (j.contains("exposure_multipliers")) {
    const Json& m = j["exposure_multipliers"];
    rd.only_keys(m, "scene.exposure_multipliers", {"low", "medium", "high"});
    for (Exposure e : kAllExposures) {
      const std::string key(to_string(e));
      if (m.contains(key)) {
        s.exposure_multipliers[static_cast<std::size_t>(e)] =
            rd.number(m[key], "scene.exposure_multipliers." + key);
      }
    }
  }
  if (j.contains("invisible_rate")) {
    s.invisible_rate = rd.number(j["invisible_rate"], "scene.invisible_rate");
  }
  if (j.contains("visibility_model")) {
    s.visibility_model = rd.enum_value(j["visibility_model"],
                                       "scene.visibility_model",
                                       parse_visibility_model);
  }
  if (j.contains("annotator_prior")) {
    s.annotator_prior = rd.enum_value(j["annotator_prior"],
                                      "scene.annotator_prior",
                                      parse_annotator_prior);
  }
  if (j.contains("propagate")) {
    s.propagate = rd.boolean(j["propagate"], "scene.propagate");
  }
  if (j.contains("profiles")) {
    const Json& ps = j["profiles"];
    if (!ps.is_array()) rd.fail("scene.profiles", "expected an array");
    s.profiles.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string path = "scene.profiles[" + std::to_string(i) + "]";
      const Json& p = ps[i];
      rd.only_keys(p, path, {"kind", "weight", "visibility"});
      DefectProfile prof;
      prof.kind = p.contains("kind") ? rd.string(p["kind"], path + ".kind")
                                     : "defect";
      if (p.contains("weight")) prof.weight = rd.number(p["weight"], path + ".weight");
      if (!p.contains("visibility")) rd.fail(path + ".visibility", "missing");
      const Json& v = p["visibility"];
      rd.only_keys(v, path + ".visibility", {"C", "UD", "LR", "UDLR"});
      for (Modality m : kAllModalities) {
        const std::string key(to_string(m));
        if (!v.contains(key)) rd.fail(path + ".visibility." + key, "missing");
        prof.modality_visibility[static_cast<std::size_t>(m)] =
            rd.number(v[key], path + ".visibility." + key);
      }
      s.profiles.push_back(std::move(prof));
    }
  }
}

void read_detector(const Reader& rd, const Json& j, DetectorNoiseModel& d) {
  rd.only_keys(j, "detector",
               {"detect_probability", "jitter_stddev", "true_confidence",
                "false_positive_rate", "false_confidence",
                "false_positive_size"});
  if (j.contains("detect_probability")) {
    const Json& p = j["detect_probability"];
    if (p.is_number()) {
      d.detect_probability.fill(rd.number(p, "detector.detect_probability"));
    } else if (p.is_array() && p.size() == kConditionCount) {
      for (std::size_t c = 0; c < kConditionCount; ++c) {
        d.detect_probability[c] = rd.number(p[c], "detector.detect_probability");
      }
    } else {
      rd.fail("detector.detect_probability",
              "expected a number or 12 numbers in condition order");
    }
  }
  if (j.contains("jitter_stddev")) {
    d.jitter_stddev = rd.number(j["jitter_stddev"], "detector.jitter_stddev");
  }
  if (j.contains("true_confidence")) {
    rd.confidence(j["true_confidence"], "detector.true_confidence",
                  d.true_confidence);
  }
  if (j.contains("false_positive_rate")) {
    d.false_positive_rate =
        rd.number(j["false_positive_rate"], "detector.false_positive_rate");
  }
  if (j.contains("false_confidence")) {
    rd.confidence(j["false_confidence"], "detector.false_confidence",
                  d.false_confidence);
  }
  if (j.contains("false_positive_size")) {
    std::tie(d.min_false_positive_size, d.max_false_positive_size) =
        rd.pair(j["false_positive_size"], "detector.false_positive_size");
  }
}

Json confidence_json(const ConfidenceModel& m) {
  Json j;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["low"] = m.low;
  j["high"] = m.high;
  return j;
}

}  // namespace

SimulationConfig parse_simulation_config(std::string_view json_text,
                                         const SimulationConfig& base,
                                         const std::string& source) {
  Reader rd(source);
  Json j;
  try {
    j = Json::parse(json_text.begin(), json_text.end(), nullptr, true,
                    /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    rd.fail("", std::string("invalid JSON: ") + e.what());
  }
  rd.only_keys(j, "", {"scene", "detector"});
  SimulationConfig cfg = base;
  if (j.contains("scene")) read_scene(rd, j["scene"], cfg.scene);
  if (j.contains("detector")) read_detector(rd, j["detector"], cfg.detector);
  validate(cfg.scene);
  validate(cfg.detector);
  return cfg;
}

std::string dump_simulation_config(const SimulationConfig& config) {
  const SceneConfig& s = config.scene;
  Json scene;
  scene["region_count"] = s.region_count;
  scene["regions_per_object"] = {s.min_regions_per_object,
                                 s.max_regions_per_object};
  scene["image_size"] = {s.image_width, s.image_height};
  scene["defects_per_region"] = s.defects_per_region;
  scene["defect_size"] = {s.min_defect_size, s.max_defect_size};
  Json mult;
  for (Exposure e : kAllExposures) {
    mult[std::string(to_string(e))] =
        s.exposure_multipliers[static_cast<std::size_t>(e)];
  }
  scene["exposure_multipliers"] = mult;
  scene["invisible_rate"] = s.invisible_rate;
  scene["visibility_model"] = to_string(s.visibility_model);
  scene["annotator_prior"] = to_string(s.annotator_prior);
  scene["propagate"] = s.propagate;
  Json profiles = Json::array();
  for (const DefectProfile& p : s.profiles) {
    Json pj;
    pj["kind"] = p.kind;
    pj["weight"] = p.weight;
    Json vis;
    for (Modality m : kAllModalities) {
      vis[std::string(to_string(m))] =
          p.modality_visibility[static_cast<std::size_t>(m)];
    }
    pj["visibility"] = vis;
    profiles.push_back(pj);
  }
  scene["profiles"] = profiles;

  const DetectorNoiseModel& d = config.detector;
  Json det;
  det["detect_probability"] = d.detect_probability;
  det["jitter_stddev"] = d.jitter_stddev;
  det["true_confidence"] = confidence_json(d.true_confidence);
  det["false_positive_rate"] = d.false_positive_rate;
  det["false_confidence"] = confidence_json(d.false_confidence);
  det["false_positive_size"] = {d.min_false_positive_size,
                                d.max_false_positive_size};

  Json root;
  root["scene"] = scene;
  root["detector"] = det;
  return root.dump(2) + "\n";
}

}  // namespace lightstack
