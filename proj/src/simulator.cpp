// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "lightstack/error.hpp"
#include "lightstack/parallel.hpp"
#include "lightstack/random.hpp"

namespace lightstack {

std::array<double, kConditionCount> DefectProfile::condition_visibility(
    const std::array<double, kExposureCount>& exposure_multipliers) const {
  std::array<double, kConditionCount> out{};
  for (LightingCondition c : all_conditions()) {
    const double p =
        modality_visibility[static_cast<std::size_t>(c.modality)] *
        exposure_multipliers[static_cast<std::size_t>(c.exposure)];
    out[condition_index(c)] = std::clamp(p, 0.0, 1.0);
  }
  return out;
}

std::vector<DefectProfile> default_defect_profiles() {
  // Columns: C, UD, LR, UDLR. Dark-field favours surface irregularities,
  // front light favours colour/flat defects.
  return {
      {"scratch", 0.40, {0.35, 0.80, 0.80, 0.90}},
      {"dot", 0.30, {0.60, 0.70, 0.70, 0.85}},
      {"missing-decoration", 0.20, {0.90, 0.50, 0.50, 0.60}},
      {"break", 0.10, {0.50, 0.75, 0.75, 0.90}},
  };
}

std::string_view to_string(VisibilityModel v) {
  return v == VisibilityModel::kIndependent ? "independent" : "complementary";
}

VisibilityModel parse_visibility_model(std::string_view name) {
  if (name == "independent") return VisibilityModel::kIndependent;
  if (name == "complementary") return VisibilityModel::kComplementary;
  throw ValidationError("unknown visibility model '" + std::string(name) + "'");
}

std::string_view to_string(AnnotatorPrior p) {
  return p == AnnotatorPrior::kUniform ? "uniform" : "reference_profile";
}

AnnotatorPrior parse_annotator_prior(std::string_view name) {
  if (name == "uniform") return AnnotatorPrior::kUniform;
  if (name == "reference_profile") return AnnotatorPrior::kReferenceProfile;
  throw ValidationError("unknown annotator prior '" + std::string(name) + "'");
}

const std::array<double, kConditionCount>& reference_annotation_profile() {
  // C low/med/high, UD ..., LR ..., UDLR ...
  static const std::array<double, kConditionCount> profile = {
      0.05, 0.04, 0.03, 0.08, 0.10, 0.07, 0.07, 0.09, 0.06, 0.12, 0.16, 0.13};
  return profile;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void validate_confidence(const ConfidenceModel& m, const std::string& name) {
  require(m.alpha > 0.0 && m.beta > 0.0,
          name + ": alpha and beta must be positive");
  require(is_probability(m.low) && is_probability(m.high) && m.low <= m.high,
          name + ": need 0 <= low <= high <= 1");
}

double sample_confidence(const ConfidenceModel& m, Rng& rng) {
  std::gamma_distribution<double> ga(m.alpha, 1.0);
  std::gamma_distribution<double> gb(m.beta, 1.0);
  const double a = ga(rng);
  const double b = gb(rng);
  const double x = (a + b) > 0.0 ? a / (a + b) : 0.5;
  return std::clamp(m.low + (m.high - m.low) * x, m.low, m.high);
}

std::string padded(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix, i);
  return buf;
}

// Realized visibility of one defect over the 12 conditions.
using VisibilityMask = std::array<bool, kConditionCount>;

VisibilityMask draw_visibility(const SceneConfig& config,
                               const std::array<double, kConditionCount>& p,
                               Rng& rng) {
  VisibilityMask mask{};
  if (config.visibility_model == VisibilityModel::kComplementary) {
    std::uniform_int_distribution<int> pick(0, kModalityCount - 1);
    const auto m = static_cast<Modality>(pick(rng));
    for (Exposure e : kAllExposures) mask[condition_index({m, e})] = true;
    return mask;
  }
  if (std::all_of(p.begin(), p.end(), [](double v) { return v <= 0.0; })) {
    return mask;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kMaxDraws = 256;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    bool any = false;
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      mask[c] = u(rng) < p[c];
      any = any || mask[c];
    }
    if (any) return mask;
  }
  // Vanishingly rare for sane profiles: fall back to the likeliest condition.
  mask.fill(false);
  mask[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) -
                                p.begin())] = true;
  return mask;
}

RegionStack generate_region(const SceneConfig& config, std::uint64_t seed,
                            std::size_t region_index,
                            const std::string& object_id) {
  Rng rng = make_rng(derive_seed(seed, {hash_label("region"), region_index}));
  const std::string region_id = padded("reg", region_index);

  std::bernoulli_distribution invisible(config.invisible_rate);
  const bool region_hidden = invisible(rng);
  std::discrete_distribution<std::size_t> defect_count(
      config.defects_per_region.begin(), config.defects_per_region.end());
  std::vector<double> weights;
  for (const DefectProfile& p : config.profiles) weights.push_back(p.weight);
  std::discrete_distribution<std::size_t> pick_profile(weights.begin(),
                                                       weights.end());
  std::uniform_real_distribution<double> size(config.min_defect_size,
                                              config.max_defect_size);

  struct Defect {
    BoundingBox box;
    VisibilityMask visible;
    std::size_t source;
  };
  std::vector<Defect> defects;
  const std::size_t n = defect_count(rng);
  for (std::size_t j = 0; j < n; ++j) {
    const DefectProfile& profile = config.profiles[pick_profile(rng)];
    const double w = size(rng);
    const double h = size(rng);
    std::uniform_real_distribution<double> px(0.0, config.image_width - w);
    std::uniform_real_distribution<double> py(0.0, config.image_height - h);
    const double x0 = px(rng);
    const double y0 = py(rng);
    BoundingBox box(x0, y0, x0 + w, y0 + h);

    VisibilityMask mask{};
    if (!region_hidden) {
      mask = draw_visibility(
          config, profile.condition_visibility(config.exposure_multipliers),
          rng);
    }
    std::array<double, kConditionCount> pref{};
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      if (!mask[c]) continue;
      pref[c] = config.annotator_prior == AnnotatorPrior::kReferenceProfile
                    ? reference_annotation_profile()[c]
                    : 1.0;
    }
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
      continue;  // Nobody can see it, so nobody annotates it.
    }
    std::discrete_distribution<std::size_t> pick_source(pref.begin(),
                                                        pref.end());
    defects.push_back(Defect{box, mask, pick_source(rng)});
  }

  const bool visible = !defects.empty();
  std::vector<ImageRecord> images;
  images.reserve(kConditionCount);
  for (LightingCondition c : all_conditions()) {
    ImageRecord img;
    img.region_id = region_id;
    img.condition = c;
    img.image_id = make_image_id(region_id, c);
    img.uri = "sim://" + img.image_id;
    const std::size_t ci = condition_index(c);
    for (std::size_t j = 0; j < defects.size(); ++j) {
      const Defect& d = defects[j];
      if (!config.propagate && d.source != ci) continue;
      img.annotations.push_back(Annotation{d.box, "d" + std::to_string(j),
                                           condition_from_index(d.source),
                                           d.visible[ci]});
    }
    images.push_back(std::move(img));
  }
  return RegionStack(region_id, object_id, visible, std::move(images));
}

}  // namespace

void validate(const SceneConfig& config) {
  require(config.region_count >= 1, "scene: region_count must be >= 1");
  require(config.min_regions_per_object >= 1 &&
              config.min_regions_per_object <= config.max_regions_per_object,
          "scene: need 1 <= min_regions_per_object <= max_regions_per_object");
  require(std::isfinite(config.image_width) && config.image_width > 0.0 &&
              std::isfinite(config.image_height) && config.image_height > 0.0,
          "scene: image size must be positive");
  require(!config.defects_per_region.empty(),
          "scene: defects_per_region needs at least one weight");
  double total = 0.0;
  for (double w : config.defects_per_region) {
    require(w >= 0.0 && std::isfinite(w),
            "scene: defects_per_region weights must be non-negative");
    total += w;
  }
  require(total > 0.0, "scene: defects_per_region weights sum to zero");
  require(config.min_defect_size > 0.0 &&
              config.min_defect_size <= config.max_defect_size,
          "scene: need 0 < min_defect_size <= max_defect_size");
  require(config.max_defect_size < config.image_width &&
              config.max_defect_size < config.image_height,
          "scene: defect size range does not fit inside the image");
  require(!config.profiles.empty(), "scene: at least one defect profile");
  double weight_total = 0.0;
  for (const DefectProfile& p : config.profiles) {
    require(p.weight >= 0.0, "scene: profile " + p.kind + " has negative weight");
    weight_total += p.weight;
    for (double v : p.modality_visibility) {
      require(is_probability(v),
              "scene: profile " + p.kind + " visibility outside [0, 1]");
    }
  }
  require(weight_total > 0.0, "scene: profile weights sum to zero");
  for (double m : config.exposure_multipliers) {
    require(m >= 0.0 && std::isfinite(m),
            "scene: exposure multipliers must be non-negative");
  }
  require(is_probability(config.invisible_rate),
          "scene: invisible_rate outside [0, 1]");
}

void validate(const DetectorNoiseModel& noise) {
  for (double p : noise.detect_probability) {
    require(is_probability(p), "detector: detect_probability outside [0, 1]");
  }
  require(noise.jitter_stddev >= 0.0 && std::isfinite(noise.jitter_stddev),
          "detector: jitter_stddev must be >= 0");
  require(noise.false_positive_rate >= 0.0 &&
              std::isfinite(noise.false_positive_rate),
          "detector: false_positive_rate must be >= 0");
  validate_confidence(noise.true_confidence, "detector: true_confidence");
  validate_confidence(noise.false_confidence, "detector: false_confidence");
  require(noise.min_false_positive_size > 0.0 &&
              noise.min_false_positive_size <= noise.max_false_positive_size,
          "detector: need 0 < min_false_positive_size <= "
          "max_false_positive_size");
}

DatasetManifest generate_dataset(const SceneConfig& config, std::uint64_t seed,
                                 unsigned threads) {
  validate(config);

  // Object layout comes from its own stream so regions can be built in any
  // order afterwards.
  std::vector<std::size_t> object_of_region;
  object_of_region.reserve(config.region_count);
  {
    Rng rng = make_rng(derive_seed(seed, {hash_label("objects")}));
    std::uniform_int_distribution<std::size_t> per_object(
        config.min_regions_per_object, config.max_regions_per_object);
    std::size_t object = 0;
    while (object_of_region.size() < config.region_count) {
      const std::size_t k = std::min(per_object(rng),
                                     config.region_count - object_of_region.size());
      object_of_region.insert(object_of_region.end(), k, object);
      ++object;
    }
  }

  std::vector<std::optional<RegionStack>> regions(config.region_count);
  parallel_for(config.region_count, threads, [&](std::size_t i) {
    regions[i].emplace(generate_region(config, seed, i,
                                       padded("obj", object_of_region[i])));
  });

  DatasetManifest manifest;
  manifest.metadata.generator = "lightstack-sim";
  manifest.metadata.seed = seed;
  manifest.metadata.image_width = config.image_width;
  manifest.metadata.image_height = config.image_height;
  for (std::size_t i = 0; i < config.region_count; ++i) {
    if (manifest.objects.empty() ||
        manifest.objects.back().object_id != regions[i]->object_id()) {
      manifest.objects.push_back(ObjectEntry{regions[i]->object_id(), {}});
    }
    manifest.objects.back().regions.push_back(std::move(*regions[i]));
  }
  return manifest;
}

namespace {

// Clamps to the image when its size is known; nullopt if nothing is left.
std::optional<BoundingBox> clamp_box(double x0, double y0, double x1,
                                     double y1, double width, double height) {
  if (width > 0.0) {
    x0 = std::clamp(x0, 0.0, width);
    x1 = std::clamp(x1, 0.0, width);
  }
  if (height > 0.0) {
    y0 = std::clamp(y0, 0.0, height);
    y1 = std::clamp(y1, 0.0, height);
  }
  if (!(x1 > x0) || !(y1 > y0)) return std::nullopt;
  return BoundingBox(x0, y0, x1, y1);
}

DetectionSet detect_image(const ImageRecord& img, bool region_visible,
                          const DetectorNoiseModel& noise,
                          const ManifestMetadata& meta, std::uint64_t seed) {
  Rng rng = make_rng(
      derive_seed(seed, {hash_label("detect"), hash_label(img.image_id)}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double p = noise.detect_probability[condition_index(img.condition)];

  DetectionSet out;
  for (const Annotation& a : img.annotations) {
    if (!region_visible || !a.visible) continue;
    if (!(u(rng) < p)) continue;
    double c[4] = {a.box.x_min(), a.box.y_min(), a.box.x_max(), a.box.y_max()};
    for (double& v : c) v += noise.jitter_stddev * jitter(rng);
    const double confidence = sample_confidence(noise.true_confidence, rng);
    // Jitter large enough to invert the box falls back to the true box.
    const auto jittered = clamp_box(c[0], c[1], c[2], c[3], meta.image_width,
                                    meta.image_height);
    out.add(Detection(jittered.value_or(a.box), confidence));
  }

  int n_fp = 0;
  if (noise.false_positive_rate > 0.0) {
    std::poisson_distribution<int> clutter(noise.false_positive_rate);
    n_fp = clutter(rng);
  }
  const double width = meta.image_width > 0.0 ? meta.image_width : 640.0;
  const double height = meta.image_height > 0.0 ? meta.image_height : 480.0;
  std::uniform_real_distribution<double> size(noise.min_false_positive_size,
                                              noise.max_false_positive_size);
  for (int k = 0; k < n_fp; ++k) {
    const double w = std::min(size(rng), width);
    const double h = std::min(size(rng), height);
    const double x0 = u(rng) * (width - w);
    const double y0 = u(rng) * (height - h);
    const double confidence = sample_confidence(noise.false_confidence, rng);
    const auto box =
        clamp_box(x0, y0, x0 + w, y0 + h, meta.image_width, meta.image_height);
    if (box) out.add(Detection(*box, confidence));
  }
  return out;
}

}  // namespace

DatasetManifest simulate_detections(const DatasetManifest& manifest,
                                    const DetectorNoiseModel& noise,
                                    std::uint64_t seed, unsigned threads) {
  validate(noise);
  const std::vector<RegionRef> refs = manifest.region_refs();
  std::vector<std::optional<RegionStack>> done(refs.size());
  parallel_for(refs.size(), threads, [&](std::size_t i) {
    const RegionStack& region = manifest.region(refs[i]);
    std::array<std::optional<DetectionSet>, kConditionCount> dets;
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      dets[c] = detect_image(region.images()[c], region.visible(), noise,
                             manifest.metadata, seed);
    }
    done[i].emplace(region.with_detections(dets));
  });

  DatasetManifest out;
  out.metadata = manifest.metadata;
  std::size_t i = 0;
  for (const ObjectEntry& obj : manifest.objects) {
    ObjectEntry copy{obj.object_id, {}};
    copy.regions.reserve(obj.regions.size());
    for (std::size_t r = 0; r < obj.regions.size(); ++r, ++i) {
      copy.regions.push_back(std::move(*done[i]));
    }
    out.objects.push_back(std::move(copy));
  }
  return out;
}

}  // namespace lightstack
