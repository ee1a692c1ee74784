// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/study.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lightstack/error.hpp"
#include "lightstack/io.hpp"
#include "lightstack/parallel.hpp"
#include "lightstack/random.hpp"

namespace lightstack {

std::string_view to_string(ApMode m) {
  return m == ApMode::kDistinct ? "distinct" : "grid";
}

ApMode parse_ap_mode(std::string_view name) {
  if (name == "distinct") return ApMode::kDistinct;
  if (name == "grid") return ApMode::kGrid;
  throw ValidationError("unknown AP mode '" + std::string(name) +
                        "' (expected distinct or grid)");
}

std::string_view to_string(EvalMode m) {
  return m == EvalMode::kPerImage ? "per_image" : "per_region";
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "per_image") return EvalMode::kPerImage;
  if (name == "per_region") return EvalMode::kPerRegion;
  throw ValidationError("unknown evaluation mode '" + std::string(name) +
                        "' (expected per_image or per_region)");
}

void validate(const StudyConfig& config) {
  if (config.study_id < 1 || config.study_id > 4) {
    throw ValidationError("unknown study id " +
                          std::to_string(config.study_id) +
                          " (expected 1, 2, 3 or 4)");
  }
  if (config.trials < 1) throw ValidationError("trials must be >= 1");
  if (!(config.confidence_cutoff >= 0.0 && config.confidence_cutoff <= 1.0)) {
    throw ValidationError("confidence cutoff must be in [0, 1]");
  }
  if (!(config.iou_threshold > 0.0 && config.iou_threshold <= 1.0)) {
    throw ValidationError("IoU threshold must be in (0, 1]");
  }
  validate(config.fusion);
  if (config.ap_mode == ApMode::kGrid) {
    if (config.ap_grid.empty()) throw ValidationError("AP grid is empty");
    for (std::size_t i = 0; i < config.ap_grid.size(); ++i) {
      const double t = config.ap_grid[i];
      if (!(t >= 0.0 && t <= 1.0) ||
          (i > 0 && !(t > config.ap_grid[i - 1]))) {
        throw ValidationError(
            "AP grid must be strictly ascending within [0, 1]");
      }
    }
  }
}

FixedDetectionSource::FixedDetectionSource(DatasetManifest with_detections)
    : manifest_(std::make_shared<const DatasetManifest>(
          std::move(with_detections))) {}

std::shared_ptr<const DatasetManifest> FixedDetectionSource::detections_for(
    const TrainingSubset&) {
  return manifest_;
}

KeyedDetectionSource::KeyedDetectionSource(
    DatasetManifest base, std::map<std::string, DetectionTable> tables,
    std::optional<DetectionTable> fallback)
    : base_(std::move(base)),
      tables_(std::move(tables)),
      fallback_(std::move(fallback)) {}

std::shared_ptr<const DatasetManifest> KeyedDetectionSource::detections_for(
    const TrainingSubset& subset) {
  const std::string trial_key =
      subset.descriptor + "#" + std::to_string(subset.trial);
  const DetectionTable* table = nullptr;
  std::string key;
  if (auto it = tables_.find(trial_key); it != tables_.end()) {
    key = trial_key;
    table = &it->second;
  } else if (auto it2 = tables_.find(subset.descriptor); it2 != tables_.end()) {
    key = subset.descriptor;
    table = &it2->second;
  } else if (fallback_) {
    key = "";
    table = &*fallback_;
  } else {
    throw ValidationError("no detections for training subset '" + trial_key +
                          "'");
  }
  auto& slot = cache_[key];
  if (!slot) {
    slot = std::make_shared<const DatasetManifest>(
        attach_detections(base_, *table));
  }
  return slot;
}

std::string KeyedDetectionSource::describe() const {
  std::string out = "keyed(";
  bool first = true;
  for (const auto& [key, table] : tables_) {
    (void)table;
    if (!first) out += ";";
    out += key;
    first = false;
  }
  if (fallback_) out += first ? "*" : ";*";
  return out + ")";
}

SimulatedDetectionSource::SimulatedDetectionSource(DatasetManifest manifest,
                                                   DetectorNoiseModel noise,
                                                   std::uint64_t seed,
                                                   unsigned threads)
    : SimulatedDetectionSource(
          std::move(manifest),
          [noise](const TrainingSubset&) { return noise; }, seed, threads) {}

SimulatedDetectionSource::SimulatedDetectionSource(DatasetManifest manifest,
                                                   NoiseFn noise,
                                                   std::uint64_t seed,
                                                   unsigned threads)
    : manifest_(std::move(manifest)),
      noise_(std::move(noise)),
      seed_(seed),
      threads_(threads) {}

std::shared_ptr<const DatasetManifest> SimulatedDetectionSource::detections_for(
    const TrainingSubset& subset) {
  const std::string key = subset.descriptor + "#" + std::to_string(subset.trial);
  auto& slot = cache_[key];
  if (!slot) {
    const std::uint64_t seed = derive_seed(
        seed_, {hash_label(subset.descriptor), subset.trial});
    slot = std::make_shared<const DatasetManifest>(
        simulate_detections(manifest_, noise_(subset), seed, threads_));
  }
  return slot;
}

std::string SimulatedDetectionSource::describe() const {
  return "simulated(seed=" + std::to_string(seed_) + ")";
}

Evaluation& Evaluation::operator+=(const Evaluation& o) {
  counts += o.counts;
  scored.insert(scored.end(), o.scored.begin(), o.scored.end());
  ground_truth += o.ground_truth;
  return *this;
}

namespace {

Evaluation score(const DetectionSet& dets, std::span<const BoundingBox> gts,
                 double cutoff, double iou_threshold) {
  const MatchResult m = match_detections(dets, gts, iou_threshold, cutoff);
  Evaluation e;
  e.counts = m.counts;
  e.ground_truth = gts.size();
  e.scored.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    e.scored.push_back({dets[i].confidence(), m.is_tp[i]});
  }
  return e;
}

[[noreturn]] void throw_missing(std::vector<std::string> ids) {
  constexpr std::size_t kListed = 20;
  std::ostringstream msg;
  msg << "missing detections for " << ids.size() << " image(s): ";
  for (std::size_t i = 0; i < ids.size() && i < kListed; ++i) {
    if (i > 0) msg << ", ";
    msg << ids[i];
  }
  if (ids.size() > kListed) msg << ", ... (" << ids.size() - kListed << " more)";
  throw ValidationError(msg.str());
}

Evaluation sum(std::vector<Evaluation>& parts) {
  Evaluation total;
  for (const Evaluation& p : parts) total += p;
  return total;
}

}  // namespace

Evaluation evaluate_images(const DatasetManifest& manifest,
                           std::span<const ImageRef> images,
                           double confidence_cutoff, double iou_threshold,
                           unsigned threads) {
  std::vector<std::string> missing;
  for (const ImageRef& ref : images) {
    const ImageRecord& img = manifest.image(ref);
    if (!img.detections) missing.push_back(img.image_id);
  }
  if (!missing.empty()) throw_missing(std::move(missing));

  std::vector<Evaluation> parts(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const ImageRecord& img = manifest.image(images[i]);
    std::vector<BoundingBox> gts;
    gts.reserve(img.annotations.size());
    for (const Annotation& a : img.annotations) gts.push_back(a.box);
    parts[i] = score(*img.detections, gts, confidence_cutoff, iou_threshold);
  });
  return sum(parts);
}

Evaluation evaluate_regions(const DatasetManifest& manifest,
                            std::span<const RegionRef> regions,
                            double confidence_cutoff, double iou_threshold,
                            unsigned threads,
                            const std::optional<FusionParams>& fusion) {
  std::vector<std::string> missing;
  for (const RegionRef& ref : regions) {
    for (const ImageRecord& img : manifest.region(ref).images()) {
      if (!img.detections) missing.push_back(img.image_id);
    }
  }
  if (!missing.empty()) throw_missing(std::move(missing));

  std::vector<Evaluation> parts(regions.size());
  parallel_for(regions.size(), threads, [&](std::size_t i) {
    const RegionStack& region = manifest.region(regions[i]);
    DetectionSet pooled;
    std::vector<BoundingBox> gts;
    std::set<std::string> seen;
    for (const ImageRecord& img : region.images()) {
      pooled.append(*img.detections);
      for (const Annotation& a : img.annotations) {
        if (seen.insert(a.defect_id).second) gts.push_back(a.box);
      }
    }
    if (fusion) pooled = nms(pooled, *fusion);
    parts[i] = score(pooled, gts, confidence_cutoff, iou_threshold);
  });
  return sum(parts);
}

DatasetManifest fuse_manifest(const DatasetManifest& manifest,
                              const FusionParams& params, unsigned threads) {
  validate(params);
  const std::vector<RegionRef> refs = manifest.region_refs();
  std::vector<std::optional<RegionStack>> fused(refs.size());
  parallel_for(refs.size(), threads, [&](std::size_t i) {
    fused[i].emplace(fuse_region(manifest.region(refs[i]), params));
  });
  DatasetManifest out;
  out.metadata = manifest.metadata;
  std::size_t i = 0;
  for (const ObjectEntry& obj : manifest.objects) {
    ObjectEntry copy{obj.object_id, {}};
    for (std::size_t r = 0; r < obj.regions.size(); ++r, ++i) {
      copy.regions.push_back(std::move(*fused[i]));
    }
    out.objects.push_back(std::move(copy));
  }
  return out;
}

double average_precision(const Evaluation& e, const StudyConfig& config) {
  if (config.ap_mode == ApMode::kGrid) {
    return average_precision_on_grid(e.scored, e.ground_truth, config.ap_grid);
  }
  return average_precision(e.scored, e.ground_truth);
}

std::vector<ImageRef> study_test_images(const DatasetManifest& manifest,
                                        const SplitAssignment& split,
                                        const StudyConfig& config,
                                        std::optional<Modality> modality) {
  SelectionSpec spec;
  if (modality) {
    spec.strategy = SelectionStrategy::kSingleModality;
    spec.modality = *modality;
  }
  return select_images(manifest, split, config.eval_split, spec);
}

namespace {

MetricRow metric_row(const Evaluation& e, const StudyConfig& config) {
  const PrecisionRecallF1 prf = precision_recall_f1(e.counts);
  return {prf.precision, prf.recall, prf.f1, average_precision(e, config)};
}

StudyRow single_trial_row(std::string train, std::string test, Evaluation e,
                          const StudyConfig& config) {
  StudyRow row;
  row.train = std::move(train);
  row.test = std::move(test);
  row.metrics = metric_row(e, config);
  row.trial_ap = {row.metrics.ap};
  row.first = std::move(e);
  return row;
}

class Harness {
 public:
  Harness(const DatasetManifest& manifest, const SplitAssignment& split,
          DetectionSource& source, const StudyConfig& config)
      : manifest_(manifest), split_(split), source_(source), config_(config) {}

  TrainingSubset subset(std::string descriptor, SelectionSpec spec,
                        std::size_t trial = 0) const {
    TrainingSubset s;
    s.descriptor = std::move(descriptor);
    s.spec = spec;
    s.trial = trial;
    s.images = select_images(manifest_, split_, Split::kTrain, spec);
    return s;
  }

  TrainingSubset full() const { return subset("full", SelectionSpec{}); }

  std::shared_ptr<const DatasetManifest> detections(const TrainingSubset& s) {
    auto m = source_.detections_for(s);
    if (!m) throw ValidationError("detection source returned nothing");
    if (m->objects.size() != manifest_.objects.size()) {
      throw ValidationError("detection source changed the manifest layout");
    }
    return m;
  }

  Evaluation evaluate_modality(const DatasetManifest& dets, Modality m) const {
    const std::vector<ImageRef> images =
        study_test_images(manifest_, split_, config_, m);
    return evaluate_images(dets, images, config_.confidence_cutoff,
                           config_.iou_threshold, config_.threads);
  }

  Evaluation evaluate_all(const DatasetManifest& dets, bool fused) const {
    if (config_.eval_mode == EvalMode::kPerRegion) {
      const std::vector<RegionRef> regions =
          regions_in_split(manifest_, split_, config_.eval_split);
      std::optional<FusionParams> fusion;
      if (fused) fusion = config_.fusion;
      return evaluate_regions(dets, regions, config_.confidence_cutoff,
                              config_.iou_threshold, config_.threads, fusion);
    }
    const std::vector<ImageRef> images =
        study_test_images(manifest_, split_, config_, std::nullopt);
    if (!fused) {
      return evaluate_images(dets, images, config_.confidence_cutoff,
                             config_.iou_threshold, config_.threads);
    }
    const DatasetManifest f = fuse_manifest(dets, config_.fusion, config_.threads);
    return evaluate_images(f, images, config_.confidence_cutoff,
                           config_.iou_threshold, config_.threads);
  }

  std::vector<StudyRow> study1() {
    std::vector<StudyRow> rows;
    for (Modality m : kAllModalities) {
      SelectionSpec spec;
      spec.strategy = SelectionStrategy::kSingleModality;
      spec.modality = m;
      const TrainingSubset s = subset(describe(spec), spec);
      const std::string name(to_string(m));
      rows.push_back(single_trial_row(name, name,
                                      evaluate_modality(*detections(s), m),
                                      config_));
    }
    return rows;
  }

  std::vector<StudyRow> study2(
      std::vector<std::pair<std::string, std::string>>& provenance) {
    constexpr SelectionStrategy kStrategies[] = {
        SelectionStrategy::kRandomModalities,
        SelectionStrategy::kQuarterRegions};
    // Training subsets are drawn once per (strategy, trial) and shared by
    // the four test modalities.
    std::vector<std::vector<TrainingSubset>> subsets;
    std::vector<std::vector<std::uint64_t>> seeds;
    for (SelectionStrategy strategy : kStrategies) {
      const std::string name(to_string(strategy));
      subsets.emplace_back();
      seeds.emplace_back();
      for (std::size_t t = 0; t < config_.trials; ++t) {
        const std::uint64_t seed = derive_seed(
            config_.seed, {hash_label("study2"), hash_label(name), t});
        SelectionSpec spec;
        spec.strategy = strategy;
        spec.seed = seed;
        spec.exposure_scope = config_.exposure_scope;
        subsets.back().push_back(subset(name, spec, t));
        seeds.back().push_back(seed);
        provenance.emplace_back(
            "selection_seed." + name + "#" + std::to_string(t),
            std::to_string(seed));
      }
    }

    std::vector<StudyRow> rows;
    for (Modality m : kAllModalities) {
      for (std::size_t k = 0; k < std::size(kStrategies); ++k) {
        StudyRow row;
        row.train = std::string(to_string(kStrategies[k]));
        row.test = std::string(to_string(m));
        row.trial_seeds = seeds[k];
        for (std::size_t t = 0; t < config_.trials; ++t) {
          Evaluation e = evaluate_modality(*detections(subsets[k][t]), m);
          const MetricRow metrics = metric_row(e, config_);
          row.trial_ap.push_back(metrics.ap);
          if (t == 0) {
            row.metrics = metrics;
            row.first = std::move(e);
          }
        }
        summarize_trials(row);
        rows.push_back(std::move(row));
      }
    }
    return rows;
  }

  std::vector<StudyRow> study3() {
    const auto dets = detections(full());
    std::vector<StudyRow> rows;
    for (Modality m : kAllModalities) {
      rows.push_back(single_trial_row("All Train", std::string(to_string(m)),
                                      evaluate_modality(*dets, m), config_));
    }
    return rows;
  }

  std::vector<StudyRow> study4() {
    const auto dets = detections(full());
    std::vector<StudyRow> rows;
    rows.push_back(single_trial_row("All Train", "All Test",
                                    evaluate_all(*dets, false), config_));
    rows.push_back(single_trial_row("All Train + late fusion", "All Test",
                                    evaluate_all(*dets, true), config_));
    return rows;
  }

 private:
  static void summarize_trials(StudyRow& row) {
    const std::size_t n = row.trial_ap.size();
    double mean = 0.0;
    for (double ap : row.trial_ap) mean += ap;
    mean /= static_cast<double>(n);
    row.metrics.ap = mean;
    if (n > 1) {
      double ss = 0.0;
      for (double ap : row.trial_ap) ss += (ap - mean) * (ap - mean);
      row.ap_std = std::sqrt(ss / static_cast<double>(n - 1));
    }
  }

  const DatasetManifest& manifest_;
  const SplitAssignment& split_;
  DetectionSource& source_;
  const StudyConfig& config_;
};

std::string ratios_string(const SplitRatios& r) {
  return format_double(r[0]) + "," + format_double(r[1]) + "," +
         format_double(r[2]);
}

}  // namespace

StudyReport run_study(const DatasetManifest& manifest,
                      const SplitAssignment& split, DetectionSource& source,
                      const StudyConfig& config) {
  validate(config);
  StudyReport report;
  report.study_id = config.study_id;
  report.trials = config.study_id == 2 ? config.trials : 1;

  auto& p = report.provenance;
  p.emplace_back("report_format_version", "1");
  p.emplace_back("manifest_schema_version",
                 std::to_string(manifest.metadata.schema_version));
  p.emplace_back("manifest_generator", manifest.metadata.generator);
  p.emplace_back("manifest_seed", manifest.metadata.seed
                                      ? std::to_string(*manifest.metadata.seed)
                                      : "none");
  p.emplace_back("study_id", std::to_string(config.study_id));
  p.emplace_back("seed", std::to_string(config.seed));
  p.emplace_back("split_seed", std::to_string(split.seed));
  p.emplace_back("split_ratios", ratios_string(split.ratios));
  p.emplace_back("eval_split", std::string(to_string(config.eval_split)));
  p.emplace_back("confidence_cutoff", format_double(config.confidence_cutoff));
  p.emplace_back("iou_threshold", format_double(config.iou_threshold));
  p.emplace_back("trials", std::to_string(report.trials));
  p.emplace_back("ap_mode", std::string(to_string(config.ap_mode)));
  if (config.ap_mode == ApMode::kGrid) {
    std::string grid;
    for (double t : config.ap_grid) {
      if (!grid.empty()) grid += ",";
      grid += format_double(t);
    }
    p.emplace_back("ap_grid", grid);
  }
  if (config.study_id == 2) {
    p.emplace_back("exposure_scope",
                   std::string(to_string(config.exposure_scope)));
  }
  if (config.study_id == 4) {
    p.emplace_back("eval_mode", std::string(to_string(config.eval_mode)));
    p.emplace_back("fusion_theta", format_double(config.fusion.theta));
  }
  p.emplace_back("detection_source", source.describe());

  Harness h(manifest, split, source, config);
  switch (config.study_id) {
    case 1:
      report.rows = h.study1();
      break;
    case 2:
      report.rows = h.study2(p);
      break;
    case 3:
      report.rows = h.study3();
      break;
    case 4:
      report.rows = h.study4();
      break;
  }
  return report;
}

}  // namespace lightstack
