// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "lightstack/detections_io.hpp"
#include "lightstack/error.hpp"
#include "lightstack/fusion.hpp"
#include "lightstack/io.hpp"
#include "lightstack/manifest.hpp"
#include "lightstack/plot.hpp"
#include "lightstack/protocol.hpp"
#include "lightstack/random.hpp"
#include "lightstack/report.hpp"
#include "lightstack/sim_config.hpp"
#include "lightstack/simulator.hpp"
#include "lightstack/study.hpp"

namespace lightstack {
namespace {

namespace fs = std::filesystem;

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

DatasetManifest read_manifest(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_manifest(in, path);
}

DetectionTable read_detections(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_detections(in, path);
}

SplitAssignment read_split(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_split(in, path);
}

// "-" writes to stdout; anything else is written atomically.
void emit(const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed,
                           std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "lightstack: note: no --seed given, using seed=" << s << "\n";
  return s;
}

SimulationConfig resolve_sim_config(const std::string& preset,
                                    const std::string& config_path) {
  SimulationConfig cfg = simulation_preset(preset);
  if (!config_path.empty()) {
    cfg = parse_simulation_config(read_file(config_path), cfg, config_path);
  }
  return cfg;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (std::string_view f : split_fields(text, ',')) {
    double v = 0.0;
    if (!parse_double(f, v)) {
      throw ValidationError(std::string(what) + ": '" + std::string(f) +
                            "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::string selection_spec_help() {
  return "single_modality, random_modalities, quarter_regions or full";
}

// Shared selection flags.
struct SelectionFlags {
  std::string strategy = "full";
  std::string modality = "C";
  std::string exposure_scope = "per_image";

  void add(CLI::App* app) {
    app->add_option("--strategy", strategy,
                    "Image selection: " + selection_spec_help())
        ->capture_default_str();
    app->add_option("--modality", modality,
                    "Modality for single_modality: C, UD, LR or UDLR")
        ->capture_default_str();
    app->add_option("--exposure-scope", exposure_scope,
                    "Exposure draw in random_modalities: per_image or "
                    "per_region")
        ->capture_default_str();
  }

  SelectionSpec spec(std::optional<std::uint64_t> seed) const {
    SelectionSpec s;
    s.strategy = parse_strategy(strategy);
    s.modality = parse_modality(modality);
    s.exposure_scope = parse_exposure_scope(exposure_scope);
    s.seed = seed;
    return s;
  }

  bool randomized() const {
    const SelectionStrategy s = parse_strategy(strategy);
    return s == SelectionStrategy::kRandomModalities ||
           s == SelectionStrategy::kQuarterRegions;
  }
};

std::string detections_text(const DetectionTable& table,
                            const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const std::string& c : comments) out << "# " << c << "\n";
  save_detections(table, out);
  return out.str();
}

// Regions selected by --split/--which, or every region.
std::vector<RegionRef> chosen_regions(const DatasetManifest& manifest,
                                      const std::string& split_path,
                                      const std::string& which) {
  if (split_path.empty()) return manifest.region_refs();
  return regions_in_split(manifest, read_split(split_path), parse_split(which));
}

int cmd_generate(const std::string& out_path,
                 std::optional<std::uint64_t> seed_flag,
                 const std::string& preset, const std::string& config_path,
                 std::optional<std::size_t> regions, bool no_propagate,
                 unsigned threads, std::ostream& out, std::ostream& err) {
  SimulationConfig cfg = resolve_sim_config(preset, config_path);
  if (regions) cfg.scene.region_count = *regions;
  if (no_propagate) cfg.scene.propagate = false;
  validate(cfg.scene);
  const std::uint64_t seed = resolve_seed(seed_flag, err);
  const DatasetManifest m = generate_dataset(cfg.scene, seed, threads);
  std::ostringstream text;
  save_manifest(m, text);
  emit(out_path, text.str(), out);
  return kExitOk;
}

int cmd_simulate(const std::string& manifest_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_flag,
                 const std::string& preset, const std::string& config_path,
                 unsigned threads, std::ostream& out, std::ostream& err) {
  const SimulationConfig cfg = resolve_sim_config(preset, config_path);
  validate(cfg.detector);
  const DatasetManifest m = read_manifest(manifest_path);
  const std::uint64_t seed = resolve_seed(seed_flag, err);
  const DatasetManifest sim = simulate_detections(m, cfg.detector, seed, threads);
  emit(out_path,
       detections_text(extract_detections(sim),
                       {"generator=lightstack-sim", "seed=" + std::to_string(seed)}),
       out);
  return kExitOk;
}

int cmd_import(const std::string& manifest_path,
               const std::string& detections_path, const std::string& out_path,
               bool require_all, std::ostream& out, std::ostream& err) {
  const DatasetManifest m = read_manifest(manifest_path);
  const DetectionTable table = read_detections(detections_path);
  const DatasetManifest attached = attach_detections(m, table);
  if (require_all) {
    std::vector<std::string> missing;
    for (const RegionRef& r : attached.region_refs()) {
      for (const ImageRecord& img : attached.region(r).images()) {
        if (!img.detections) missing.push_back(img.image_id);
      }
    }
    if (!missing.empty()) {
      throw ValidationError(std::to_string(missing.size()) +
                            " image(s) without detections, first: " +
                            missing.front());
    }
  }
  err << "lightstack: imported detections for " << table.size() << " of "
      << m.image_count() << " images\n";
  emit(out_path, detections_text(extract_detections(attached), {}), out);
  return kExitOk;
}

int cmd_propagate(const std::string& manifest_path, const std::string& out_path,
                  std::ostream& out) {
  const DatasetManifest m = propagate_annotations(read_manifest(manifest_path));
  std::ostringstream text;
  save_manifest(m, text);
  emit(out_path, text.str(), out);
  return kExitOk;
}

int cmd_split(const std::string& manifest_path, const std::string& out_path,
              std::optional<std::uint64_t> seed_flag,
              const std::string& ratios_text, std::ostream& out,
              std::ostream& err) {
  const std::vector<double> r = parse_list(ratios_text, "--ratios");
  if (r.size() != 3) throw ValidationError("--ratios needs 3 values");
  const DatasetManifest m = read_manifest(manifest_path);
  const std::uint64_t seed = resolve_seed(seed_flag, err);
  const SplitAssignment split = split_objectwise(m, {r[0], r[1], r[2]}, seed);
  std::ostringstream text;
  save_split(split, text);
  emit(out_path, text.str(), out);
  return kExitOk;
}

int cmd_select(const std::string& manifest_path, const std::string& split_path,
               const std::string& which, const SelectionFlags& flags,
               std::optional<std::uint64_t> seed_flag,
               const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  std::optional<std::uint64_t> seed = seed_flag;
  if (flags.randomized()) seed = resolve_seed(seed_flag, err);
  const SelectionSpec spec = flags.spec(seed);
  const DatasetManifest m = read_manifest(manifest_path);
  const std::vector<RegionRef> pool = chosen_regions(m, split_path, which);
  const std::vector<ImageRef> images = select_images(m, pool, spec);

  std::size_t regions = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (i == 0 || images[i].object_index != images[i - 1].object_index ||
        images[i].region_index != images[i - 1].region_index) {
      ++regions;
    }
  }
  std::ostringstream text;
  text << "# lightstack-selection v1\n";
  text << "# strategy=" << describe(spec) << "\n";
  if (seed) text << "# seed=" << *seed << "\n";
  if (!split_path.empty()) text << "# split=" << which << "\n";
  text << "# pool_regions=" << pool.size() << "\n";
  text << "# regions=" << regions << "\n";
  text << "# images=" << images.size() << "\n";
  text << "image_id,region_id,modality,exposure\n";
  for (const ImageRef& ref : images) {
    const ImageRecord& img = m.image(ref);
    text << img.image_id << "," << img.region_id << ","
         << to_string(img.condition.modality) << ","
         << to_string(img.condition.exposure) << "\n";
  }
  emit(out_path, text.str(), out);
  return kExitOk;
}

int cmd_fuse(const std::string& manifest_path,
             const std::string& detections_path, double theta,
             const std::string& out_path, unsigned threads, std::ostream& out) {
  const FusionParams params{theta};
  validate(params);
  const DatasetManifest m = read_manifest(manifest_path);
  const DatasetManifest attached =
      attach_detections(m, read_detections(detections_path));
  const DatasetManifest fused = fuse_manifest(attached, params, threads);
  // Regions that carried no detections at all stay absent from the output.
  DetectionTable table;
  const std::vector<RegionRef> refs = attached.region_refs();
  for (const RegionRef& r : refs) {
    const auto images = attached.region(r).images();
    const bool any = std::any_of(images.begin(), images.end(),
                                 [](const ImageRecord& i) {
                                   return i.detections.has_value();
                                 });
    if (!any) continue;
    for (const ImageRecord& img : fused.region(r).images()) {
      table.emplace(img.image_id, *img.detections);
    }
  }
  emit(out_path,
       detections_text(table, {"fused theta=" + format_double(theta)}), out);
  return kExitOk;
}

struct EvalFlags {
  std::string manifest;
  std::string detections;
  std::string split;
  std::string which = "test";
  SelectionFlags selection;
  std::optional<std::uint64_t> seed;
  double cutoff = 0.7;
  double iou = 0.5;
  std::string ap_mode = "distinct";
  bool fuse = false;
  double theta = 0.5;
  std::string eval_mode = "per_image";
  std::string out = "-";
  std::string scored_out;
};

int cmd_evaluate(const EvalFlags& f, unsigned threads, std::ostream& out,
                 std::ostream& err) {
  StudyConfig cfg;
  cfg.confidence_cutoff = f.cutoff;
  cfg.iou_threshold = f.iou;
  cfg.ap_mode = parse_ap_mode(f.ap_mode);
  cfg.fusion.theta = f.theta;
  cfg.eval_mode = parse_eval_mode(f.eval_mode);
  validate(cfg);
  std::optional<std::uint64_t> seed = f.seed;
  if (f.selection.randomized()) seed = resolve_seed(f.seed, err);
  const SelectionSpec spec = f.selection.spec(seed);

  const DatasetManifest m = read_manifest(f.manifest);
  DatasetManifest dets = attach_detections(m, read_detections(f.detections));
  const std::vector<RegionRef> pool = chosen_regions(m, f.split, f.which);

  Evaluation e;
  if (cfg.eval_mode == EvalMode::kPerRegion) {
    if (spec.strategy != SelectionStrategy::kFull &&
        spec.strategy != SelectionStrategy::kQuarterRegions) {
      throw ValidationError("per_region evaluation needs whole regions "
                            "(strategy full or quarter_regions)");
    }
    const std::vector<ImageRef> images = select_images(m, pool, spec);
    std::vector<RegionRef> regions;
    for (const ImageRef& ref : images) {
      const RegionRef r{ref.object_index, ref.region_index};
      if (regions.empty() || regions.back() != r) regions.push_back(r);
    }
    std::optional<FusionParams> fusion;
    if (f.fuse) fusion = cfg.fusion;
    e = evaluate_regions(dets, regions, cfg.confidence_cutoff,
                         cfg.iou_threshold, threads, fusion);
  } else {
    if (f.fuse) dets = fuse_manifest(dets, cfg.fusion, threads);
    const std::vector<ImageRef> images = select_images(m, pool, spec);
    e = evaluate_images(dets, images, cfg.confidence_cutoff, cfg.iou_threshold,
                        threads);
  }

  const PrecisionRecallF1 prf = precision_recall_f1(e.counts);
  const double ap = average_precision(e, cfg);
  std::ostringstream text;
  text << "selection,fused,eval_mode,confidence_cutoff,iou_threshold,ap_mode,"
          "tp,fp,fn,ground_truth,precision,recall,f1,ap\n";
  text << describe(spec) << "," << (f.fuse ? "true" : "false") << ","
       << f.eval_mode << "," << format_double(cfg.confidence_cutoff) << ","
       << format_double(cfg.iou_threshold) << "," << f.ap_mode << ","
       << e.counts.tp << "," << e.counts.fp << "," << e.counts.fn << ","
       << e.ground_truth << "," << format_double(prf.precision) << ","
       << format_double(prf.recall) << "," << format_double(prf.f1) << ","
       << format_double(ap) << "\n";
  if (!f.scored_out.empty()) {
    std::ostringstream scored;
    save_scored({e.ground_truth, e.scored}, scored);
    write_file_atomic(f.scored_out, scored.str());
  }
  emit(f.out, text.str(), out);
  return kExitOk;
}

struct StudyFlags {
  int id = 0;
  std::string manifest;
  std::string split;
  std::string detections;
  std::vector<std::string> keyed;
  bool simulate = false;
  std::string preset = "default";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 5;
  double cutoff = 0.7;
  double iou = 0.5;
  double theta = 0.5;
  std::string eval_mode = "per_image";
  std::string ap_mode = "distinct";
  std::string exposure_scope = "per_image";
  std::string out = "-";
  std::string csv_out;
  std::string scored_dir;
};

std::string file_safe(std::string s) {
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return s;
}

int cmd_study(const StudyFlags& f, unsigned threads, std::ostream& out,
              std::ostream& err) {
  StudyConfig cfg;
  cfg.study_id = f.id;
  cfg.trials = f.trials;
  cfg.confidence_cutoff = f.cutoff;
  cfg.iou_threshold = f.iou;
  cfg.fusion.theta = f.theta;
  cfg.eval_mode = parse_eval_mode(f.eval_mode);
  cfg.ap_mode = parse_ap_mode(f.ap_mode);
  cfg.exposure_scope = parse_exposure_scope(f.exposure_scope);
  cfg.threads = threads;
  validate(cfg);
  const int sources = (f.detections.empty() ? 0 : 1) +
                      (f.keyed.empty() ? 0 : 1) + (f.simulate ? 1 : 0);
  if (sources == 0) {
    throw ValidationError(
        "need one of --detections, --detections-for or --simulate");
  }
  if (f.simulate && sources > 1) {
    throw ValidationError("--simulate cannot be combined with detection files");
  }
  std::optional<SimulationConfig> sim;
  if (f.simulate) sim = resolve_sim_config(f.preset, f.config);

  // Parse every key=path before reading any input.
  std::vector<std::pair<std::string, std::string>> keyed;
  for (const std::string& kv : f.keyed) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
      throw ValidationError("--detections-for expects KEY=PATH, got '" + kv +
                            "'");
    }
    keyed.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }

  cfg.seed = resolve_seed(f.seed, err);
  const DatasetManifest m = read_manifest(f.manifest);
  const SplitAssignment split =
      f.split.empty() ? split_objectwise(m, kDefaultSplitRatios, cfg.seed)
                      : read_split(f.split);

  std::unique_ptr<DetectionSource> source;
  if (sim) {
    source = std::make_unique<SimulatedDetectionSource>(
        m, sim->detector, derive_seed(cfg.seed, {hash_label("detector")}),
        threads);
  } else if (!keyed.empty()) {
    std::map<std::string, DetectionTable> tables;
    for (const auto& [key, path] : keyed) tables[key] = read_detections(path);
    std::optional<DetectionTable> fallback;
    if (!f.detections.empty()) fallback = read_detections(f.detections);
    source = std::make_unique<KeyedDetectionSource>(m, std::move(tables),
                                                    std::move(fallback));
  } else {
    source = std::make_unique<FixedDetectionSource>(
        attach_detections(m, read_detections(f.detections)));
  }

  StudyReport report = run_study(m, split, *source, cfg);
  if (sim) report.provenance.emplace_back("simulation_preset", f.preset);

  if (!f.scored_dir.empty()) {
    std::error_code ec;
    fs::create_directories(f.scored_dir, ec);
    if (ec) {
      throw IoError("cannot create directory " + f.scored_dir + ": " +
                    ec.message());
    }
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const StudyRow& row = report.rows[i];
      std::ostringstream scored;
      save_scored({row.first.ground_truth, row.first.scored}, scored);
      const std::string name = "study" + std::to_string(f.id) + "_" +
                               std::to_string(i) + "_" + file_safe(row.train) +
                               "_" + file_safe(row.test) + ".csv";
      write_file_atomic(fs::path(f.scored_dir) / name, scored.str());
    }
  }
  if (!f.csv_out.empty()) write_file_atomic(f.csv_out, render_csv(report));
  emit(f.out, render_text(report), out);
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& inputs,
             const std::string& thresholds_text, const std::string& csv_out,
             const std::string& svg_out, std::ostream& out) {
  if (inputs.empty()) throw ValidationError("plot needs at least one --scored");
  const std::vector<double> thresholds =
      thresholds_text.empty() ? default_threshold_grid()
                              : parse_list(thresholds_text, "--thresholds");
  std::vector<std::pair<std::string, std::string>> named;
  for (const std::string& in : inputs) {
    const std::size_t eq = in.find('=');
    if (eq == std::string::npos) {
      named.emplace_back(fs::path(in).stem().string(), in);
    } else {
      named.emplace_back(in.substr(0, eq), in.substr(eq + 1));
    }
    if (named.back().first.find_first_of(",\"\n") != std::string::npos) {
      throw ValidationError("curve label may not contain ',', '\"' or newline");
    }
  }
  std::vector<PRCurve> curves;
  for (const auto& [label, path] : named) {
    std::istringstream in(read_file(path));
    curves.push_back(make_curve(label, load_scored(in, path), thresholds));
  }
  const std::string csv = render_pr_csv(curves);
  if (!svg_out.empty()) write_file_atomic(svg_out, render_pr_svg(curves));
  emit(csv_out, csv, out);
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multi-illumination defect detection dataset toolkit",
               "lightstack"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads, 0 = hardware concurrency; outputs do not "
                 "depend on it")
      ->capture_default_str();

  auto seed_opt = [](CLI::App* c, std::optional<std::uint64_t>& seed,
                     const std::string& what) {
    c->add_option("--seed", seed, "Seed for " + what +
                                      "; a random seed is drawn and reported "
                                      "when omitted");
  };

  // generate
  std::string gen_out, gen_preset = "default", gen_config;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::size_t> gen_regions;
  bool gen_no_propagate = false;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic manifest");
  gen->add_option("--out", gen_out, "Output manifest (JSONL), - for stdout")
      ->required();
  seed_opt(gen, gen_seed, "the scene generator");
  gen->add_option("--preset", gen_preset,
                  "Simulation preset: default, all_visible, noiseless, "
                  "complementary")
      ->capture_default_str();
  gen->add_option("--config", gen_config,
                  "JSON file overlaid on the preset (see `defaults`)");
  gen->add_option("--regions", gen_regions, "Override the region count");
  gen->add_flag("--no-propagate", gen_no_propagate,
                "Keep annotations on the source image only");

  // simulate-detections
  std::string sim_manifest, sim_out, sim_preset = "default", sim_config;
  std::optional<std::uint64_t> sim_seed;
  auto* simc = app.add_subcommand("simulate-detections",
                                  "Run the simulated detector on a manifest");
  simc->add_option("--manifest", sim_manifest, "Input manifest")->required();
  simc->add_option("--out", sim_out, "Output detections CSV, - for stdout")
      ->required();
  seed_opt(simc, sim_seed, "the detector");
  simc->add_option("--preset", sim_preset, "Simulation preset")
      ->capture_default_str();
  simc->add_option("--config", sim_config, "JSON file overlaid on the preset");

  // import
  std::string imp_manifest, imp_dets, imp_out;
  bool imp_require_all = false;
  auto* imp = app.add_subcommand(
      "import", "Validate external detections against a manifest and write "
                "them in canonical form");
  imp->add_option("--manifest", imp_manifest, "Input manifest")->required();
  imp->add_option("--detections", imp_dets, "External detections CSV")
      ->required();
  imp->add_option("--out", imp_out, "Output detections CSV, - for stdout")
      ->required();
  imp->add_flag("--require-all", imp_require_all,
                "Fail unless every image has a detections entry");

  // propagate
  std::string prop_manifest, prop_out;
  auto* prop = app.add_subcommand(
      "propagate", "Copy each annotation to all 12 images of its region");
  prop->add_option("--manifest", prop_manifest, "Input manifest")->required();
  prop->add_option("--out", prop_out, "Output manifest, - for stdout")
      ->required();

  // split
  std::string split_manifest, split_out, split_ratios = "0.7,0.15,0.15";
  std::optional<std::uint64_t> split_seed;
  auto* splitc =
      app.add_subcommand("split", "Object-wise train/val/test split");
  splitc->add_option("--manifest", split_manifest, "Input manifest")
      ->required();
  splitc->add_option("--out", split_out, "Output split file, - for stdout")
      ->required();
  seed_opt(splitc, split_seed, "the shuffle");
  splitc->add_option("--ratios", split_ratios, "train,val,test fractions")
      ->capture_default_str();

  // select
  std::string sel_manifest, sel_split, sel_which = "train", sel_out = "-";
  std::optional<std::uint64_t> sel_seed;
  SelectionFlags sel_flags;
  auto* sel = app.add_subcommand("select", "List the images a strategy keeps");
  sel->add_option("--manifest", sel_manifest, "Input manifest")->required();
  sel->add_option("--split", sel_split, "Split file; all regions if omitted");
  sel->add_option("--which", sel_which, "Split part: train, val or test")
      ->capture_default_str();
  sel_flags.add(sel);
  seed_opt(sel, sel_seed, "random_modalities and quarter_regions");
  sel->add_option("--out", sel_out, "Output selection CSV, - for stdout")
      ->capture_default_str();

  // fuse
  std::string fuse_manifest_path, fuse_dets, fuse_out;
  double fuse_theta = 0.5;
  auto* fuse = app.add_subcommand(
      "fuse", "Late fusion: pool each region's detections and apply NMS");
  fuse->add_option("--manifest", fuse_manifest_path, "Input manifest")
      ->required();
  fuse->add_option("--detections", fuse_dets, "Input detections CSV")
      ->required();
  fuse->add_option("--theta", fuse_theta, "NMS IoU threshold in (0, 1]")
      ->capture_default_str();
  fuse->add_option("--out", fuse_out, "Output detections CSV, - for stdout")
      ->required();

  // evaluate
  EvalFlags ev;
  auto* eval = app.add_subcommand("evaluate",
                                  "Score detections against annotations");
  eval->add_option("--manifest", ev.manifest, "Input manifest")->required();
  eval->add_option("--detections", ev.detections, "Detections CSV")
      ->required();
  eval->add_option("--split", ev.split, "Split file; all regions if omitted");
  eval->add_option("--which", ev.which, "Split part: train, val or test")
      ->capture_default_str();
  ev.selection.add(eval);
  seed_opt(eval, ev.seed, "randomized selections");
  eval->add_option("--cutoff", ev.cutoff, "Confidence cutoff for P/R/F1")
      ->capture_default_str();
  eval->add_option("--iou", ev.iou, "IoU threshold for a match")
      ->capture_default_str();
  eval->add_option("--ap-mode", ev.ap_mode, "AP over distinct or grid thresholds")
      ->capture_default_str();
  eval->add_flag("--fuse", ev.fuse, "Apply late fusion before scoring");
  eval->add_option("--theta", ev.theta, "NMS IoU threshold for --fuse")
      ->capture_default_str();
  eval->add_option("--eval-mode", ev.eval_mode, "per_image or per_region")
      ->capture_default_str();
  eval->add_option("--out", ev.out, "Output metrics CSV, - for stdout")
      ->capture_default_str();
  eval->add_option("--scored-out", ev.scored_out,
                   "Write the scored detections for `plot`");

  // study
  StudyFlags st;
  auto* study = app.add_subcommand("study", "Run Study 1, 2, 3 or 4");
  study->add_option("--id", st.id, "Study id: 1, 2, 3 or 4")->required();
  study->add_option("--manifest", st.manifest, "Input manifest")->required();
  study->add_option("--split", st.split,
                    "Split file; derived from --seed when omitted");
  study->add_option("--detections", st.detections,
                    "Detections CSV used for every training subset (or as "
                    "fallback with --detections-for)");
  study->add_option("--detections-for", st.keyed,
                    "KEY=PATH detections for one training subset; KEY is a "
                    "descriptor such as single_modality(UD), "
                    "random_modalities, quarter_regions or full, optionally "
                    "suffixed #TRIAL");
  study->add_flag("--simulate", st.simulate,
                  "Use the simulated detector instead of detection files");
  study->add_option("--preset", st.preset, "Simulation preset for --simulate")
      ->capture_default_str();
  study->add_option("--config", st.config, "Simulation JSON for --simulate");
  seed_opt(study, st.seed, "splits, selections and simulation");
  study->add_option("--trials", st.trials, "Trials per randomized strategy")
      ->capture_default_str();
  study->add_option("--cutoff", st.cutoff, "Confidence cutoff for P/R/F1")
      ->capture_default_str();
  study->add_option("--iou", st.iou, "IoU threshold for a match")
      ->capture_default_str();
  study->add_option("--theta", st.theta, "NMS IoU threshold for fusion")
      ->capture_default_str();
  study->add_option("--eval-mode", st.eval_mode,
                    "Study 4 scoring: per_image or per_region")
      ->capture_default_str();
  study->add_option("--ap-mode", st.ap_mode, "distinct or grid")
      ->capture_default_str();
  study->add_option("--exposure-scope", st.exposure_scope,
                    "random_modalities exposure draw: per_image or per_region")
      ->capture_default_str();
  study->add_option("--out", st.out, "Text report, - for stdout")
      ->capture_default_str();
  study->add_option("--csv-out", st.csv_out, "CSV report");
  study->add_option("--scored-dir", st.scored_dir,
                    "Directory for per-row scored detections");

  // plot
  std::vector<std::string> plot_inputs;
  std::string plot_thresholds, plot_csv = "-", plot_svg;
  auto* plot = app.add_subcommand("plot", "Precision/recall per threshold");
  plot->add_option("--scored", plot_inputs,
                   "[LABEL=]PATH scored detections; repeat to overlay curves")
      ->required();
  plot->add_option("--thresholds", plot_thresholds,
                   "Comma-separated ascending thresholds (default 0.1..0.9)");
  plot->add_option("--csv-out", plot_csv, "Output CSV, - for stdout")
      ->capture_default_str();
  plot->add_option("--svg-out", plot_svg, "Output SVG");

  // defaults
  std::string def_preset = "default";
  auto* defaults = app.add_subcommand(
      "defaults", "Print a simulation preset as JSON for use with --config");
  defaults->add_option("--preset", def_preset, "Preset name")
      ->capture_default_str();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "lightstack: error[usage]: " << one_line(e.what()) << "\n";
    return kExitValidation;
  }

  const unsigned t = resolve_threads(threads);
  try {
    if (gen->parsed()) {
      return cmd_generate(gen_out, gen_seed, gen_preset, gen_config,
                          gen_regions, gen_no_propagate, t, out, err);
    }
    if (simc->parsed()) {
      return cmd_simulate(sim_manifest, sim_out, sim_seed, sim_preset,
                          sim_config, t, out, err);
    }
    if (imp->parsed()) {
      return cmd_import(imp_manifest, imp_dets, imp_out, imp_require_all, out,
                        err);
    }
    if (prop->parsed()) return cmd_propagate(prop_manifest, prop_out, out);
    if (splitc->parsed()) {
      return cmd_split(split_manifest, split_out, split_seed, split_ratios, out,
                       err);
    }
    if (sel->parsed()) {
      return cmd_select(sel_manifest, sel_split, sel_which, sel_flags,
                        sel_seed, sel_out, out, err);
    }
    if (fuse->parsed()) {
      return cmd_fuse(fuse_manifest_path, fuse_dets, fuse_theta, fuse_out, t,
                      out);
    }
    if (eval->parsed()) return cmd_evaluate(ev, t, out, err);
    if (study->parsed()) return cmd_study(st, t, out, err);
    if (plot->parsed()) {
      return cmd_plot(plot_inputs, plot_thresholds, plot_csv, plot_svg, out);
    }
    if (defaults->parsed()) {
      out << dump_simulation_config(simulation_preset(def_preset));
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "lightstack: error[io]: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "lightstack: error[parse]: " << one_line(e.what()) << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "lightstack: error[validation]: " << one_line(e.what()) << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace lightstack
