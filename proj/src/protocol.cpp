// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "lightstack/error.hpp"
#include "lightstack/io.hpp"
#include "lightstack/random.hpp"

namespace lightstack {

RegionStack propagate_annotations(const RegionStack& stack) {
  if (!stack.visible()) return stack;

  struct Defect {
    std::string id;
    BoundingBox box;
    LightingCondition source;
  };
  std::vector<Defect> defects;
  for (const ImageRecord& img : stack.images()) {
    for (const Annotation& a : img.annotations) {
      auto it = std::find_if(defects.begin(), defects.end(),
                             [&](const Defect& d) { return d.id == a.defect_id; });
      if (it == defects.end()) {
        defects.push_back(Defect{a.defect_id, a.box, a.source_condition});
      } else if (!(it->box == a.box)) {
        throw ValidationError("defect " + a.defect_id + " in region " +
                              stack.region_id() +
                              " carries conflicting boxes on different images");
      }
    }
  }

  std::vector<ImageRecord> images(stack.images().begin(), stack.images().end());
  for (ImageRecord& img : images) {
    std::vector<Annotation> merged;
    merged.reserve(defects.size());
    for (const Defect& d : defects) {
      bool visible = true;
      for (const Annotation& a : img.annotations) {
        if (a.defect_id == d.id) visible = a.visible;
      }
      merged.push_back(Annotation{d.box, d.id, d.source, visible});
    }
    img.annotations = std::move(merged);
  }
  return RegionStack(stack.region_id(), stack.object_id(), stack.visible(),
                     std::move(images));
}

DatasetManifest propagate_annotations(const DatasetManifest& manifest) {
  DatasetManifest out;
  out.metadata = manifest.metadata;
  for (const ObjectEntry& obj : manifest.objects) {
    ObjectEntry copy{obj.object_id, {}};
    copy.regions.reserve(obj.regions.size());
    for (const RegionStack& r : obj.regions) {
      copy.regions.push_back(propagate_annotations(r));
    }
    out.objects.push_back(std::move(copy));
  }
  return out;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split '" + std::string(name) +
                        "' (expected train, val or test)");
}

Split SplitAssignment::of(const std::string& object_id) const {
  auto it = by_object.find(object_id);
  if (it == by_object.end()) {
    throw ValidationError("object " + object_id + " has no split assignment");
  }
  return it->second;
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> out{};
  for (const auto& [id, s] : by_object) {
    (void)id;
    ++out[static_cast<std::size_t>(s)];
  }
  return out;
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios) {
  // Quotas are computed with a small guard so that products such as 10 * 0.7
  // that land a hair below an integer still floor to it.
  constexpr double kGuard = 1e-9;
  std::array<std::size_t, 3> seats{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double quota = static_cast<double>(n) * ratios[k];
    const double whole = std::floor(quota + kGuard);
    seats[k] = static_cast<std::size_t>(whole);
    remainder[k] = std::max(0.0, quota - whole);
    assigned += seats[k];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] + kGuard;
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) {
    ++seats[order[k]];
  }
  return seats;
}

namespace {

void validate_ratios(const SplitRatios& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ValidationError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
}

}  // namespace

SplitAssignment split_objectwise(const DatasetManifest& manifest,
                                 const SplitRatios& ratios,
                                 std::uint64_t seed) {
  validate_ratios(ratios);
  const std::size_t n = manifest.objects.size();
  if (n < 3) {
    throw ValidationError("object-wise split needs at least 3 objects, got " +
                          std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(derive_seed(seed, {hash_label("split")}));
  std::shuffle(order.begin(), order.end(), rng);

  const auto seats = apportion(n, ratios);
  SplitAssignment out;
  out.seed = seed;
  out.ratios = ratios;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < seats[k]; ++i, ++pos) {
      out.by_object.emplace(manifest.objects[order[pos]].object_id,
                            static_cast<Split>(k));
    }
  }
  return out;
}

void save_split(const SplitAssignment& split, std::ostream& out) {
  out << "# lightstack-split v1\n";
  out << "# seed=" << split.seed << '\n';
  out << "# ratios=" << format_double(split.ratios[0]) << ','
      << format_double(split.ratios[1]) << ','
      << format_double(split.ratios[2]) << '\n';
  out << "object_id,split\n";
  for (const auto& [id, s] : split.by_object) {
    out << id << ',' << to_string(s) << '\n';
  }
}

SplitAssignment load_split(std::istream& in, const std::string& source) {
  SplitAssignment out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_seed = false;
  bool have_ratios = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const std::size_t start = body.find_first_not_of(' ');
      const std::string_view kv =
          start == std::string_view::npos ? "" : body.substr(start);
      if (kv.starts_with("seed=")) {
        const std::string value(kv.substr(5));
        try {
          std::size_t used = 0;
          out.seed = std::stoull(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          throw ParseError(source, line_no, "seed", "not an unsigned integer");
        }
        have_seed = true;
      } else if (kv.starts_with("ratios=")) {
        const auto parts = split_fields(kv.substr(7), ',');
        if (parts.size() != 3) {
          throw ParseError(source, line_no, "ratios", "expected 3 values");
        }
        for (std::size_t k = 0; k < 3; ++k) {
          if (!parse_double(parts[k], out.ratios[k])) {
            throw ParseError(source, line_no, "ratios", "not a number");
          }
        }
        have_ratios = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "object_id,split") {
        throw ParseError(source, line_no, "", "expected header 'object_id,split'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError(source, line_no, "", "expected 'object_id,split'");
    }
    Split s;
    try {
      s = parse_split(fields[1]);
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, "split", e.what());
    }
    if (!out.by_object.emplace(std::string(fields[0]), s).second) {
      throw ParseError(source, line_no, "object_id",
                       "object listed twice: " + std::string(fields[0]));
    }
  }
  if (!have_header) throw ParseError(source, line_no, "", "missing header");
  if (!have_seed) throw ParseError(source, 0, "seed", "missing '# seed=' line");
  if (!have_ratios) {
    throw ParseError(source, 0, "ratios", "missing '# ratios=' line");
  }
  return out;
}

std::vector<RegionRef> regions_in_split(const DatasetManifest& manifest,
                                        const SplitAssignment& split,
                                        Split which) {
  std::vector<RegionRef> out;
  for (std::size_t o = 0; o < manifest.objects.size(); ++o) {
    const ObjectEntry& obj = manifest.objects[o];
    if (split.of(obj.object_id) != which) continue;
    for (std::size_t r = 0; r < obj.regions.size(); ++r) {
      out.push_back(RegionRef{o, r});
    }
  }
  return out;
}

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kSingleModality:
      return "single_modality";
    case SelectionStrategy::kRandomModalities:
      return "random_modalities";
    case SelectionStrategy::kQuarterRegions:
      return "quarter_regions";
    case SelectionStrategy::kFull:
      return "full";
  }
  return "?";
}

SelectionStrategy parse_strategy(std::string_view name) {
  for (auto s : {SelectionStrategy::kSingleModality,
                 SelectionStrategy::kRandomModalities,
                 SelectionStrategy::kQuarterRegions, SelectionStrategy::kFull}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown selection strategy '" + std::string(name) +
                        "'");
}

std::string_view to_string(ExposureScope s) {
  return s == ExposureScope::kPerImage ? "per_image" : "per_region";
}

ExposureScope parse_exposure_scope(std::string_view name) {
  if (name == "per_image") return ExposureScope::kPerImage;
  if (name == "per_region") return ExposureScope::kPerRegion;
  throw ValidationError("unknown exposure scope '" + std::string(name) +
                        "' (expected per_image or per_region)");
}

std::string describe(const SelectionSpec& spec) {
  std::string out(to_string(spec.strategy));
  if (spec.strategy == SelectionStrategy::kSingleModality) {
    out += "(";
    out += to_string(spec.modality);
    out += ")";
  }
  return out;
}

std::vector<ImageRef> select_images(const DatasetManifest& manifest,
                                    std::span<const RegionRef> regions,
                                    const SelectionSpec& spec) {
  const bool randomized =
      spec.strategy == SelectionStrategy::kRandomModalities ||
      spec.strategy == SelectionStrategy::kQuarterRegions;
  if (randomized && !spec.seed) {
    throw ValidationError(std::string(to_string(spec.strategy)) +
                          " selection requires a seed");
  }

  std::vector<ImageRef> out;
  auto add = [&out](const RegionRef& r, LightingCondition c) {
    out.push_back(ImageRef{r.object_index, r.region_index, condition_index(c)});
  };

  switch (spec.strategy) {
    case SelectionStrategy::kFull:
      out.reserve(regions.size() * kConditionCount);
      for (const RegionRef& r : regions) {
        for (LightingCondition c : all_conditions()) add(r, c);
      }
      break;

    case SelectionStrategy::kSingleModality:
      out.reserve(regions.size() * kExposureCount);
      for (const RegionRef& r : regions) {
        for (Exposure e : kAllExposures) add(r, {spec.modality, e});
      }
      break;

    case SelectionStrategy::kRandomModalities: {
      out.reserve(regions.size() * 3);
      const std::uint64_t stream = hash_label("random_modalities");
      for (const RegionRef& r : regions) {
        Rng rng = make_rng(derive_seed(
            *spec.seed, {stream, hash_label(manifest.region(r).region_id())}));
        std::array<Modality, kModalityCount> mods = kAllModalities;
        std::shuffle(mods.begin(), mods.end(), rng);
        std::array<Modality, 3> chosen = {mods[0], mods[1], mods[2]};
        std::sort(chosen.begin(), chosen.end());
        std::uniform_int_distribution<int> pick(0, 2);
        const auto shared = static_cast<Exposure>(pick(rng));
        for (Modality m : chosen) {
          const Exposure e = spec.exposure_scope == ExposureScope::kPerRegion
                                 ? shared
                                 : static_cast<Exposure>(pick(rng));
          add(r, {m, e});
        }
      }
      break;
    }

    case SelectionStrategy::kQuarterRegions: {
      std::vector<std::size_t> order(regions.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng = make_rng(
          derive_seed(*spec.seed, {hash_label("quarter_regions")}));
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(regions.size() / 4);
      std::sort(order.begin(), order.end());
      out.reserve(order.size() * kConditionCount);
      for (std::size_t k : order) {
        for (LightingCondition c : all_conditions()) add(regions[k], c);
      }
      break;
    }
  }
  return out;
}

std::vector<ImageRef> select_images(const DatasetManifest& manifest,
                                    const SplitAssignment& split, Split which,
                                    const SelectionSpec& spec) {
  const auto regions = regions_in_split(manifest, split, which);
  return select_images(manifest, regions, spec);
}

std::array<double, kConditionCount> annotation_frequency(
    const DatasetManifest& manifest) {
  std::array<double, kConditionCount> counts{};
  double total = 0.0;
  for (const ObjectEntry& obj : manifest.objects) {
    for (const RegionStack& region : obj.regions) {
      std::set<std::string> seen;
      for (const ImageRecord& img : region.images()) {
        for (const Annotation& a : img.annotations) {
          if (!seen.insert(a.defect_id).second) continue;
          counts[condition_index(a.source_condition)] += 1.0;
          total += 1.0;
        }
      }
    }
  }
  if (total > 0.0) {
    for (double& c : counts) c /= total;
  }
  return counts;
}

}  // namespace lightstack
