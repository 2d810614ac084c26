// Copyright 2026 The Sigrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-image build pipeline, batch driver, configuration and augmentation.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sigrid/descriptors.hpp"
#include "sigrid/error.hpp"
#include "sigrid/evaluation.hpp"
#include "sigrid/format.hpp"
#include "sigrid/gridmap.hpp"
#include "sigrid/image.hpp"
#include "sigrid/sigrid.hpp"
#include "sigrid/slic.hpp"

namespace sigrid {

namespace fs = std::filesystem;

struct PipelineConfig {
  SlicParams slic;
  GridSpec grid;
  bool grid_explicit = false;  // set when a fixed grid was configured
  bool auto_grid = false;
  int auto_grid_max = 256;
  DescriptorConfig descriptors;
  fs::path input_dir;
  fs::path mask_dir;
  fs::path output_dir;
  int workers = 1;
  bool augment = false;
  double beta = kDefaultBeta;

  void validate() const {
    slic.validate();
    grid.validate();
    descriptors.validate();
    require(workers >= 1, "workers must be >= 1");
    require(!(auto_grid && grid_explicit), "auto-grid and a fixed grid are mutually exclusive");
    require(auto_grid_max >= 1 && auto_grid_max <= 65535, "auto grid limit out of range");
    require(beta > 0.0, "beta must be > 0");
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  fail(ErrorKind::kInvalidInput, key + ": expected a boolean, got '" + v + "'");
}

inline long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty(), key + ": expected an integer, got '" + v + "'");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty(), key + ": expected a number, got '" + v + "'");
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting. Keys match the CLI flag names with
/// dashes or underscores.
inline void set_config_value(PipelineConfig& cfg, std::string key, const std::string& raw) {
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = detail::trim(raw);
  if (key == "segments") {
    cfg.slic.segments = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "compactness") {
    cfg.slic.compactness = detail::parse_double(key, value);
  } else if (key == "max_iterations") {
    cfg.slic.max_iterations = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "enforce_connectivity") {
    cfg.slic.enforce_connectivity = detail::parse_bool(key, value);
  } else if (key == "grid") {
    // "80" for a square grid or "WxH".
    const auto x = value.find('x');
    if (x == std::string::npos) {
      cfg.grid.width = cfg.grid.height = static_cast<int>(detail::parse_int(key, value));
    } else {
      cfg.grid.width = static_cast<int>(detail::parse_int(key, value.substr(0, x)));
      cfg.grid.height = static_cast<int>(detail::parse_int(key, value.substr(x + 1)));
    }
    cfg.grid_explicit = true;
  } else if (key == "auto_grid") {
    cfg.auto_grid = detail::parse_bool(key, value);
  } else if (key == "auto_grid_max") {
    cfg.auto_grid_max = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "descriptors") {
    cfg.descriptors = DescriptorConfig::parse(value);
  } else if (key == "input_dir") {
    cfg.input_dir = value;
  } else if (key == "mask_dir") {
    cfg.mask_dir = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "augment") {
    cfg.augment = detail::parse_bool(key, value);
  } else if (key == "beta") {
    cfg.beta = detail::parse_double(key, value);
  } else {
    fail(ErrorKind::kInvalidInput, "unknown configuration key '" + key + "'");
  }
}

/// Parses line-oriented `key = value` text; '#' starts a comment.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(line_no) + ": expected 'key = value'");
    set_config_value(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

// ---------------------------------------------------------------------------
// Single image

struct BuildResult {
  SgrdFile file;
  GridAssignment assignment;
  std::size_t slic_regions = 0;
  std::optional<double> max_iou;
  double seconds = 0.0;
};

/// Runs SLIC, tau-merge, cell assignment and descriptor placement, plus
/// label rasterization when a mask is given.
inline BuildResult build_from_image(const Image& img, const Mask* mask, const PipelineConfig& cfg) {
  cfg.validate();
  if (mask)
    require(mask->width() == img.width() && mask->height() == img.height(),
            "mask dimensions " + std::to_string(mask->width()) + "x" +
                std::to_string(mask->height()) + " differ from image " +
                std::to_string(img.width()) + "x" + std::to_string(img.height()));
  const auto start = std::chrono::steady_clock::now();
  const Superpixelation sp = slic_segment(img, cfg.slic);
  const GridSpec spec = cfg.auto_grid ? min_collision_free_grid(sp, cfg.auto_grid_max) : cfg.grid;
  GridMapping mapping = map_to_grid(sp, spec);

  BuildResult result;
  result.slic_regions = sp.region_count();
  result.file.sigrid = build_sigrid(img, mapping.merged, mapping.assignment, cfg.descriptors);
  if (mask) {
    result.file.labels = rasterize_labels(*mask, mapping.merged, mapping.assignment);
    result.max_iou = max_iou(*mask, mapping.merged, mapping.assignment);
  }
  result.assignment = std::move(mapping.assignment);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Builds one SGRD file. Nothing is written when any input is invalid.
inline BuildResult cmd_build(const fs::path& image_path, const std::optional<fs::path>& mask_path,
                             const fs::path& output_path, const PipelineConfig& cfg) {
  const Image img = load_image(image_path);
  std::optional<Mask> mask;
  if (mask_path) mask = load_mask(*mask_path);
  BuildResult result = build_from_image(img, mask ? &*mask : nullptr, cfg);
  write_sgrd(output_path, result.file);
  return result;
}

// ---------------------------------------------------------------------------
// Corpus helpers

inline bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

/// Image files of a directory, sorted by stem.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kInvalidInput, "not a directory: " + dir.string());
  std::map<std::string, fs::path> by_stem;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    const std::string stem = entry.path().stem().string();
    require(by_stem.emplace(stem, entry.path()).second,
            "duplicate image stem '" + stem + "' in " + dir.string());
  }
  std::vector<fs::path> out;
  for (auto& [stem, path] : by_stem) out.push_back(path);
  return out;
}

inline std::optional<fs::path> find_by_stem(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".pgm", ".ppm"}) {
    const fs::path candidate = dir / (stem + ext);
    if (fs::is_regular_file(candidate)) return candidate;
  }
  return std::nullopt;
}

inline std::uint64_t stem_hash(const std::string& stem) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : stem) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

enum class Transform { kRot90, kRot180, kRot270, kFlipH, kFlipV };

inline const char* transform_suffix(Transform t) {
  switch (t) {
    case Transform::kRot90: return "_rot090";
    case Transform::kRot180: return "_rot180";
    case Transform::kRot270: return "_rot270";
    case Transform::kFlipH: return "_fliph";
    case Transform::kFlipV: return "_flipv";
  }
  return "";
}

/// Applies a rotation (clockwise) or flip to an interleaved raster.
template <typename T>
std::vector<T> transform_raster(std::span<const T> src, int width, int height, int channels,
                                Transform t, int& out_width, int& out_height) {
  const bool swaps = t == Transform::kRot90 || t == Transform::kRot270;
  out_width = swaps ? height : width;
  out_height = swaps ? width : height;
  std::vector<T> dst(src.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int dx = x, dy = y;
      switch (t) {
        case Transform::kRot90: dx = height - 1 - y; dy = x; break;
        case Transform::kRot180: dx = width - 1 - x; dy = height - 1 - y; break;
        case Transform::kRot270: dx = y; dy = width - 1 - x; break;
        case Transform::kFlipH: dx = width - 1 - x; break;
        case Transform::kFlipV: dy = height - 1 - y; break;
      }
      for (int c = 0; c < channels; ++c)
        dst[(static_cast<std::size_t>(dy) * out_width + dx) * channels + c] =
            src[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
  return dst;
}

/// The rotation and flip applied to a stem; fixed by the stem's hash.
inline std::array<Transform, 2> augmentations_for(const std::string& stem) {
  std::mt19937_64 rng(stem_hash(stem));
  constexpr Transform kRotations[] = {Transform::kRot90, Transform::kRot180, Transform::kRot270};
  constexpr Transform kFlips[] = {Transform::kFlipH, Transform::kFlipV};
  const auto r = rng();
  const auto f = rng();
  return {kRotations[r % 3], kFlips[f % 2]};
}

struct AugmentedDirs {
  fs::path images;
  fs::path masks;  // empty when there are no masks
};

/// Writes originals plus one rotated and one flipped copy of every image
/// (and its mask) under output_dir/augmented, before any superpixel work.
inline AugmentedDirs augment_corpus(const PipelineConfig& cfg) {
  AugmentedDirs dirs{cfg.output_dir / "augmented" / "images", {}};
  fs::create_directories(dirs.images);
  if (!cfg.mask_dir.empty()) {
    dirs.masks = cfg.output_dir / "augmented" / "masks";
    fs::create_directories(dirs.masks);
  }
  for (const auto& path : list_images(cfg.input_dir)) {
    const std::string stem = path.stem().string();
    const RawRaster img = load_raster(path);
    std::optional<RawRaster> mask;
    if (!dirs.masks.empty())
      if (auto mp = find_by_stem(cfg.mask_dir, stem)) mask = load_raster(*mp);
    save_png(dirs.images / (stem + ".png"), img.channels, img.width, img.height, img.bytes);
    if (mask) save_png(dirs.masks / (stem + ".png"), mask->channels, mask->width, mask->height, mask->bytes);
    for (Transform t : augmentations_for(stem)) {
      int w = 0, h = 0;
      const auto out = transform_raster<std::uint8_t>(img.bytes, img.width, img.height,
                                                      img.channels, t, w, h);
      const std::string name = stem + transform_suffix(t) + ".png";
      save_png(dirs.images / name, img.channels, w, h, out);
      if (mask) {
        const auto mout = transform_raster<std::uint8_t>(mask->bytes, mask->width, mask->height,
                                                         mask->channels, t, w, h);
        save_png(dirs.masks / name, mask->channels, w, h, mout);
      }
    }
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Batch

struct BatchItem {
  std::string stem;
  bool ok = false;
  std::string error;
  bool has_mask = false;
  std::size_t slic_regions = 0;
  std::size_t merged_regions = 0;
  std::size_t retained = 0;
  std::size_t discarded = 0;
  double collision_rate = 0.0;
  double max_iou = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct BatchSummary {
  std::vector<BatchItem> items;  // sorted by stem
  std::size_t failures = 0;
  double mean_collision_rate = 0.0;
  double mean_max_iou = std::numeric_limits<double>::quiet_NaN();
  double mean_seconds = 0.0;

  int exit_code() const { return failures == 0 ? 0 : 1; }
};

/// Deterministic per-image statistics (no timings).
inline std::string format_batch_csv(const BatchSummary& summary) {
  std::string out = "stem,status,slic_regions,merged_regions,retained,discarded,collision_rate,max_iou\n";
  char buf[256];
  for (const auto& it : summary.items) {
    if (!it.ok) {
      out += it.stem + ",failed,,,,,,\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, ",ok,%zu,%zu,%zu,%zu,%.6f,", it.slic_regions,
                  it.merged_regions, it.retained, it.discarded, it.collision_rate);
    out += it.stem + buf;
    if (it.has_mask) {
      std::snprintf(buf, sizeof buf, "%.6f", it.max_iou);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline std::string format_batch_summary(const BatchSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "images: %zu  failed: %zu\nmean collision rate: %.4f%%\nmean max_iou: %.4f\n"
                "mean build time: %.3f s\n",
                s.items.size(), s.failures, 100.0 * s.mean_collision_rate, s.mean_max_iou,
                s.mean_seconds);
  std::string out = buf;
  for (const auto& it : s.items)
    if (!it.ok) out += "FAILED " + it.stem + ": " + it.error + "\n";
  return out;
}

/// Builds every image of input_dir into output_dir/<stem>.sgrd using
/// `workers` threads. File contents and summary.csv do not depend on the
/// worker count; timings go to timing.csv.
inline BatchSummary cmd_batch(const PipelineConfig& cfg) {
  cfg.validate();
  require(!cfg.output_dir.empty(), "batch needs an output directory");
  fs::create_directories(cfg.output_dir);

  fs::path input_dir = cfg.input_dir, mask_dir = cfg.mask_dir;
  if (cfg.augment) {
    const auto dirs = augment_corpus(cfg);
    input_dir = dirs.images;
    mask_dir = dirs.masks;
  }
  const auto images = list_images(input_dir);
  require(!images.empty(), "no images found in " + input_dir.string());

  BatchSummary summary;
  summary.items.resize(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++) {
      BatchItem& item = summary.items[i];
      item.stem = images[i].stem().string();
      try {
        std::optional<fs::path> mask_path;
        if (!mask_dir.empty()) mask_path = find_by_stem(mask_dir, item.stem);
        const auto result =
            cmd_build(images[i], mask_path, cfg.output_dir / (item.stem + ".sgrd"), cfg);
        item.ok = true;
        item.has_mask = result.max_iou.has_value();
        item.slic_regions = result.slic_regions;
        item.merged_regions = result.assignment.region_count;
        item.retained = result.assignment.retained_count();
        item.discarded = result.assignment.discarded.size();
        item.collision_rate = result.assignment.collision_rate;
        if (result.max_iou) item.max_iou = *result.max_iou;
        item.seconds = result.seconds;
      } catch (const std::exception& e) {
        item.ok = false;
        item.error = e.what();
      }
    }
  };
  const int thread_count = std::min<int>(cfg.workers, static_cast<int>(images.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Reduce in sorted-stem order.
  std::size_t ok = 0, with_mask = 0;
  double collision = 0, iou_sum = 0, seconds = 0;
  for (const auto& it : summary.items) {
    if (!it.ok) {
      ++summary.failures;
      continue;
    }
    ++ok;
    collision += it.collision_rate;
    seconds += it.seconds;
    if (it.has_mask) {
      ++with_mask;
      iou_sum += it.max_iou;
    }
  }
  if (ok) {
    summary.mean_collision_rate = collision / static_cast<double>(ok);
    summary.mean_seconds = seconds / static_cast<double>(ok);
  }
  if (with_mask) summary.mean_max_iou = iou_sum / static_cast<double>(with_mask);

  {
    std::ofstream out(cfg.output_dir / "summary.csv", std::ios::trunc);
    out << format_batch_csv(summary);
  }
  {
    std::ofstream out(cfg.output_dir / "timing.csv", std::ios::trunc);
    out << "stem,build_seconds\n";
    char buf[64];
    for (const auto& it : summary.items) {
      std::snprintf(buf, sizeof buf, ",%.6f\n", it.seconds);
      out << it.stem << buf;
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Back-projection and evaluation

/// Writes the back-projected hard labels of a prediction as a 0/255 PNG.
inline Mask cmd_backproject(const fs::path& sgrd_path, const fs::path& prediction_path,
                            const fs::path& output_path) {
  const SgrdFile file = read_sgrd(sgrd_path);
  const CellPrediction pred = read_sgpd(prediction_path);
  require(pred.spec == file.sigrid.spec,
          "prediction grid " + std::to_string(pred.spec.width) + "x" +
              std::to_string(pred.spec.height) + " does not match SGRD grid " +
              std::to_string(file.sigrid.spec.width) + "x" +
              std::to_string(file.sigrid.spec.height));
  Mask mask = backproject(pred.label_grid(), file.sigrid);
  save_mask(output_path, mask);
  return mask;
}

struct EvalResult {
  std::vector<MetricsReport> reports;   // sorted by stem
  std::vector<std::string> unmatched;   // stems missing a counterpart
  std::vector<std::string> bound_violations;

  int exit_code() const { return unmatched.empty() ? 0 : 1; }
};

/// Evaluates predictions (SGPD cell files or pixel masks) against ground
/// truth masks, pairing files by stem across the three directories.
inline EvalResult cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir,
                           const fs::path& sgrd_dir, double beta = kDefaultBeta) {
  for (const auto& d : {pred_dir, gt_dir, sgrd_dir})
    if (!fs::is_directory(d)) fail(ErrorKind::kInvalidInput, "not a directory: " + d.string());

  std::map<std::string, fs::path> preds, sgrds;
  for (const auto& e : fs::directory_iterator(pred_dir)) {
    if (!e.is_regular_file()) continue;
    if (e.path().extension() == ".sgpd" || is_image_file(e.path()))
      preds.emplace(e.path().stem().string(), e.path());
  }
  for (const auto& e : fs::directory_iterator(sgrd_dir))
    if (e.is_regular_file() && e.path().extension() == ".sgrd")
      sgrds.emplace(e.path().stem().string(), e.path());
  std::map<std::string, fs::path> gts;
  for (const auto& p : list_images(gt_dir)) gts.emplace(p.stem().string(), p);

  std::map<std::string, int> seen;
  for (const auto* m : {&preds, &gts, &sgrds})
    for (const auto& [stem, path] : *m) ++seen[stem];

  EvalResult result;
  for (const auto& [stem, count] : seen) {
    if (count != 3) {
      result.unmatched.push_back(stem);
      continue;
    }
    const SgrdFile file = read_sgrd(sgrds.at(stem));
    const Mask gt = load_mask(gts.at(stem));
    const fs::path& pp = preds.at(stem);
    const bool cell_prediction = pp.extension() == ".sgpd";
    MetricsReport report = cell_prediction ? evaluate(read_sgpd(pp), gt, file.sigrid, beta)
                                           : evaluate(load_mask(pp), gt, file.sigrid, beta);
    report.image_id = stem;
    // The bound only constrains predictions made through the grid.
    if (cell_prediction && !report.within_max_iou()) result.bound_violations.push_back(stem);
    result.reports.push_back(std::move(report));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Inspection

struct InspectReport {
  SgrdHeader header;
  std::uintmax_t file_size = 0;
  std::size_t runs = 0;
  double occupancy = 0.0;                 // retained / grid cells
  double discarded_pixel_fraction = 0.0;  // pixels with region id 0
  std::size_t label_counts[2] = {0, 0};   // label 0 / label >= 1
};

inline InspectReport inspect_sgrd(const fs::path& path) {
  InspectReport r;
  r.header = read_sgrd_header(path);
  r.file_size = fs::file_size(path);
  const SgrdFile file = read_sgrd(path);
  r.runs = rle_encode(file.sigrid.region_map).size();
  r.occupancy = static_cast<double>(file.sigrid.cells.size()) /
                static_cast<double>(file.sigrid.spec.cell_count());
  const auto zeros = std::count(file.sigrid.region_map.begin(), file.sigrid.region_map.end(), 0u);
  r.discarded_pixel_fraction =
      static_cast<double>(zeros) / static_cast<double>(file.sigrid.region_map.size());
  if (file.labels)
    for (const auto& [cell, rec] : file.sigrid.cells) ++r.label_counts[file.labels->at(cell) ? 1 : 0];
  return r;
}

inline std::string format_inspect(const InspectReport& r) {
  const DescriptorConfig cfg = DescriptorConfig::from_bitmask(r.header.descriptor_mask);
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "version: %u\nflags: 0x%04x%s\nimage: %ux%u\ngrid: %ux%u\nchannels: %u\n"
                "descriptors: %s (mask 0x%04x)\nretained: %u\noccupancy: %.4f\n"
                "discarded_pixels: %.6f\nrle_runs: %zu\nfile_bytes: %ju\n",
                r.header.version, r.header.flags,
                (r.header.flags & kSgrdFlagLabels) ? " (labels)" : "", r.header.image_width,
                r.header.image_height, r.header.grid_width, r.header.grid_height,
                r.header.channels, cfg.to_string().c_str(), r.header.descriptor_mask,
                r.header.retained, r.occupancy, r.discarded_pixel_fraction, r.runs,
                r.file_size);
  std::string out = buf;
  if (r.header.flags & kSgrdFlagLabels) {
    std::snprintf(buf, sizeof buf, "labels: %zu background, %zu foreground\n", r.label_counts[0],
                  r.label_counts[1]);
    out += buf;
  }
  return out;
}

}  // namespace sigrid
