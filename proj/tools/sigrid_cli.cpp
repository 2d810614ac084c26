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

// Command-line front end: build, batch, backproject, eval, render, inspect.
//
// Exit codes: 0 success, 1 partial failure, 2 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sigrid/all.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;

struct PipelineFlags {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;  // in declaration order

  // Flags that map 1:1 onto configuration keys.
  std::optional<std::string> segments, compactness, grid, descriptors, workers, beta,
      input_dir, mask_dir, output_dir, max_iterations;
  bool auto_grid = false;
  bool augment = false;

  sigrid::PipelineConfig resolve() const {
    sigrid::PipelineConfig cfg;
    if (!config.empty()) sigrid::apply_config_file(cfg, config);
    const std::pair<const char*, const std::optional<std::string>*> keyed[] = {
        {"segments", &segments},     {"compactness", &compactness}, {"grid", &grid},
        {"descriptors", &descriptors}, {"workers", &workers},       {"beta", &beta},
        {"input_dir", &input_dir},   {"mask_dir", &mask_dir},       {"output_dir", &output_dir},
        {"max_iterations", &max_iterations}};
    for (const auto& [key, value] : keyed)
      if (*value) sigrid::set_config_value(cfg, key, **value);
    if (auto_grid) cfg.auto_grid = true;
    if (augment) cfg.augment = true;
    cfg.validate();
    return cfg;
  }
};

void add_pipeline_flags(CLI::App& app, PipelineFlags& f) {
  app.add_option("--config", f.config, "key = value configuration file");
  app.add_option("--segments", f.segments, "SLIC target segment count K (default 1500)");
  app.add_option("--compactness", f.compactness, "SLIC compactness m (default 20)");
  app.add_option("--max-iterations", f.max_iterations, "SLIC iterations (default 10)");
  app.add_option("--grid", f.grid, "grid size N or WxH (default 80)");
  app.add_flag("--auto-grid", f.auto_grid, "use the smallest collision-free square grid");
  app.add_option("--descriptors", f.descriptors, "comma list from {ac,a,w,h,c,s,e,hu} (default ac,hu)");
  app.add_option("--workers", f.workers, "parallel workers (default 1)");
  app.add_option("--beta", f.beta, "F-beta beta (default 0.3)");
}

int run_build(const PipelineFlags& flags, const std::string& image, const std::string& mask,
              const std::string& output) {
  const auto cfg = flags.resolve();
  std::optional<std::filesystem::path> mask_path;
  if (!mask.empty()) mask_path = mask;
  const auto result = sigrid::cmd_build(image, mask_path, output, cfg);
  std::printf("%s: %zu superpixels, %zu after merge, %zu retained, %zu discarded (%.3f%%)",
              output.c_str(), result.slic_regions, result.assignment.region_count,
              result.assignment.retained_count(), result.assignment.discarded.size(),
              100.0 * result.assignment.collision_rate);
  if (result.max_iou) std::printf(", max_iou %.4f", *result.max_iou);
  std::printf("\nbuild time: %.3f s\n", result.seconds);
  return kExitOk;
}

int run_batch(const PipelineFlags& flags) {
  const auto cfg = flags.resolve();
  const auto summary = sigrid::cmd_batch(cfg);
  std::cout << sigrid::format_batch_summary(summary);
  return summary.exit_code();
}

int run_backproject(const std::string& sgrd, const std::string& pred, const std::string& output) {
  const auto mask = sigrid::cmd_backproject(sgrd, pred, output);
  std::size_t fg = 0;
  for (auto l : mask.labels()) fg += l != 0;
  std::printf("%s: %dx%d, %zu foreground pixels\n", output.c_str(), mask.width(), mask.height(), fg);
  return kExitOk;
}

int run_eval(const PipelineFlags& flags, const std::string& pred_dir, const std::string& gt_dir,
             const std::string& sgrd_dir, const std::string& out_dir) {
  double beta = sigrid::kDefaultBeta;
  if (flags.beta) beta = std::stod(*flags.beta);
  else if (!flags.config.empty()) beta = flags.resolve().beta;
  const auto result = sigrid::cmd_eval(pred_dir, gt_dir, sgrd_dir, beta);
  for (const auto& stem : result.unmatched)
    std::fprintf(stderr, "warning: no matching prediction/ground truth/SGRD for '%s'\n", stem.c_str());
  for (const auto& stem : result.bound_violations)
    std::fprintf(stderr, "warning: %s: pixel IoU exceeds max_iou\n", stem.c_str());
  const std::string table = sigrid::format_report_table(result.reports);
  std::cout << table;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "report.txt") << table;
    std::ofstream(std::filesystem::path(out_dir) / "report.csv")
        << sigrid::format_report_csv(result.reports);
  }
  return result.exit_code();
}

int run_render(const std::string& sgrd, const std::string& mode, const std::string& output,
               const std::string& image, int cell_px) {
  std::optional<std::filesystem::path> image_path;
  if (!image.empty()) image_path = image;
  const auto canvas =
      sigrid::cmd_render(sgrd, sigrid::parse_render_mode(mode), output, image_path, cell_px);
  std::printf("%s: %dx%d\n", output.c_str(), canvas.width, canvas.height);
  return kExitOk;
}

int run_inspect(const std::string& sgrd) {
  std::cout << sigrid::format_inspect(sigrid::inspect_sgrd(sgrd));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superpixel-integrated grid (SGRD) toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  PipelineFlags flags;
  add_pipeline_flags(app, flags);

  std::string image, mask, output, sgrd, pred, pred_dir, gt_dir, sgrd_dir, mode = "occupancy";
  int cell_px = 6;

  auto* build = app.add_subcommand("build", "build one SGRD file from an image (and mask)");
  build->add_option("image", image, "input image (PNG/PPM/PGM)")->required();
  build->add_option("--mask", mask, "binary mask image");
  build->add_option("-o,--output", output, "output .sgrd path")->required();

  auto* batch = app.add_subcommand("batch", "build SGRD files for a directory of images");
  batch->add_option("--input-dir", flags.input_dir, "directory of images");
  batch->add_option("--mask-dir", flags.mask_dir, "directory of masks (matched by stem)");
  batch->add_option("--output-dir", flags.output_dir, "output directory");
  batch->add_flag("--augment", flags.augment, "add rotated/flipped copies before building");

  auto* backproject = app.add_subcommand("backproject", "expand cell predictions to a PNG mask");
  backproject->add_option("sgrd", sgrd, "SGRD file")->required();
  backproject->add_option("prediction", pred, "SGPD cell prediction file")->required();
  backproject->add_option("-o,--output", output, "output PNG")->required();

  auto* eval = app.add_subcommand("eval", "evaluate predictions against ground truth");
  eval->add_option("pred_dir", pred_dir, "SGPD files or mask images")->required();
  eval->add_option("gt_dir", gt_dir, "ground-truth masks")->required();
  eval->add_option("sgrd_dir", sgrd_dir, "SGRD files")->required();
  eval->add_option("-o,--output-dir", output, "write report.txt and report.csv here");

  auto* render = app.add_subcommand("render", "render an SGRD file to PNG");
  render->add_option("sgrd", sgrd, "SGRD file")->required();
  render->add_option("--mode", mode, "boundaries | occupancy | labels")
      ->check(CLI::IsMember({"boundaries", "occupancy", "labels"}));
  render->add_option("--image", image, "source image for boundaries mode");
  render->add_option("--cell-size", cell_px, "pixels per grid cell")->check(CLI::PositiveNumber);
  render->add_option("-o,--output", output, "output PNG")->required();

  auto* inspect = app.add_subcommand("inspect", "print SGRD header and statistics");
  inspect->add_option("sgrd", sgrd, "SGRD file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*build) return run_build(flags, image, mask, output);
    if (*batch) return run_batch(flags);
    if (*backproject) return run_backproject(sgrd, pred, output);
    if (*eval) return run_eval(flags, pred_dir, gt_dir, sgrd_dir, output);
    if (*render) return run_render(sgrd, mode, output, image, cell_px);
    if (*inspect) return run_inspect(sgrd);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
