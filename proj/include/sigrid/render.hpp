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

// Visual inspection renders of SGRD contents.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigrid/error.hpp"
#include "sigrid/format.hpp"
#include "sigrid/image.hpp"
#include "sigrid/sigrid.hpp"

namespace sigrid {

enum class RenderMode { kBoundaries, kOccupancy, kLabels };

inline RenderMode parse_render_mode(const std::string& s) {
  if (s == "boundaries") return RenderMode::kBoundaries;
  if (s == "occupancy") return RenderMode::kOccupancy;
  if (s == "labels") return RenderMode::kLabels;
  fail(ErrorKind::kInvalidInput, "unknown render mode '" + s + "'");
}

/// 8-bit RGB raster.
struct RgbCanvas {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bytes;

  RgbCanvas(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0})
      : width(w), height(h), bytes(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < bytes.size(); i += 3)
      std::copy(fill.begin(), fill.end(), bytes.begin() + static_cast<std::ptrdiff_t>(i));
  }
  void set(int x, int y, std::array<std::uint8_t, 3> c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::copy(c.begin(), c.end(),
              bytes.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(y) * width + x) * 3));
  }
  std::array<std::uint8_t, 3> get(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {bytes[i], bytes[i + 1], bytes[i + 2]};
  }
};

namespace detail {

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(v * 255.0 + 0.5, 0.0, 255.0));
}

// Average color of a record, or mid gray when colors were not stored.
inline std::array<std::uint8_t, 3> record_color(const Sigrid& sg, const CellRecord& rec) {
  if (!sg.config.avg_color) return {200, 200, 200};
  return {to_byte(rec.values[0]), to_byte(rec.values[1]), to_byte(rec.values[2])};
}

}  // namespace detail

/// Superpixel borders and centroid dots over the source image, or over a
/// flat reconstruction from the stored average colors when no image is given.
inline RgbCanvas render_boundaries(const Sigrid& sg, const Image* source) {
  const int w = sg.image_width, h = sg.image_height;
  RgbCanvas canvas(w, h, {128, 128, 128});
  if (source) {
    require(source->width() == w && source->height() == h,
            "source image dimensions differ from the SGRD");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto c = source->rgb(x, y);
        canvas.set(x, y, {detail::to_byte(c[0]), detail::to_byte(c[1]), detail::to_byte(c[2])});
      }
  } else {
    std::map<RegionId, std::array<std::uint8_t, 3>> colors;
    for (const auto& [cell, rec] : sg.cells) colors.emplace(rec.region, detail::record_color(sg, rec));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const RegionId id = sg.region_map[static_cast<std::size_t>(y) * w + x];
        if (id != 0) canvas.set(x, y, colors.at(id));
      }
  }
  auto id_at = [&](int x, int y) { return sg.region_map[static_cast<std::size_t>(y) * w + x]; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const RegionId id = id_at(x, y);
      if ((x + 1 < w && id_at(x + 1, y) != id) || (y + 1 < h && id_at(x, y + 1) != id))
        canvas.set(x, y, {255, 255, 0});
    }
  RegionId max_id = 0;
  for (RegionId id : sg.region_map) max_id = std::max(max_id, id);
  const auto centroids = centroid_table(sg.region_map, w, max_id);
  for (const auto& [cell, rec] : sg.cells) {
    const int cx = static_cast<int>(centroids[rec.region].x);
    const int cy = static_cast<int>(centroids[rec.region].y);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) canvas.set(cx + dx, cy + dy, {255, 0, 0});
  }
  return canvas;
}

/// The w' x h' grid, `cell_px` pixels per cell: occupied cells take their
/// region's average color, empty cells are black, grid lines dark gray.
inline RgbCanvas render_occupancy(const Sigrid& sg, int cell_px = 6) {
  require(cell_px >= 1, "cell size must be positive");
  RgbCanvas canvas(sg.spec.width * cell_px, sg.spec.height * cell_px);
  for (const auto& [cell, rec] : sg.cells) {
    const auto color = detail::record_color(sg, rec);
    for (int y = 0; y < cell_px; ++y)
      for (int x = 0; x < cell_px; ++x)
        canvas.set(cell.col * cell_px + x, cell.row * cell_px + y, color);
  }
  if (cell_px >= 3)
    for (int y = 0; y < canvas.height; ++y)
      for (int x = 0; x < canvas.width; ++x)
        if (x % cell_px == 0 || y % cell_px == 0) canvas.set(x, y, {48, 48, 48});
  return canvas;
}

/// Cell labels: EMPTY dark gray, 0 black, anything else white.
inline RgbCanvas render_labels(const CellLabelGrid& labels, int cell_px = 6) {
  require(cell_px >= 1, "cell size must be positive");
  RgbCanvas canvas(labels.spec.width * cell_px, labels.spec.height * cell_px);
  for (int row = 0; row < labels.spec.height; ++row)
    for (int col = 0; col < labels.spec.width; ++col) {
      const Label l = labels.at({row, col});
      const std::array<std::uint8_t, 3> color =
          l == kEmptyLabel ? std::array<std::uint8_t, 3>{64, 64, 64}
          : l == 0         ? std::array<std::uint8_t, 3>{0, 0, 0}
                           : std::array<std::uint8_t, 3>{255, 255, 255};
      for (int y = 0; y < cell_px; ++y)
        for (int x = 0; x < cell_px; ++x) canvas.set(col * cell_px + x, row * cell_px + y, color);
    }
  return canvas;
}

inline RgbCanvas render(const SgrdFile& file, RenderMode mode, const Image* source = nullptr,
                        int cell_px = 6) {
  switch (mode) {
    case RenderMode::kBoundaries: return render_boundaries(file.sigrid, source);
    case RenderMode::kOccupancy: return render_occupancy(file.sigrid, cell_px);
    case RenderMode::kLabels:
      require(file.labels.has_value(), "labels mode needs an SGRD with a label section");
      return render_labels(*file.labels, cell_px);
  }
  fail(ErrorKind::kInvalidInput, "unknown render mode");
}

inline RgbCanvas cmd_render(const std::filesystem::path& sgrd_path, RenderMode mode,
                            const std::filesystem::path& output_path,
                            const std::optional<std::filesystem::path>& image_path = std::nullopt,
                            int cell_px = 6) {
  const SgrdFile file = read_sgrd(sgrd_path);
  std::optional<Image> source;
  if (image_path) source = load_image(*image_path);
  RgbCanvas canvas = render(file, mode, source ? &*source : nullptr, cell_px);
  save_png(output_path, 3, canvas.width, canvas.height, canvas.bytes);
  return canvas;
}

}  // namespace sigrid
