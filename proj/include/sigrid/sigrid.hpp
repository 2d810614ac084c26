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

// Sigrid assembly: descriptor grids, cell labels and back-projection.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "sigrid/descriptors.hpp"
#include "sigrid/error.hpp"
#include "sigrid/gridmap.hpp"
#include "sigrid/image.hpp"
#include "sigrid/metrics.hpp"
#include "sigrid/slic.hpp"

namespace sigrid {

/// Label value of grid cells that hold no superpixel.
inline constexpr Label kEmptyLabel = 255;

struct CellRecord {
  RegionId region = 0;
  std::vector<float> values;  // d descriptor channels
  friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

/// Sparse d x w' x h' descriptor grid plus what back-projection needs: the
/// region map of the source image, where retained regions keep their ids and
/// pixels of discarded regions are 0.
struct Sigrid {
  GridSpec spec;
  DescriptorConfig config;
  int image_width = 0;
  int image_height = 0;
  std::map<Cell, CellRecord> cells;
  std::vector<RegionId> region_map;

  int channels() const { return config.channels(); }

  void validate() const {
    spec.validate();
    config.validate();
    require(image_width >= 1 && image_height >= 1, "sigrid: bad image dimensions");
    require(region_map.size() == static_cast<std::size_t>(image_width) * image_height,
            "sigrid: region map size mismatch");
    std::map<RegionId, Cell> owner;
    for (const auto& [cell, rec] : cells) {
      require(cell.row >= 0 && cell.row < spec.height && cell.col >= 0 && cell.col < spec.width,
              "sigrid: cell outside grid");
      require(rec.region != 0, "sigrid: region id 0 is reserved");
      require(rec.values.size() == static_cast<std::size_t>(channels()),
              "sigrid: descriptor length mismatch");
      require(owner.emplace(rec.region, cell).second, "sigrid: region stored twice");
    }
    for (RegionId id : region_map)
      require(id == 0 || owner.contains(id), "sigrid: region map references unknown region");
  }

  friend bool operator==(const Sigrid&, const Sigrid&) = default;
};

/// Per-cell class labels, row-major, kEmptyLabel where no superpixel sits.
struct CellLabelGrid {
  GridSpec spec;
  std::vector<Label> labels;

  CellLabelGrid() = default;
  explicit CellLabelGrid(const GridSpec& s, Label fill = kEmptyLabel)
      : spec(s), labels(s.cell_count(), fill) {}

  Label at(const Cell& c) const { return labels[static_cast<std::size_t>(c.row) * spec.width + c.col]; }
  Label& at(const Cell& c) { return labels[static_cast<std::size_t>(c.row) * spec.width + c.col]; }

  friend bool operator==(const CellLabelGrid&, const CellLabelGrid&) = default;
};

namespace detail {

inline std::vector<RegionId> retained_region_map(const Superpixelation& sp,
                                                 const GridAssignment& ga) {
  std::vector<RegionId> map(sp.ids().begin(), sp.ids().end());
  for (RegionId& id : map)
    if (!ga.is_retained(id)) id = 0;
  return map;
}

inline void check_assignment(const Superpixelation& sp, const GridAssignment& ga) {
  require(ga.region_count == sp.region_count(),
          "grid assignment was computed for a different superpixelation");
  for (const auto& [id, cell] : ga.assignments)
    require(id >= 1 && id <= sp.max_id(), "grid assignment references unknown region");
}

// Modal label per retained region (ties toward the lower label).
inline std::map<RegionId, Label> modal_labels(std::span<const RegionId> region_map,
                                              std::span<const Label> labels) {
  std::map<RegionId, std::array<std::size_t, 256>> hist;
  for (std::size_t p = 0; p < region_map.size(); ++p)
    if (region_map[p] != 0) ++hist[region_map[p]][labels[p]];
  std::map<RegionId, Label> out;
  for (const auto& [id, h] : hist) {
    int best = 0;
    for (int l = 1; l < 256; ++l)
      if (h[l] > h[best]) best = l;
    out.emplace(id, static_cast<Label>(best));
  }
  return out;
}

inline CellLabelGrid labels_to_grid(const GridSpec& spec, const std::map<RegionId, Cell>& cells,
                                    const std::map<RegionId, Label>& labels) {
  CellLabelGrid grid(spec);
  for (const auto& [id, cell] : cells) grid.at(cell) = labels.at(id);
  return grid;
}

// Expands per-region values to pixels. Pixels with id 0 take the value of
// the retained region whose centroid is nearest (ties toward the lower id).
template <typename T>
std::vector<T> expand_to_pixels(std::span<const RegionId> region_map, int width,
                                const std::map<RegionId, T>& values) {
  std::vector<T> out(region_map.size());
  RegionId max_id = 0;
  for (RegionId id : region_map) max_id = std::max(max_id, id);
  std::vector<Point2> centroids;
  bool have_centroids = false;
  for (std::size_t p = 0; p < region_map.size(); ++p) {
    if (region_map[p] != 0) {
      out[p] = values.at(region_map[p]);
      continue;
    }
    if (!have_centroids) {
      centroids = centroid_table(region_map, width, max_id);
      have_centroids = true;
    }
    const double px = static_cast<double>(p % width) + 0.5;
    const double py = static_cast<double>(p / width) + 0.5;
    double best = std::numeric_limits<double>::infinity();
    RegionId nearest = 0;
    for (const auto& [id, value] : values) {
      const double dx = centroids[id].x - px, dy = centroids[id].y - py;
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        nearest = id;
      }
    }
    require(nearest != 0, "back-projection needs at least one retained region");
    out[p] = values.at(nearest);
  }
  return out;
}

}  // namespace detail

/// Places each retained region's descriptors at its assigned cell.
/// `sp` must be the (post-merge) superpixelation `ga` was computed from.
inline Sigrid build_sigrid(const Image& img, const Superpixelation& sp, const GridAssignment& ga,
                           const DescriptorConfig& cfg) {
  require(img.width() == sp.width() && img.height() == sp.height(),
          "image and superpixelation dimensions differ");
  detail::check_assignment(sp, ga);
  const auto descriptors = compute_descriptors(img, sp, cfg);

  Sigrid sg;
  sg.spec = ga.spec;
  sg.config = cfg;
  sg.image_width = img.width();
  sg.image_height = img.height();
  for (const auto& [id, cell] : ga.assignments) {
    const auto& d = descriptors.at(id);
    sg.cells.emplace(cell, CellRecord{id, std::vector<float>(d.begin(), d.end())});
  }
  sg.region_map = detail::retained_region_map(sp, ga);
  return sg;
}

/// Dense channel-major tensor [d][row][col], zero at unassigned cells.
inline std::vector<float> dense_tensor(const Sigrid& sg) {
  const std::size_t plane = sg.spec.cell_count();
  std::vector<float> dense(static_cast<std::size_t>(sg.channels()) * plane, 0.0f);
  for (const auto& [cell, rec] : sg.cells) {
    const std::size_t offset = static_cast<std::size_t>(cell.row) * sg.spec.width + cell.col;
    for (std::size_t c = 0; c < rec.values.size(); ++c) dense[c * plane + offset] = rec.values[c];
  }
  return dense;
}

/// Reads the descriptor vectors of the given occupied cells back out of a
/// dense tensor.
inline std::map<Cell, std::vector<float>> sparsify(std::span<const float> dense,
                                                   const GridSpec& spec, int channels,
                                                   std::span<const Cell> occupied) {
  const std::size_t plane = spec.cell_count();
  require(dense.size() == plane * static_cast<std::size_t>(channels), "dense tensor size mismatch");
  std::map<Cell, std::vector<float>> out;
  for (const Cell& cell : occupied) {
    std::vector<float> v(static_cast<std::size_t>(channels));
    const std::size_t offset = static_cast<std::size_t>(cell.row) * spec.width + cell.col;
    for (int c = 0; c < channels; ++c) v[c] = dense[static_cast<std::size_t>(c) * plane + offset];
    out.emplace(cell, std::move(v));
  }
  return out;
}

/// Majority ground-truth label of each retained region at its cell.
inline CellLabelGrid rasterize_labels(const Mask& mask, const Superpixelation& sp,
                                      const GridAssignment& ga) {
  require(mask.width() == sp.width() && mask.height() == sp.height(),
          "mask and superpixelation dimensions differ");
  detail::check_assignment(sp, ga);
  const auto map = detail::retained_region_map(sp, ga);
  return detail::labels_to_grid(ga.spec, ga.assignments,
                                detail::modal_labels(map, mask.labels()));
}

inline std::map<RegionId, Cell> region_cells(const Sigrid& sg) {
  std::map<RegionId, Cell> out;
  for (const auto& [cell, rec] : sg.cells) out.emplace(rec.region, cell);
  return out;
}

inline CellLabelGrid rasterize_labels(const Mask& mask, const Sigrid& sg) {
  require(mask.width() == sg.image_width && mask.height() == sg.image_height,
          "mask and sigrid image dimensions differ");
  return detail::labels_to_grid(sg.spec, region_cells(sg),
                                detail::modal_labels(sg.region_map, mask.labels()));
}

/// Expands per-cell values to a per-pixel buffer through the region map.
template <typename T>
std::vector<T> backproject_values(std::span<const T> cell_values, const Sigrid& sg) {
  require(cell_values.size() == sg.spec.cell_count(), "cell value grid size mismatch");
  std::map<RegionId, T> per_region;
  for (const auto& [cell, rec] : sg.cells)
    per_region.emplace(rec.region,
                       cell_values[static_cast<std::size_t>(cell.row) * sg.spec.width + cell.col]);
  return detail::expand_to_pixels<T>(sg.region_map, sg.image_width, per_region);
}

/// Pixel mask from hard cell labels. Every populated cell must carry a label.
inline Mask backproject(const CellLabelGrid& cells, const Sigrid& sg) {
  require(cells.spec == sg.spec, "cell label grid does not match the sigrid grid");
  for (const auto& [cell, rec] : sg.cells)
    require(cells.at(cell) != kEmptyLabel, "populated cell has no label");
  return Mask(sg.image_width, sg.image_height,
              backproject_values<Label>(cells.labels, sg));
}

/// Pixel IoU reachable if every retained cell were classified perfectly.
inline double max_iou(const Mask& gt, const Superpixelation& sp, const GridAssignment& ga) {
  require(gt.width() == sp.width() && gt.height() == sp.height(),
          "mask and superpixelation dimensions differ");
  detail::check_assignment(sp, ga);
  const auto map = detail::retained_region_map(sp, ga);
  const auto labels = detail::modal_labels(map, gt.labels());
  const auto pixels = detail::expand_to_pixels<Label>(map, sp.width(), labels);
  return mean_iou(pixels, gt.labels());
}

inline double max_iou(const Mask& gt, const Sigrid& sg) {
  require(gt.width() == sg.image_width && gt.height() == sg.image_height,
          "mask and sigrid image dimensions differ");
  const auto labels = detail::modal_labels(sg.region_map, gt.labels());
  const auto pixels = detail::expand_to_pixels<Label>(sg.region_map, sg.image_width, labels);
  return mean_iou(pixels, gt.labels());
}

}  // namespace sigrid
