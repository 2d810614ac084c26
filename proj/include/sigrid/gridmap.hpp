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

// Mapping superpixels onto a fixed w' x h' grid.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <unordered_map>
#include <vector>

#include "sigrid/error.hpp"
#include "sigrid/image.hpp"
#include "sigrid/slic.hpp"
#include "sigrid/union_find.hpp"

namespace sigrid {

struct GridSpec {
  int width = 80;   // w' (columns)
  int height = 80;  // h' (rows)

  void validate() const {
    require(width >= 1 && height >= 1, "grid dimensions must be >= 1");
    require(width <= 65535 && height <= 65535, "grid dimensions must fit in 16 bits");
  }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(width) * height; }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Half-open cell intervals, clamped at the right/bottom edge.
inline Cell cell_of(const Point2& centroid, int image_width, int image_height,
                    const GridSpec& spec) {
  const int row = static_cast<int>(std::floor(centroid.y * spec.height / image_height));
  const int col = static_cast<int>(std::floor(centroid.x * spec.width / image_width));
  return {std::clamp(row, 0, spec.height - 1), std::clamp(col, 0, spec.width - 1)};
}

/// Merge distance tau = max(h, w) / max(w', h').
inline double merge_threshold(int image_width, int image_height, const GridSpec& spec) {
  return static_cast<double>(std::max(image_width, image_height)) /
         static_cast<double>(std::max(spec.width, spec.height));
}

struct MergeResult {
  Superpixelation merged;
  // Indexed by pre-merge id; 0 for ids that did not occur.
  std::vector<RegionId> pre_to_post;
  // Pre-merge id sets that were united (only groups with more than one id).
  std::vector<std::vector<RegionId>> groups;
};

/// Unites every centroid pair closer than tau, transitively, in a single
/// pass; the result is relabeled compactly in scan order.
inline MergeResult merge_close_centroids_detailed(const Superpixelation& sp,
                                                  const GridSpec& spec) {
  spec.validate();
  const double tau = merge_threshold(sp.width(), sp.height(), spec);
  const auto centroids = centroid_table(sp.ids(), sp.width(), sp.max_id());
  const auto areas = region_areas(sp);

  // Bucket centroids by tau-sized tiles so only neighboring tiles are compared.
  const auto tile = [tau](double v) { return static_cast<long long>(std::floor(v / tau)); };
  std::map<std::pair<long long, long long>, std::vector<RegionId>> tiles;
  for (RegionId id = 1; id <= sp.max_id(); ++id)
    if (areas[id] > 0) tiles[{tile(centroids[id].x), tile(centroids[id].y)}].push_back(id);

  detail::UnionFind groups(static_cast<std::size_t>(sp.max_id()) + 1);
  for (const auto& [key, members] : tiles) {
    for (long long dy = -1; dy <= 1; ++dy)
      for (long long dx = -1; dx <= 1; ++dx) {
        const auto it = tiles.find({key.first + dx, key.second + dy});
        if (it == tiles.end()) continue;
        for (RegionId a : members)
          for (RegionId b : it->second) {
            if (b <= a) continue;
            const double ddx = centroids[a].x - centroids[b].x;
            const double ddy = centroids[a].y - centroids[b].y;
            if (std::sqrt(ddx * ddx + ddy * ddy) < tau) groups.unite(a, b);
          }
      }
  }

  std::vector<RegionId> rooted(sp.pixel_count());
  for (std::size_t p = 0; p < rooted.size(); ++p)
    rooted[p] = static_cast<RegionId>(groups.find(sp.ids()[p]));
  MergeResult result{relabel_compact(Superpixelation(sp.width(), sp.height(), std::move(rooted))),
                     std::vector<RegionId>(static_cast<std::size_t>(sp.max_id()) + 1, 0),
                     {}};

  std::map<RegionId, std::vector<RegionId>> by_post;
  for (std::size_t p = 0; p < sp.pixel_count(); ++p)
    result.pre_to_post[sp.ids()[p]] = result.merged.ids()[p];
  for (RegionId id = 1; id <= sp.max_id(); ++id)
    if (areas[id] > 0) by_post[result.pre_to_post[id]].push_back(id);
  for (auto& [post, pre] : by_post)
    if (pre.size() > 1) result.groups.push_back(std::move(pre));
  return result;
}

inline Superpixelation merge_close_centroids(const Superpixelation& sp, const GridSpec& spec) {
  return merge_close_centroids_detailed(sp, spec).merged;
}

struct GridAssignment {
  GridSpec spec;
  std::map<RegionId, Cell> assignments;             // retained region -> cell
  std::vector<std::vector<RegionId>> merged_groups;  // pre-merge ids
  std::vector<RegionId> discarded;                   // sorted
  std::size_t region_count = 0;                      // post-merge K
  double collision_rate = 0.0;

  std::size_t retained_count() const noexcept { return assignments.size(); }
  bool is_retained(RegionId id) const { return assignments.contains(id); }
};

namespace detail {

struct RegionSummary {
  RegionId id;
  std::size_t area;
  Point2 centroid;
};

inline std::vector<RegionSummary> summarize_regions(const Superpixelation& sp) {
  const auto centroids = centroid_table(sp.ids(), sp.width(), sp.max_id());
  const auto areas = region_areas(sp);
  std::vector<RegionSummary> out;
  for (RegionId id = 1; id <= sp.max_id(); ++id)
    if (areas[id] > 0) out.push_back({id, areas[id], centroids[id]});
  return out;
}

inline GridAssignment assign_summaries(const std::vector<RegionSummary>& regions, int width,
                                       int height, const GridSpec& spec) {
  GridAssignment ga;
  ga.spec = spec;
  ga.region_count = regions.size();
  std::map<Cell, const RegionSummary*> owner;
  for (const auto& r : regions) {
    const Cell cell = cell_of(r.centroid, width, height, spec);
    auto [it, inserted] = owner.try_emplace(cell, &r);
    if (inserted) continue;
    // Larger area wins; regions arrive in id order so ties keep the lower id.
    if (r.area > it->second->area) {
      ga.discarded.push_back(it->second->id);
      it->second = &r;
    } else {
      ga.discarded.push_back(r.id);
    }
  }
  for (const auto& [cell, r] : owner) ga.assignments.emplace(r->id, cell);
  std::sort(ga.discarded.begin(), ga.discarded.end());
  ga.collision_rate = regions.empty() ? 0.0
                                      : static_cast<double>(ga.discarded.size()) /
                                            static_cast<double>(regions.size());
  return ga;
}

}  // namespace detail

/// Assigns every region to the cell holding its centroid; on collisions only
/// the largest region survives (ties toward the lower id).
inline GridAssignment assign_cells(const Superpixelation& sp, const GridSpec& spec) {
  spec.validate();
  return detail::assign_summaries(detail::summarize_regions(sp), sp.width(), sp.height(), spec);
}

/// Smallest n <= max_cells such that an n x n grid has no collisions,
/// scanning up from ceil(sqrt(K)); max_cells if there is none.
inline GridSpec min_collision_free_grid(const Superpixelation& sp, int max_cells) {
  require(max_cells >= 1, "max_cells must be >= 1");
  const auto regions = detail::summarize_regions(sp);
  int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(regions.size()))));
  for (n = std::max(n, 1); n <= max_cells; ++n) {
    const GridSpec spec{n, n};
    std::vector<Cell> cells;
    cells.reserve(regions.size());
    for (const auto& r : regions) cells.push_back(cell_of(r.centroid, sp.width(), sp.height(), spec));
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) == cells.end()) return spec;
  }
  return {max_cells, max_cells};
}

struct GridMapping {
  Superpixelation merged;
  GridAssignment assignment;
};

/// Tau-merge followed by cell assignment; merge provenance is recorded in
/// the assignment's merged_groups.
inline GridMapping map_to_grid(const Superpixelation& sp, const GridSpec& spec) {
  auto merge = merge_close_centroids_detailed(sp, spec);
  GridAssignment ga = assign_cells(merge.merged, spec);
  ga.merged_groups = std::move(merge.groups);
  return {std::move(merge.merged), std::move(ga)};
}

}  // namespace sigrid
