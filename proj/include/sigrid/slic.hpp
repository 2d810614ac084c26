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

// SLIC superpixels: local k-means in CIELAB + position with a compactness
// weight, followed by 4-connectivity enforcement.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "sigrid/error.hpp"
#include "sigrid/image.hpp"
#include "sigrid/union_find.hpp"

namespace sigrid {

struct SlicParams {
  int segments = 1500;
  double compactness = 20.0;
  int max_iterations = 10;
  bool enforce_connectivity = true;

  void validate() const {
    require(segments >= 1, "SLIC segments must be >= 1");
    require(compactness > 0.0, "SLIC compactness must be > 0");
    require(max_iterations >= 1, "SLIC max_iterations must be >= 1");
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

namespace detail {

using Lab = std::array<double, 3>;

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

/// sRGB in [0,1] to CIELAB under a D65 white point.
inline Lab srgb_to_lab(double r, double g, double b) {
  r = srgb_to_linear(r);
  g = srgb_to_linear(g);
  b = srgb_to_linear(b);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / 0.95047);
  const double fy = lab_f(y / 1.00000);
  const double fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline std::vector<Lab> to_lab(const Image& img) {
  std::vector<Lab> lab(img.pixel_count());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto c = img.rgb(x, y);
      lab[static_cast<std::size_t>(y) * img.width() + x] = srgb_to_lab(c[0], c[1], c[2]);
    }
  return lab;
}

inline double lab_dist2(const Lab& a, const Lab& b) {
  const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

struct Seed {
  Lab color;
  double x;
  double y;
};

// Seed lattice: roughly square cells of side s, grown along the coarser axis
// until there are at least K seeds.
inline std::pair<int, int> seed_lattice(int width, int height, int segments, double step) {
  int nx = std::max(1, static_cast<int>(std::lround(width / step)));
  int ny = std::max(1, static_cast<int>(std::lround(height / step)));
  nx = std::min(nx, width);
  ny = std::min(ny, height);
  while (static_cast<long>(nx) * ny < segments) {
    const bool grow_x = ny >= height ||
                        (nx < width && static_cast<double>(width) / nx >=
                                           static_cast<double>(height) / ny);
    if (grow_x) ++nx; else ++ny;
  }
  return {nx, ny};
}

inline std::vector<Seed> place_seeds(const std::vector<Lab>& lab, int width, int height,
                                     int segments, double step) {
  auto at = [&](int x, int y) -> const Lab& {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return lab[static_cast<std::size_t>(y) * width + x];
  };
  auto gradient = [&](int x, int y) {
    return lab_dist2(at(x + 1, y), at(x - 1, y)) + lab_dist2(at(x, y + 1), at(x, y - 1));
  };

  const auto [nx, ny] = seed_lattice(width, height, segments, step);
  std::vector<Seed> seeds;
  seeds.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int px = static_cast<int>((i + 0.5) * width / nx);
      int py = static_cast<int>((j + 0.5) * height / ny);
      int best_x = px, best_y = py;
      double best = gradient(px, py);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = px + dx, qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= width || qy >= height) continue;
          const double g = gradient(qx, qy);
          if (g < best) {
            best = g;
            best_x = qx;
            best_y = qy;
          }
        }
      seeds.push_back({at(best_x, best_y), static_cast<double>(best_x),
                       static_cast<double>(best_y)});
    }
  }
  return seeds;
}

// Merges every 4-connected component smaller than min_size into its largest
// adjacent component. Components are visited in first-pixel scan order; ties
// go to the component seen first. Returns root-based ids (not compacted).
inline std::vector<RegionId> enforce_connectivity(const std::vector<int>& labels, int width,
                                                  int height, double min_size) {
  const std::size_t n = labels.size();
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    std::size_t count = 0;
    comp[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      const int x = static_cast<int>(p % width), y = static_cast<int>(p / width);
      const std::size_t nbrs[4] = {p - 1, p + 1, p - width, p + width};
      const bool ok[4] = {x > 0, x + 1 < width, y > 0, y + 1 < height};
      for (int k = 0; k < 4; ++k) {
        if (!ok[k]) continue;
        const std::size_t q = nbrs[k];
        if (comp[q] < 0 && labels[q] == labels[p]) {
          comp[q] = id;
          stack.push_back(q);
        }
      }
    }
    comp_size.push_back(count);
  }

  const std::size_t m = comp_size.size();
  std::vector<std::vector<std::size_t>> adjacent(m);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * width + x;
      const auto a = static_cast<std::size_t>(comp[p]);
      if (x + 1 < width) {
        const auto b = static_cast<std::size_t>(comp[p + 1]);
        if (a != b) { adjacent[a].push_back(b); adjacent[b].push_back(a); }
      }
      if (y + 1 < height) {
        const auto b = static_cast<std::size_t>(comp[p + width]);
        if (a != b) { adjacent[a].push_back(b); adjacent[b].push_back(a); }
      }
    }
  for (auto& list : adjacent) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  UnionFind groups(comp_size);
  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t c = 0; c < m; ++c) members[c] = {c};

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < m; ++c) {
      if (groups.find(c) != c || static_cast<double>(groups.weight(c)) >= min_size) continue;
      std::size_t best = m;
      std::size_t best_size = 0;
      for (std::size_t member : members[c])
        for (std::size_t nb : adjacent[member]) {
          const std::size_t r = groups.find(nb);
          if (r == c) continue;
          const std::size_t sz = groups.weight(r);
          if (best == m || sz > best_size || (sz == best_size && r < best)) {
            best = r;
            best_size = sz;
          }
        }
      if (best == m) continue;
      groups.merge_into(c, best);
      auto& dst = members[best];
      dst.insert(dst.end(), members[c].begin(), members[c].end());
      members[c].clear();
      changed = true;
    }
  }

  std::vector<RegionId> out(n);
  for (std::size_t p = 0; p < n; ++p)
    out[p] = static_cast<RegionId>(groups.find(static_cast<std::size_t>(comp[p])) + 1);
  return out;
}

}  // namespace detail

/// Computes a SLIC superpixelation. The region count after connectivity
/// enforcement may differ from params.segments.
inline Superpixelation slic_segment(const Image& img, const SlicParams& params) {
  params.validate();
  const int width = img.width(), height = img.height();
  const std::size_t n = img.pixel_count();
  require(static_cast<std::size_t>(params.segments) <= n,
          "SLIC segments (" + std::to_string(params.segments) + ") exceed pixel count (" +
              std::to_string(n) + ")");

  const double step = std::sqrt(static_cast<double>(n) / params.segments);
  const auto lab = detail::to_lab(img);
  auto seeds = detail::place_seeds(lab, width, height, params.segments, step);
  const std::size_t k_count = seeds.size();
  const double spatial_weight = (params.compactness / step) * (params.compactness / step);

  std::vector<int> labels(n, -1);
  std::vector<double> dist(n);
  struct Accum {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
    std::size_t count = 0;
  };
  std::vector<Accum> acc(k_count);

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& seed = seeds[k];
      const int x0 = std::max(0, static_cast<int>(std::floor(seed.x - step)));
      const int x1 = std::min(width - 1, static_cast<int>(std::ceil(seed.x + step)));
      const int y0 = std::max(0, static_cast<int>(std::floor(seed.y - step)));
      const int y1 = std::min(height - 1, static_cast<int>(std::ceil(seed.y + step)));
      for (int y = y0; y <= y1; ++y) {
        const double dy = y - seed.y;
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * width + x;
          const double dx = x - seed.x;
          const double d = detail::lab_dist2(lab[p], seed.color) +
                           (dx * dx + dy * dy) * spatial_weight;
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = static_cast<int>(k);
          }
        }
      }
    }

    // Pixels outside every window keep their previous label; on the first
    // pass they fall back to the spatially nearest seed.
    for (std::size_t p = 0; p < n; ++p) {
      if (labels[p] >= 0) continue;
      const double px = static_cast<double>(p % width), py = static_cast<double>(p / width);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < k_count; ++k) {
        const double d = (px - seeds[k].x) * (px - seeds[k].x) + (py - seeds[k].y) * (py - seeds[k].y);
        if (d < best) {
          best = d;
          labels[p] = static_cast<int>(k);
        }
      }
    }

    std::fill(acc.begin(), acc.end(), Accum{});
    for (std::size_t p = 0; p < n; ++p) {
      auto& a = acc[static_cast<std::size_t>(labels[p])];
      a.l += lab[p][0];
      a.a += lab[p][1];
      a.b += lab[p][2];
      a.x += static_cast<double>(p % width);
      a.y += static_cast<double>(p / width);
      ++a.count;
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& a = acc[k];
      if (a.count == 0) continue;
      const double inv = 1.0 / static_cast<double>(a.count);
      seeds[k] = {{a.l * inv, a.a * inv, a.b * inv}, a.x * inv, a.y * inv};
    }
  }

  std::vector<RegionId> ids;
  if (params.enforce_connectivity) {
    ids = detail::enforce_connectivity(labels, width, height, step * step / 4.0);
  } else {
    ids.resize(n);
    for (std::size_t p = 0; p < n; ++p) ids[p] = static_cast<RegionId>(labels[p] + 1);
  }
  return relabel_compact(Superpixelation(width, height, std::move(ids)));
}

/// Per-id centroid table (index 0 and absent ids hold NaN). Centroids use
/// the pixel-center convention (x + 0.5, y + 0.5).
inline std::vector<Point2> centroid_table(std::span<const RegionId> ids, int width,
                                          RegionId max_id) {
  std::vector<double> sx(max_id + 1, 0.0), sy(max_id + 1, 0.0);
  std::vector<std::size_t> count(max_id + 1, 0);
  for (std::size_t p = 0; p < ids.size(); ++p) {
    const RegionId id = ids[p];
    sx[id] += static_cast<double>(p % width) + 0.5;
    sy[id] += static_cast<double>(p / width) + 0.5;
    ++count[id];
  }
  std::vector<Point2> out(max_id + 1, {std::numeric_limits<double>::quiet_NaN(),
                                       std::numeric_limits<double>::quiet_NaN()});
  for (RegionId id = 0; id <= max_id; ++id)
    if (count[id] > 0)
      out[id] = {sx[id] / static_cast<double>(count[id]), sy[id] / static_cast<double>(count[id])};
  return out;
}

inline std::map<RegionId, Point2> superpixel_centroids(const Superpixelation& sp) {
  const auto table = centroid_table(sp.ids(), sp.width(), sp.max_id());
  const auto areas = region_areas(sp);
  std::map<RegionId, Point2> out;
  for (RegionId id = 1; id <= sp.max_id(); ++id)
    if (areas[id] > 0) out.emplace(id, table[id]);
  return out;
}

}  // namespace sigrid
