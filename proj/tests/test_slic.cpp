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

#include <gtest/gtest.h>

#include <queue>
#include <random>
#include <set>

#include "sigrid/slic.hpp"
#include "sigrid/synthetic.hpp"
#include "support/oracles.hpp"

namespace sigrid {
namespace {

// Every id forms one 4-connected component.
bool regions_connected(const Superpixelation& sp) {
  const int w = sp.width(), h = sp.height();
  std::vector<char> seen(sp.pixel_count(), 0);
  std::set<RegionId> started;
  for (std::size_t s = 0; s < sp.pixel_count(); ++s) {
    if (seen[s]) continue;
    const RegionId id = sp.ids()[s];
    if (!started.insert(id).second) return false;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
      const int nx[4] = {x - 1, x + 1, x, x}, ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const std::size_t r = static_cast<std::size_t>(ny[k]) * w + nx[k];
        if (!seen[r] && sp.ids()[r] == id) {
          seen[r] = 1;
          q.push(r);
        }
      }
    }
  }
  return true;
}

Image uniform_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < w * h; ++i) bytes.insert(bytes.end(), {r, g, b});
  return Image::from_bytes(3, w, h, bytes);
}

TEST(Lab, ReferenceColors) {
  const auto white = detail::srgb_to_lab(1, 1, 1);
  EXPECT_NEAR(white[0], 100.0, 1e-3);
  EXPECT_NEAR(white[1], 0.0, 1e-3);
  EXPECT_NEAR(white[2], 0.0, 1e-3);
  const auto black = detail::srgb_to_lab(0, 0, 0);
  EXPECT_NEAR(black[0], 0.0, 1e-9);
  // sRGB red, D65: L 53.24, a 80.09, b 67.20.
  const auto red = detail::srgb_to_lab(1, 0, 0);
  EXPECT_NEAR(red[0], 53.24, 0.02);
  EXPECT_NEAR(red[1], 80.09, 0.05);
  EXPECT_NEAR(red[2], 67.20, 0.05);
}

TEST(Slic, PartitionAndConnectivity) {
  const auto scene = synthesize_scene(4);
  const auto sp = slic_segment(scene.image, {});
  EXPECT_TRUE(sp.is_compact());
  EXPECT_EQ(sp.width(), scene.image.width());
  EXPECT_TRUE(regions_connected(sp));
  // Region count stays near the request.
  EXPECT_GE(sp.region_count(), 750u);
  EXPECT_LE(sp.region_count(), 2250u);
}

TEST(Slic, Deterministic) {
  const auto scene = synthesize_scene(9);
  SlicParams p;
  p.segments = 300;
  EXPECT_EQ(slic_segment(scene.image, p), slic_segment(scene.image, p));
}

TEST(Slic, UniformImageIgnoresCompactness) {
  const Image img = uniform_image(90, 70, 120, 40, 200);
  SlicParams p;
  p.segments = 40;
  p.compactness = 1;
  const auto a = slic_segment(img, p);
  for (double m : {5.0, 20.0, 80.0}) {
    p.compactness = m;
    EXPECT_EQ(slic_segment(img, p), a) << m;
  }
  EXPECT_TRUE(regions_connected(a));
}

TEST(Slic, SingleSegment) {
  const Image img = uniform_image(16, 12, 1, 2, 3);
  SlicParams p;
  p.segments = 1;
  const auto sp = slic_segment(img, p);
  EXPECT_EQ(sp.region_count(), 1u);
}

TEST(Slic, RandomNoiseStaysValid) {
  std::mt19937_64 rng(2);
  const Image img = testing::random_image(rng, 61, 47);
  SlicParams p;
  p.segments = 50;
  const auto sp = slic_segment(img, p);
  EXPECT_TRUE(sp.is_compact());
  EXPECT_TRUE(regions_connected(sp));
}

TEST(Slic, GrayscaleInput) {
  std::mt19937_64 rng(6);
  const Image img = testing::random_image(rng, 40, 30, 1);
  SlicParams p;
  p.segments = 12;
  EXPECT_TRUE(regions_connected(slic_segment(img, p)));
}

TEST(Slic, InvalidParams) {
  const Image img = uniform_image(8, 8, 0, 0, 0);
  SlicParams p;
  p.segments = 65;
  EXPECT_THROW(slic_segment(img, p), Error);
  p.segments = 0;
  EXPECT_THROW(slic_segment(img, p), Error);
  p.segments = 4;
  p.compactness = 0;
  EXPECT_THROW(slic_segment(img, p), Error);
}

TEST(SeedLattice, CoversRequest) {
  for (auto [w, h, k] : std::vector<std::array<int, 3>>{{400, 320, 1500}, {375, 310, 1500},
                                                        {10, 100, 7}, {33, 33, 1}}) {
    const double s = std::sqrt(static_cast<double>(w) * h / k);
    const auto [nx, ny] = detail::seed_lattice(w, h, k, s);
    EXPECT_GE(nx * ny, k);
    EXPECT_GE(nx, 1);
    EXPECT_GE(ny, 1);
  }
}

TEST(Centroids, PixelCenterConvention) {
  // Region 1 = {(0,0),(1,0)}, region 2 = (3,4) alone, region 3 everything else.
  std::vector<RegionId> ids(5 * 6, 3);
  ids[0] = ids[1] = 1;
  ids[4 * 5 + 3] = 2;
  const auto c = superpixel_centroids(Superpixelation(5, 6, ids));
  EXPECT_EQ(c.at(1), (Point2{1.0, 0.5}));
  EXPECT_EQ(c.at(2), (Point2{3.5, 4.5}));
  const auto full = superpixel_centroids(Superpixelation(2, 2, {1, 1, 1, 1}));
  EXPECT_EQ(full.at(1), (Point2{1.0, 1.0}));
}

TEST(Centroids, TableMarksAbsentIds) {
  const auto t = centroid_table(std::vector<RegionId>{1, 1, 4, 4}, 2, 4);
  EXPECT_TRUE(std::isnan(t[2].x));
  EXPECT_EQ(t[4], (Point2{1.0, 1.5}));
}

}  // namespace
}  // namespace sigrid
