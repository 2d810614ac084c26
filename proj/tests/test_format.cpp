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

#include <random>

#include "sigrid/format.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace sigrid {
namespace {

using Bytes = std::vector<std::uint8_t>;

// 2x1 image, 2x1 grid, area-only descriptor, pixel 1 discarded.
SgrdFile tiny_file() {
  SgrdFile f;
  f.sigrid.spec = {2, 1};
  f.sigrid.config = DescriptorConfig::parse("a");
  f.sigrid.image_width = 2;
  f.sigrid.image_height = 1;
  f.sigrid.cells[{0, 0}] = CellRecord{1, {0.5f}};
  f.sigrid.region_map = {1, 0};
  CellLabelGrid labels(f.sigrid.spec);
  labels.at({0, 0}) = 1;
  f.labels = labels;
  return f;
}

const Bytes kTinyGolden = {
    'S', 'G', 'R', 'D',
    0x01, 0x00,                    // version
    0x01, 0x00,                    // flags: labels
    0x02, 0x00, 0x00, 0x00,        // image width
    0x01, 0x00, 0x00, 0x00,        // image height
    0x02, 0x00, 0x01, 0x00,        // grid
    0x01, 0x00,                    // channels
    0x01, 0x00, 0x00, 0x00,        // retained
    0x02, 0x00,                    // descriptor mask
    0x00, 0x00, 0x00, 0x00,        // row, col
    0x01, 0x00, 0x00, 0x00,        // region
    0x00, 0x00, 0x00, 0x3f,        // 0.5f
    0x01,                          // label
    0x02, 0x00, 0x00, 0x00,        // runs
    0x01, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
};

SgrdFile random_file(std::mt19937_64& rng, bool labels) {
  const int w = 20 + static_cast<int>(rng() % 40), h = 20 + static_cast<int>(rng() % 40);
  const auto sp = testing::random_superpixelation(rng, w, h, 20);
  const GridSpec spec{1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 9)};
  const auto m = map_to_grid(sp, spec);
  const auto cfg = DescriptorConfig::from_bitmask(static_cast<std::uint16_t>(1 + rng() % 255));
  SgrdFile f;
  f.sigrid = build_sigrid(testing::random_image(rng, w, h), m.merged, m.assignment, cfg);
  if (labels) {
    Mask gt(w, h);
    for (auto& l : gt.labels()) l = rng() & 1;
    f.labels = rasterize_labels(gt, m.merged, m.assignment);
  }
  return f;
}

TEST(Rle, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RegionId> ids(1 + rng() % 200);
    for (auto& id : ids) id = static_cast<RegionId>(rng() % 3);
    const auto runs = rle_encode(ids);
    for (std::size_t i = 1; i < runs.size(); ++i) EXPECT_NE(runs[i].id, runs[i - 1].id);
    EXPECT_EQ(rle_decode(runs, ids.size()), ids);
  }
  EXPECT_THROW(rle_decode(std::vector<sigrid::Run>{{3, 1}}, 2), Error);
  EXPECT_THROW(rle_decode(std::vector<sigrid::Run>{{1, 1}}, 2), Error);
  EXPECT_THROW(rle_decode(std::vector<sigrid::Run>{{0, 1}, {2, 1}}, 2), Error);
}

TEST(Sgrd, GoldenBytes) {
  EXPECT_EQ(encode_sgrd(tiny_file()), kTinyGolden);
  EXPECT_EQ(decode_sgrd(kTinyGolden), tiny_file());
}

TEST(Sgrd, NoLabelSection) {
  SgrdFile f = tiny_file();
  f.labels.reset();
  const auto bytes = encode_sgrd(f);
  EXPECT_EQ(bytes.size(), kTinyGolden.size() - 1);
  EXPECT_EQ(bytes[6], 0);
  EXPECT_FALSE(decode_sgrd(bytes).labels.has_value());
}

TEST(Sgrd, RandomRoundTripBitExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_file(rng, trial % 2 == 0);
    const auto bytes = encode_sgrd(f);
    const auto back = decode_sgrd(bytes);
    EXPECT_EQ(back, f);
    EXPECT_EQ(encode_sgrd(back), bytes);
  }
}

TEST(Sgrd, FileRoundTripAndHeader) {
  testing::TempDir dir("sgrd");
  std::mt19937_64 rng(4);
  const auto f = random_file(rng, true);
  write_sgrd(dir / "x.sgrd", f);
  EXPECT_EQ(read_sgrd(dir / "x.sgrd"), f);
  const auto h = read_sgrd_header(dir / "x.sgrd");
  EXPECT_EQ(h.version, kSgrdVersion);
  EXPECT_EQ(h.flags, kSgrdFlagLabels);
  EXPECT_EQ(h.image_width, static_cast<std::uint32_t>(f.sigrid.image_width));
  EXPECT_EQ(h.grid_width, f.sigrid.spec.width);
  EXPECT_EQ(h.grid_height, f.sigrid.spec.height);
  EXPECT_EQ(h.channels, f.sigrid.channels());
  EXPECT_EQ(h.retained, f.sigrid.cells.size());
  EXPECT_EQ(h.descriptor_mask, f.sigrid.config.bitmask());
}

TEST(Sgrd, RejectsCorruption) {
  auto expect_format_error = [](const Bytes& b) {
    try {
      decode_sgrd(b);
      ADD_FAILURE() << "accepted corrupt bytes";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    }
  };
  Bytes b = kTinyGolden;
  b[0] = 'X';
  expect_format_error(b);
  b = kTinyGolden;
  b[4] = 9;  // version
  expect_format_error(b);
  b = kTinyGolden;
  b[6] = 3;  // unknown flag
  expect_format_error(b);
  b = kTinyGolden;
  b[20] = 2;  // channels vs mask
  expect_format_error(b);
  b = kTinyGolden;
  b[40] = kEmptyLabel;
  expect_format_error(b);
  b = kTinyGolden;
  b.push_back(0);
  expect_format_error(b);
  for (std::size_t n = 0; n < kTinyGolden.size(); ++n)
    expect_format_error(Bytes(kTinyGolden.begin(), kTinyGolden.begin() + static_cast<long>(n)));
  b = kTinyGolden;
  b[49] = 7;  // region map references an unknown region
  expect_format_error(b);
}

TEST(Sgrd, RejectsUnsortedRecords) {
  SgrdFile f = tiny_file();
  f.labels.reset();
  f.sigrid.image_width = 2;
  f.sigrid.cells[{0, 1}] = CellRecord{2, {0.25f}};
  f.sigrid.region_map = {1, 2};
  Bytes b = encode_sgrd(f);
  // Swap the two 12-byte records.
  const std::size_t start = 28;
  std::swap_ranges(b.begin() + start, b.begin() + start + 12, b.begin() + start + 12);
  EXPECT_THROW(decode_sgrd(b), Error);
}

TEST(Sgrd, EncodeRejectsEmptyLabelOnRetainedCell) {
  SgrdFile f = tiny_file();
  f.labels->at({0, 0}) = kEmptyLabel;
  EXPECT_THROW(encode_sgrd(f), Error);
}

TEST(Sgpd, GoldenBytes) {
  CellPrediction p{{2, 1}, {0.25f, 1.0f}, {0, 1}};
  const Bytes golden = {'S', 'G', 'P', 'D', 0x02, 0x00, 0x01, 0x00, 0x00, 0x00, 0x80, 0x3e,
                        0x00, 0x00, 0x80, 0x3f, 0x00, 0x01};
  EXPECT_EQ(encode_sgpd(p), golden);
  EXPECT_EQ(decode_sgpd(golden), p);
  Bytes trailing = golden;
  trailing.push_back(1);
  EXPECT_THROW(decode_sgpd(trailing), Error);
  EXPECT_THROW(decode_sgpd(Bytes(golden.begin(), golden.end() - 1)), Error);
}

TEST(Sgpd, FromLabels) {
  CellLabelGrid g({3, 1});
  g.at({0, 1}) = 1;
  g.at({0, 2}) = 0;
  const auto p = prediction_from_labels(g);
  EXPECT_EQ(p.labels, (std::vector<Label>{0, 1, 0}));
  EXPECT_EQ(p.scores, (std::vector<float>{0, 1, 0}));
  testing::TempDir dir("sgpd");
  write_sgpd(dir / "p.sgpd", p);
  EXPECT_EQ(read_sgpd(dir / "p.sgpd"), p);
}

}  // namespace
}  // namespace sigrid
