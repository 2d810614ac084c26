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

// On-disk formats.
//
// SGRD (Sigrid file), little-endian:
//   "SGRD" | version u16 = 1 | flags u16 (bit0 = labels present)
//   image w u32 | image h u32 | grid w' u16 | grid h' u16 | channels d u16
//   retained count u32 | descriptor bitmask u16
//   retained records sorted by (row, col):
//     row u16 | col u16 | region id u32 | d x f32
//   [labels: retained count x u8, same order; 255 never appears]
//   RLE region map: run count u32, then (length u32, region id u32) pairs
//     covering w*h pixels row-major; id 0 marks discarded pixels.
//
// SGPD (cell predictions): "SGPD" | w' u16 | h' u16 | w'*h' f32 scores
//   row-major | w'*h' u8 hard labels.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigrid/descriptors.hpp"
#include "sigrid/error.hpp"
#include "sigrid/sigrid.hpp"

namespace sigrid {

static_assert(std::endian::native == std::endian::little,
              "SGRD/SGPD serialization assumes a little-endian host");

inline constexpr std::uint16_t kSgrdVersion = 1;
inline constexpr std::uint16_t kSgrdFlagLabels = 1;

struct Run {
  std::uint32_t length = 0;
  RegionId id = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

inline std::vector<Run> rle_encode(std::span<const RegionId> ids) {
  std::vector<Run> runs;
  for (RegionId id : ids) {
    if (!runs.empty() && runs.back().id == id) {
      ++runs.back().length;
    } else {
      runs.push_back({1, id});
    }
  }
  return runs;
}

inline std::vector<RegionId> rle_decode(std::span<const Run> runs, std::size_t expected) {
  std::vector<RegionId> ids;
  ids.reserve(expected);
  for (const Run& run : runs) {
    if (run.length == 0 || run.length > expected - ids.size())
      fail(ErrorKind::kFormat, "RLE runs do not cover the image exactly");
    ids.insert(ids.end(), run.length, run.id);
  }
  if (ids.size() != expected) fail(ErrorKind::kFormat, "RLE runs do not cover the image exactly");
  return ids;
}

namespace detail {

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_magic(const char (&magic)[5]) { bytes_.insert(bytes_.end(), magic, magic + 4); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void expect_magic(const char (&magic)[5]) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0)
      fail(ErrorKind::kFormat, name_ + ": bad magic, expected " + std::string(magic, 4));
    pos_ += 4;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) fail(ErrorKind::kFormat, name_ + ": truncated file");
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string name_;
};

inline void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace detail

/// Contents of one SGRD file.
struct SgrdFile {
  Sigrid sigrid;
  std::optional<CellLabelGrid> labels;
  friend bool operator==(const SgrdFile&, const SgrdFile&) = default;
};

/// Header fields as stored on disk.
struct SgrdHeader {
  std::uint16_t version = kSgrdVersion;
  std::uint16_t flags = 0;
  std::uint32_t image_width = 0;
  std::uint32_t image_height = 0;
  std::uint16_t grid_width = 0;
  std::uint16_t grid_height = 0;
  std::uint16_t channels = 0;
  std::uint32_t retained = 0;
  std::uint16_t descriptor_mask = 0;
  friend bool operator==(const SgrdHeader&, const SgrdHeader&) = default;
};

inline std::vector<std::uint8_t> encode_sgrd(const SgrdFile& file) {
  const Sigrid& sg = file.sigrid;
  sg.validate();
  detail::ByteWriter w;
  w.put_magic("SGRD");
  w.put<std::uint16_t>(kSgrdVersion);
  w.put<std::uint16_t>(file.labels ? kSgrdFlagLabels : 0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sg.image_width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sg.image_height));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(sg.spec.width));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(sg.spec.height));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(sg.channels()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sg.cells.size()));
  w.put<std::uint16_t>(sg.config.bitmask());
  // std::map<Cell, ...> iterates in (row, col) order.
  for (const auto& [cell, rec] : sg.cells) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(cell.row));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(cell.col));
    w.put<std::uint32_t>(rec.region);
    for (float v : rec.values) w.put<float>(v);
  }
  if (file.labels) {
    require(file.labels->spec == sg.spec, "label grid does not match the sigrid grid");
    for (const auto& [cell, rec] : sg.cells) {
      const Label l = file.labels->at(cell);
      require(l != kEmptyLabel, "retained cell has an EMPTY label");
      w.put<std::uint8_t>(l);
    }
  }
  const auto runs = rle_encode(sg.region_map);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(runs.size()));
  for (const Run& r : runs) {
    w.put<std::uint32_t>(r.length);
    w.put<std::uint32_t>(r.id);
  }
  return w.take();
}

inline SgrdHeader read_sgrd_header(detail::ByteReader& r) {
  r.expect_magic("SGRD");
  SgrdHeader h;
  h.version = r.get<std::uint16_t>();
  if (h.version != kSgrdVersion)
    fail(ErrorKind::kFormat, "unsupported SGRD version " + std::to_string(h.version));
  h.flags = r.get<std::uint16_t>();
  h.image_width = r.get<std::uint32_t>();
  h.image_height = r.get<std::uint32_t>();
  h.grid_width = r.get<std::uint16_t>();
  h.grid_height = r.get<std::uint16_t>();
  h.channels = r.get<std::uint16_t>();
  h.retained = r.get<std::uint32_t>();
  h.descriptor_mask = r.get<std::uint16_t>();
  return h;
}

inline SgrdFile decode_sgrd(std::span<const std::uint8_t> bytes, const std::string& name = "SGRD") {
  detail::ByteReader r(bytes, name);
  const SgrdHeader h = read_sgrd_header(r);
  auto corrupt = [&](const std::string& why) { fail(ErrorKind::kFormat, name + ": " + why); };
  if ((h.flags & ~kSgrdFlagLabels) != 0) corrupt("unknown flag bits");
  if (h.image_width == 0 || h.image_height == 0 || h.grid_width == 0 || h.grid_height == 0)
    corrupt("zero dimension in header");
  if ((h.descriptor_mask & ~0xFFu) != 0 || h.descriptor_mask == 0) corrupt("bad descriptor mask");

  SgrdFile file;
  Sigrid& sg = file.sigrid;
  sg.spec = {h.grid_width, h.grid_height};
  sg.config = DescriptorConfig::from_bitmask(h.descriptor_mask);
  if (sg.channels() != h.channels) corrupt("channel count disagrees with descriptor mask");
  sg.image_width = static_cast<int>(h.image_width);
  sg.image_height = static_cast<int>(h.image_height);

  if (h.retained > sg.spec.cell_count()) corrupt("more records than grid cells");
  r.need(static_cast<std::size_t>(h.retained) * (8 + 4 * static_cast<std::size_t>(h.channels)));
  std::vector<Cell> order;
  order.reserve(h.retained);
  for (std::uint32_t i = 0; i < h.retained; ++i) {
    Cell cell{r.get<std::uint16_t>(), r.get<std::uint16_t>()};
    CellRecord rec;
    rec.region = r.get<std::uint32_t>();
    rec.values.resize(h.channels);
    for (auto& v : rec.values) v = r.get<float>();
    if (!order.empty() && !(order.back() < cell)) corrupt("records not sorted by (row, col)");
    order.push_back(cell);
    sg.cells.emplace(cell, std::move(rec));
  }
  if (h.flags & kSgrdFlagLabels) {
    CellLabelGrid labels(sg.spec);
    for (const Cell& cell : order) {
      const auto l = r.get<std::uint8_t>();
      if (l == kEmptyLabel) corrupt("EMPTY label on a retained cell");
      labels.at(cell) = l;
    }
    file.labels = std::move(labels);
  }
  const auto run_count = r.get<std::uint32_t>();
  r.need(static_cast<std::size_t>(run_count) * 8);
  std::vector<Run> runs(run_count);
  for (Run& run : runs) {
    run.length = r.get<std::uint32_t>();
    run.id = r.get<std::uint32_t>();
  }
  if (r.remaining() != 0) corrupt("trailing bytes after region map");
  sg.region_map = rle_decode(runs, static_cast<std::size_t>(sg.image_width) * sg.image_height);
  try {
    sg.validate();
  } catch (const Error& e) {
    corrupt(e.what());
  }
  return file;
}

inline void write_sgrd(const std::filesystem::path& path, const SgrdFile& file) {
  detail::write_bytes(path, encode_sgrd(file));
}

inline SgrdFile read_sgrd(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return decode_sgrd(bytes, path.string());
}

inline SgrdHeader read_sgrd_header(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes, path.string());
  return read_sgrd_header(r);
}

/// Per-cell model output: scores in [0,1] and hard labels.
struct CellPrediction {
  GridSpec spec;
  std::vector<float> scores;
  std::vector<Label> labels;

  /// Hard labels as a CellLabelGrid.
  CellLabelGrid label_grid() const {
    CellLabelGrid grid(spec);
    grid.labels = labels;
    return grid;
  }
  friend bool operator==(const CellPrediction&, const CellPrediction&) = default;
};

/// Prediction whose scores are its hard labels (EMPTY cells become 0).
inline CellPrediction prediction_from_labels(const CellLabelGrid& grid) {
  CellPrediction p{grid.spec, std::vector<float>(grid.labels.size()), grid.labels};
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    if (p.labels[i] == kEmptyLabel) p.labels[i] = 0;
    p.scores[i] = static_cast<float>(p.labels[i]);
  }
  return p;
}

inline std::vector<std::uint8_t> encode_sgpd(const CellPrediction& pred) {
  pred.spec.validate();
  require(pred.scores.size() == pred.spec.cell_count() && pred.labels.size() == pred.spec.cell_count(),
          "prediction arrays do not match the grid size");
  detail::ByteWriter w;
  w.put_magic("SGPD");
  w.put<std::uint16_t>(static_cast<std::uint16_t>(pred.spec.width));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(pred.spec.height));
  for (float s : pred.scores) w.put<float>(s);
  for (Label l : pred.labels) w.put<std::uint8_t>(l);
  return w.take();
}

inline CellPrediction decode_sgpd(std::span<const std::uint8_t> bytes,
                                  const std::string& name = "SGPD") {
  detail::ByteReader r(bytes, name);
  r.expect_magic("SGPD");
  CellPrediction p;
  p.spec.width = r.get<std::uint16_t>();
  p.spec.height = r.get<std::uint16_t>();
  if (p.spec.width == 0 || p.spec.height == 0) fail(ErrorKind::kFormat, name + ": zero grid size");
  const std::size_t n = p.spec.cell_count();
  r.need(n * 5);
  p.scores.resize(n);
  p.labels.resize(n);
  for (float& s : p.scores) s = r.get<float>();
  for (Label& l : p.labels) l = r.get<std::uint8_t>();
  if (r.remaining() != 0) fail(ErrorKind::kFormat, name + ": trailing bytes");
  return p;
}

inline void write_sgpd(const std::filesystem::path& path, const CellPrediction& pred) {
  detail::write_bytes(path, encode_sgpd(pred));
}

inline CellPrediction read_sgpd(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return decode_sgpd(bytes, path.string());
}

}  // namespace sigrid
