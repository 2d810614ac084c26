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

// Raster types shared by every stage of the pipeline, plus PNG/PNM I/O.
//
// Coordinates follow one convention everywhere: x is the column, y is the
// row, the origin is the top-left pixel, and buffers are row-major.

#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigrid/error.hpp"

namespace sigrid {

using RegionId = std::uint32_t;
using Label = std::uint8_t;

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense c x w x h raster with samples in [0,1], channels interleaved.
class Image {
 public:
  Image() = default;

  Image(int channels, int width, int height, std::vector<float> data)
      : channels_(channels), width_(width), height_(height),
        data_(std::move(data)) {
    require(channels_ == 1 || channels_ == 3,
            "image must have 1 or 3 channels, got " + std::to_string(channels_));
    require(width_ >= 1 && height_ >= 1, "image dimensions must be positive");
    require(data_.size() == static_cast<std::size_t>(channels_) * width_ * height_,
            "image data length does not match c*w*h");
    for (float v : data_) require(v >= 0.0f && v <= 1.0f, "image sample outside [0,1]");
  }

  /// Builds an image from 8-bit samples, scaling each by 1/255.
  static Image from_bytes(int channels, int width, int height,
                          std::span<const std::uint8_t> bytes) {
    std::vector<float> data(bytes.size());
    std::transform(bytes.begin(), bytes.end(), data.begin(),
                   [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
    return Image(channels, width, height, std::move(data));
  }

  int channels() const noexcept { return channels_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::span<const float> data() const noexcept { return data_; }

  float at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  /// RGB triple at a pixel; grayscale images replicate the single channel.
  std::array<float, 3> rgb(int x, int y) const {
    const std::size_t base = (static_cast<std::size_t>(y) * width_ + x) * channels_;
    if (channels_ == 1) return {data_[base], data_[base], data_[base]};
    return {data_[base], data_[base + 1], data_[base + 2]};
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int channels_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Per-pixel class labels (0/1 for binary segmentation).
class Mask {
 public:
  Mask() = default;

  Mask(int width, int height, std::vector<Label> labels)
      : width_(width), height_(height), labels_(std::move(labels)) {
    require(width_ >= 1 && height_ >= 1, "mask dimensions must be positive");
    require(labels_.size() == static_cast<std::size_t>(width_) * height_,
            "mask label count does not match w*h");
  }

  Mask(int width, int height, Label fill = 0)
      : Mask(width, height,
             std::vector<Label>(static_cast<std::size_t>(width) * height, fill)) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return labels_.size(); }
  std::span<const Label> labels() const noexcept { return labels_; }
  std::span<Label> labels() noexcept { return labels_; }

  Label at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
  Label& at(int x, int y) { return labels_[static_cast<std::size_t>(y) * width_ + x]; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
};

/// Per-pixel region ids. Ids are positive; they are compact ({1..K}) for any
/// map produced by slic_segment or relabel_compact, but arbitrary positive ids
/// are accepted so that relabel_compact has something to work on.
class Superpixelation {
 public:
  Superpixelation() = default;

  Superpixelation(int width, int height, std::vector<RegionId> ids)
      : width_(width), height_(height), ids_(std::move(ids)) {
    require(width_ >= 1 && height_ >= 1, "superpixelation dimensions must be positive");
    require(ids_.size() == static_cast<std::size_t>(width_) * height_,
            "region id count does not match w*h");
    std::vector<RegionId> sorted(ids_);
    std::sort(sorted.begin(), sorted.end());
    require(sorted.front() >= 1, "region ids must be positive");
    max_id_ = sorted.back();
    region_count_ = static_cast<std::size_t>(
        std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end())));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return ids_.size(); }
  std::span<const RegionId> ids() const noexcept { return ids_; }
  RegionId at(int x, int y) const { return ids_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Number of distinct ids (K).
  std::size_t region_count() const noexcept { return region_count_; }
  RegionId max_id() const noexcept { return max_id_; }
  bool is_compact() const noexcept { return max_id_ == region_count_; }

  friend bool operator==(const Superpixelation& a, const Superpixelation& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.ids_ == b.ids_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<RegionId> ids_;
  RegionId max_id_ = 0;
  std::size_t region_count_ = 0;
};

/// Remaps ids to {1..K} in order of first occurrence in a row-major scan.
inline Superpixelation relabel_compact(const Superpixelation& sp) {
  std::unordered_map<RegionId, RegionId> remap;
  std::vector<RegionId> out(sp.pixel_count());
  RegionId next = 1;
  const auto ids = sp.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(ids[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return Superpixelation(sp.width(), sp.height(), std::move(out));
}

/// Member pixels of every region, each list in row-major order.
inline std::map<RegionId, std::vector<Pixel>> region_pixel_lists(const Superpixelation& sp) {
  std::map<RegionId, std::vector<Pixel>> lists;
  for (int y = 0; y < sp.height(); ++y)
    for (int x = 0; x < sp.width(); ++x) lists[sp.at(x, y)].push_back({x, y});
  return lists;
}

/// Per-region pixel counts indexed by id (index 0 unused).
inline std::vector<std::size_t> region_areas(const Superpixelation& sp) {
  std::vector<std::size_t> areas(static_cast<std::size_t>(sp.max_id()) + 1, 0);
  for (RegionId id : sp.ids()) ++areas[id];
  return areas;
}

// ---------------------------------------------------------------------------
// File I/O

/// Raw 8-bit raster as read from disk, before scaling.
struct RawRaster {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bytes;
};

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

inline bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline RawRaster decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(ErrorKind::kFormat, name + ": corrupt PNG header: " + image.message);
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    fail(ErrorKind::kInvalidInput, name + ": alpha channels are not supported");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    fail(ErrorKind::kInvalidInput, name + ": only 8-bit PNG is supported");
  }
  RawRaster raster;
  raster.channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = raster.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  raster.width = static_cast<int>(image.width);
  raster.height = static_cast<int>(image.height);
  raster.bytes.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raster.bytes.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorKind::kFormat, name + ": corrupt PNG data: " + msg);
  }
  return raster;
}

// Binary PGM (P5) / PPM (P6) with maxval 255.
inline RawRaster decode_pnm(std::span<const std::uint8_t> bytes, const std::string& name) {
  std::size_t pos = 0;
  auto corrupt = [&](const std::string& why) -> void {
    fail(ErrorKind::kFormat, name + ": corrupt PNM header: " + why);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> int {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) corrupt("expected integer");
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos++] - '0');
      if (value > (1 << 24)) corrupt("value out of range");
    }
    return static_cast<int>(value);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    corrupt("unsupported magic");
  RawRaster raster;
  raster.channels = bytes[1] == '6' ? 3 : 1;
  pos = 2;
  raster.width = read_int();
  raster.height = read_int();
  const int maxval = read_int();
  if (raster.width < 1 || raster.height < 1) corrupt("non-positive dimensions");
  if (maxval != 255) fail(ErrorKind::kInvalidInput, name + ": only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) corrupt("missing separator");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(raster.width) * raster.height * raster.channels;
  if (bytes.size() - pos < n) corrupt("truncated pixel data");
  raster.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return raster;
}

}  // namespace detail

/// Reads an 8-bit PNG or binary PGM/PPM file without scaling.
inline RawRaster load_raster(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (detail::has_png_signature(bytes)) return detail::decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P') return detail::decode_pnm(bytes, path.string());
  fail(ErrorKind::kFormat, path.string() + ": corrupt header: not a PNG or PNM file");
}

inline Image load_image(const std::filesystem::path& path) {
  RawRaster r = load_raster(path);
  return Image::from_bytes(r.channels, r.width, r.height, r.bytes);
}

/// Reads a mask image; any nonzero sample marks the pixel as label 1.
inline Mask load_mask(const std::filesystem::path& path) {
  RawRaster r = load_raster(path);
  std::vector<Label> labels(static_cast<std::size_t>(r.width) * r.height, 0);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int c = 0; c < r.channels; ++c)
      if (r.bytes[i * r.channels + c] != 0) labels[i] = 1;
  return Mask(r.width, r.height, std::move(labels));
}

inline void save_png(const std::filesystem::path& path, int channels, int width, int height,
                     std::span<const std::uint8_t> bytes) {
  require(channels == 1 || channels == 3, "PNG output supports 1 or 3 channels");
  require(bytes.size() == static_cast<std::size_t>(channels) * width * height,
          "PNG output buffer size mismatch");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr))
    fail(ErrorKind::kIo, "cannot write " + path.string() + ": " + image.message);
}

/// Quantizes samples to 8 bits (round to nearest).
inline std::vector<std::uint8_t> to_bytes(const Image& img) {
  std::vector<std::uint8_t> out(img.data().size());
  std::transform(img.data().begin(), img.data().end(), out.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::clamp(v * 255.0f + 0.5f, 0.0f, 255.0f));
  });
  return out;
}

inline void save_image(const std::filesystem::path& path, const Image& img) {
  save_png(path, img.channels(), img.width(), img.height(), to_bytes(img));
}

/// Writes a mask as a grayscale PNG with label 0 -> 0 and any other label -> 255.
inline void save_mask(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> bytes(mask.pixel_count());
  std::transform(mask.labels().begin(), mask.labels().end(), bytes.begin(),
                 [](Label l) { return static_cast<std::uint8_t>(l ? 255 : 0); });
  save_png(path, 1, mask.width(), mask.height(), bytes);
}

}  // namespace sigrid
