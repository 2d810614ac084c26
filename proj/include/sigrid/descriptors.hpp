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

// Per-superpixel appearance and shape descriptors.
//
// Everything is computed with accumulate-by-region passes over the pixel
// buffer: each pixel scatters its contribution into arrays indexed by its
// region id, so the cost is O(w*h) regardless of the region count. Shape
// moments are integer sums; Hu invariants are evaluated exactly from them.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sigrid/error.hpp"
#include "sigrid/geometry.hpp"
#include "sigrid/image.hpp"

namespace sigrid {

/// Which descriptor channels are emitted. Bit order (bit 0 first) is the
/// on-disk bitmask order: ac, a, w, h, c, s, e, hu.
struct DescriptorConfig {
  bool avg_color = true;
  bool area = false;
  bool width = false;
  bool height = false;
  bool compactness = false;
  bool solidity = false;
  bool eccentricity = false;
  bool hu_moments = true;

  static constexpr std::array<std::string_view, 8> kKeys = {"ac", "a", "w", "h",
                                                           "c",  "s", "e", "hu"};

  std::array<bool, 8> flags() const {
    return {avg_color, area, width, height, compactness, solidity, eccentricity, hu_moments};
  }

  std::uint16_t bitmask() const {
    std::uint16_t mask = 0;
    const auto f = flags();
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i]) mask |= static_cast<std::uint16_t>(1u << i);
    return mask;
  }

  static DescriptorConfig from_bitmask(std::uint16_t mask) {
    require((mask & ~0xFFu) == 0, "descriptor bitmask has unknown bits set");
    auto bit = [mask](int i) { return ((mask >> i) & 1u) != 0; };
    DescriptorConfig cfg{bit(0), bit(1), bit(2), bit(3), bit(4), bit(5), bit(6), bit(7)};
    cfg.validate();
    return cfg;
  }

  /// Parses a comma list such as "ac,hu".
  static DescriptorConfig parse(std::string_view text) {
    std::uint16_t mask = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find(',', start), text.size());
      std::string_view key = text.substr(start, end - start);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      bool known = false;
      for (std::size_t i = 0; i < kKeys.size(); ++i)
        if (key == kKeys[i]) {
          mask |= static_cast<std::uint16_t>(1u << i);
          known = true;
        }
      require(known, "unknown descriptor '" + std::string(key) + "'");
      start = end + 1;
    }
    return from_bitmask(mask);
  }

  std::string to_string() const {
    std::string out;
    const auto f = flags();
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i]) {
        if (!out.empty()) out += ',';
        out += kKeys[i];
      }
    return out;
  }

  /// d = 3*ac + a + w + h + c + s + e + 7*hu
  int channels() const {
    return 3 * avg_color + area + width + height + compactness + solidity + eccentricity +
           7 * hu_moments;
  }

  void validate() const { require(channels() > 0, "at least one descriptor must be enabled"); }

  friend bool operator==(const DescriptorConfig&, const DescriptorConfig&) = default;
};

/// Values ordered [AC_r, AC_g, AC_b, A, W, H, C, S, E, Hu1..Hu7], restricted
/// to the enabled channels.
using DescriptorVector = std::vector<double>;

using HuMoments = std::array<double, 7>;

/// Integer moment sums of a pixel set up to order 3. Coordinates are taken
/// relative to a caller-chosen origin (the bounding-box corner), so integer
/// translation leaves every sum unchanged.
struct RawMoments {
  std::int64_t n = 0;
  __int128 sx = 0, sy = 0;
  __int128 sxx = 0, sxy = 0, syy = 0;
  __int128 sxxx = 0, sxxy = 0, sxyy = 0, syyy = 0;

  void add(std::int64_t x, std::int64_t y) {
    const __int128 X = x, Y = y;
    ++n;
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    syy += Y * Y;
    sxxx += X * X * X;
    sxxy += X * X * Y;
    sxyy += X * Y * Y;
    syyy += Y * Y * Y;
  }
};

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

// n^(p+q) * mu_pq, exact.
struct ScaledCentral {
  BigInt n, c20, c02, c11, c30, c03, c21, c12;
};

inline ScaledCentral scaled_central(const RawMoments& m) {
  ScaledCentral c;
  const BigInt n = m.n;
  const BigInt sx = m.sx, sy = m.sy, sxx = m.sxx, sxy = m.sxy, syy = m.syy;
  const BigInt sxxx = m.sxxx, sxxy = m.sxxy, sxyy = m.sxyy, syyy = m.syyy;
  c.n = n;
  c.c20 = n * (n * sxx - sx * sx);
  c.c02 = n * (n * syy - sy * sy);
  c.c11 = n * (n * sxy - sx * sy);
  c.c30 = n * (n * n * sxxx - 3 * n * sx * sxx + 2 * sx * sx * sx);
  c.c03 = n * (n * n * syyy - 3 * n * sy * syy + 2 * sy * sy * sy);
  c.c21 = n * (n * n * sxxy - n * sy * sxx - 2 * n * sx * sxy + 2 * sx * sx * sy);
  c.c12 = n * (n * n * sxyy - n * sx * syy - 2 * n * sy * sxy + 2 * sy * sy * sx);
  return c;
}

// num / n^k with a single rounding of each operand.
inline double over_power(const BigInt& num, std::int64_t n, int k) {
  return num.convert_to<double>() / std::pow(static_cast<double>(n), k);
}

}  // namespace detail

/// The seven Hu invariants of a region. Every invariant is an integer
/// polynomial in the n-scaled central moments divided by a power of n, so
/// it is evaluated exactly and rounded once: symmetric shapes give exact
/// zeros and translation cannot change a bit.
inline HuMoments hu_from_raw(const RawMoments& m) {
  require(m.n > 0, "Hu moments of an empty region");
  const auto c = detail::scaled_central(m);
  using detail::BigInt;
  // eta2 = c2 / n^4, eta3 = c3 / n^5.5
  const BigInt d = c.c20 - c.c02;
  const BigInt a = c.c30 + c.c12, b = c.c21 + c.c03;
  const BigInt p = c.c30 - 3 * c.c12, q = 3 * c.c21 - c.c03;
  const BigInt a2 = a * a, b2 = b * b;
  HuMoments hu;
  hu[0] = detail::over_power(c.c20 + c.c02, m.n, 4);
  hu[1] = detail::over_power(d * d + 4 * c.c11 * c.c11, m.n, 8);
  hu[2] = detail::over_power(p * p + q * q, m.n, 11);
  hu[3] = detail::over_power(a2 + b2, m.n, 11);
  hu[4] = detail::over_power(p * a * (a2 - 3 * b2) + q * b * (3 * a2 - b2), m.n, 22);
  hu[5] = detail::over_power(d * (a2 - b2) + 4 * c.c11 * a * b, m.n, 15);
  hu[6] = detail::over_power(q * a * (a2 - 3 * b2) - p * b * (3 * a2 - b2), m.n, 22);
  return hu;
}

/// Raw (unscaled) Hu invariants of a pixel set.
inline HuMoments hu_moments_raw(std::span<const Pixel> pixels) {
  require(!pixels.empty(), "hu_moments_raw needs at least one pixel");
  int x0 = pixels[0].x, y0 = pixels[0].y;
  for (const auto& p : pixels) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
  }
  RawMoments m;
  for (const auto& p : pixels) m.add(p.x - x0, p.y - y0);
  return hu_from_raw(m);
}

/// Compresses a Hu value's dynamic range: sign(v) * log10(1 + |v| * 1e12) / 12.
inline double signed_log_scale(double v) {
  // log1p keeps full relative precision for tiny |v|.
  const double mag = std::log1p(std::abs(v) * 1e12) / (12.0 * std::numbers::ln10);
  return v < 0 ? -mag : mag;
}

/// Eccentricity sqrt(1 - l2/l1) of a 2x2 covariance [[sxx, sxy], [sxy, syy]],
/// written as sqrt(2r / (m + r)) (m the eigenvalue mean, r the half-gap) to
/// avoid cancellation for near-isotropic shapes.
inline double eccentricity_from_covariance(double sxx, double syy, double sxy) {
  const double mean = 0.5 * (sxx + syy);
  const double radius = std::hypot(0.5 * (sxx - syy), sxy);
  if (mean + radius <= 0.0) return 0.0;
  return std::sqrt(2.0 * radius / (mean + radius));
}

/// Eccentricity of a region of unit pixel squares: the pixel-center
/// covariance plus 1/12 per axis. The half-gap is formed exactly.
inline double region_eccentricity(const RawMoments& m) {
  const auto c = detail::scaled_central(m);
  // covariance = c_pq / n^3; with the 1/12 terms, scale everything by 12 n^3.
  const detail::BigInt n3 = c.n * c.n * c.n;
  const detail::BigInt d = c.c20 - c.c02;
  const double sum = (12 * (c.c20 + c.c02) + 2 * n3).convert_to<double>();  // 2m
  const double gap = 12.0 * std::sqrt((d * d + 4 * c.c11 * c.c11).convert_to<double>());  // 2r
  if (sum + gap <= 0.0) return 0.0;
  return std::sqrt(2.0 * gap / (sum + gap));
}

namespace detail {

struct RegionAccumulator {
  std::size_t count = 0;
  double r = 0, g = 0, b = 0;
  int xmin = 0, xmax = -1, ymin = 0, ymax = -1;
  RawMoments moments;  // relative to (xmin, ymin)
  std::size_t perimeter = 0;
  std::vector<GridPoint> hull_candidates;
};

}  // namespace detail

/// Descriptor vectors for every region of sp, keyed by region id.
inline std::map<RegionId, DescriptorVector> compute_descriptors(const Image& img,
                                                                const Superpixelation& sp,
                                                                const DescriptorConfig& cfg) {
  cfg.validate();
  require(img.width() == sp.width() && img.height() == sp.height(),
          "image and superpixelation dimensions differ");
  const int w = sp.width(), h = sp.height();
  const auto ids = sp.ids();
  std::vector<detail::RegionAccumulator> acc(static_cast<std::size_t>(sp.max_id()) + 1);

  // Pass 1: counts, bounding boxes, colors.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto& a = acc[ids[static_cast<std::size_t>(y) * w + x]];
      if (a.count == 0) {
        a.xmin = a.xmax = x;
        a.ymin = a.ymax = y;
      }
      a.xmin = std::min(a.xmin, x);
      a.xmax = std::max(a.xmax, x);
      a.ymax = y;
      ++a.count;
      const auto c = img.rgb(x, y);
      a.r += c[0];
      a.g += c[1];
      a.b += c[2];
    }

  // Pass 2: moment sums, exposed edges, hull candidates (run end corners).
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const RegionId id = ids[p];
      auto& a = acc[id];
      a.moments.add(x - a.xmin, y - a.ymin);
      const bool left_open = x == 0 || ids[p - 1] != id;
      const bool right_open = x + 1 == w || ids[p + 1] != id;
      a.perimeter += left_open + right_open + (y == 0 || ids[p - w] != id) +
                     (y + 1 == h || ids[p + w] != id);
      if (cfg.solidity) {
        if (left_open) {
          a.hull_candidates.push_back({x, y});
          a.hull_candidates.push_back({x, y + 1});
        }
        if (right_open) {
          a.hull_candidates.push_back({x + 1, y});
          a.hull_candidates.push_back({x + 1, y + 1});
        }
      }
    }

  const double pixels = static_cast<double>(w) * h;
  std::map<RegionId, DescriptorVector> out;
  for (RegionId id = 1; id < acc.size(); ++id) {
    auto& a = acc[id];
    if (a.count == 0) continue;
    const double n = static_cast<double>(a.count);
    DescriptorVector v;
    v.reserve(static_cast<std::size_t>(cfg.channels()));
    if (cfg.avg_color) {
      v.push_back(a.r / n);
      v.push_back(a.g / n);
      v.push_back(a.b / n);
    }
    if (cfg.area) v.push_back(n / pixels);
    if (cfg.width) v.push_back(static_cast<double>(a.xmax - a.xmin + 1) / w);
    if (cfg.height) v.push_back(static_cast<double>(a.ymax - a.ymin + 1) / h);
    if (cfg.compactness) {
      const double per = static_cast<double>(a.perimeter);
      v.push_back(std::min(1.0, 4.0 * std::numbers::pi * n / (per * per)));
    }
    if (cfg.solidity) {
      const auto hull = convex_hull(std::move(a.hull_candidates));
      v.push_back(std::min(1.0, n / polygon_area(hull)));
    }
    if (cfg.eccentricity) {
      v.push_back(region_eccentricity(a.moments));
    }
    if (cfg.hu_moments)
      for (double phi : hu_from_raw(a.moments)) v.push_back(signed_log_scale(phi));
    out.emplace(id, std::move(v));
  }
  return out;
}

}  // namespace sigrid
