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

// Procedural object-centric scenes with exact foreground masks.
//
// Each scene is a smooth textured background with a few distractor blobs and
// one star-shaped foreground object, anti-aliased, with mild sensor noise,
// then quantized to 8 bits. Generation is bit-reproducible from the seed:
// only a fixed 64-bit generator and hand-written transforms are used.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sigrid/image.hpp"

namespace sigrid {

struct SyntheticScene {
  std::string stem;
  Image image;
  Mask mask;
};

struct SyntheticOptions {
  int min_width = 340;
  int max_width = 410;
  int min_height = 280;
  int max_height = 340;
};

namespace detail {

class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Multi-octave bilinear value noise in roughly [-1, 1].
class ValueNoise {
 public:
  ValueNoise(SceneRng& rng, int width, int height, int base_period) {
    for (int period = base_period, octave = 0; period >= 4 && octave < 4; period /= 2, ++octave) {
      Octave o;
      o.period = period;
      o.cols = width / period + 2;
      o.rows = height / period + 2;
      o.amplitude = std::pow(0.5, octave);
      o.lattice.resize(static_cast<std::size_t>(o.cols) * o.rows);
      for (double& v : o.lattice) v = rng.uniform(-1.0, 1.0);
      norm_ += o.amplitude;
      octaves_.push_back(std::move(o));
    }
  }

  double operator()(double x, double y) const {
    double sum = 0.0;
    for (const auto& o : octaves_) {
      const double gx = x / o.period, gy = y / o.period;
      const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
      const double fx = smooth(gx - ix), fy = smooth(gy - iy);
      auto at = [&](int c, int r) { return o.lattice[static_cast<std::size_t>(r) * o.cols + c]; };
      const double top = at(ix, iy) * (1 - fx) + at(ix + 1, iy) * fx;
      const double bottom = at(ix, iy + 1) * (1 - fx) + at(ix + 1, iy + 1) * fx;
      sum += o.amplitude * (top * (1 - fy) + bottom * fy);
    }
    return norm_ > 0 ? sum / norm_ : 0.0;
  }

 private:
  struct Octave {
    int period = 0, cols = 0, rows = 0;
    double amplitude = 0;
    std::vector<double> lattice;
  };
  static double smooth(double t) { return t * t * (3 - 2 * t); }
  std::vector<Octave> octaves_;
  double norm_ = 0.0;
};

using Rgb = std::array<double, 3>;

inline Rgb random_color(SceneRng& rng) {
  return {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
}

inline double color_distance(const Rgb& a, const Rgb& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

// Star-shaped outline r(theta) = R (1 + sum_k a_k cos(k theta + phase_k)).
struct StarShape {
  double cx = 0, cy = 0, radius = 0;
  std::array<double, 4> amp{};
  std::array<double, 4> phase{};

  bool contains(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double theta = std::atan2(dy, dx);
    double r = 1.0;
    for (int k = 0; k < 4; ++k) r += amp[k] * std::cos((k + 2) * theta + phase[k]);
    return dx * dx + dy * dy <= radius * radius * r * r;
  }
};

inline StarShape random_star(SceneRng& rng, double cx, double cy, double radius) {
  StarShape s{cx, cy, radius, {}, {}};
  for (int k = 0; k < 4; ++k) {
    s.amp[k] = rng.uniform(0.0, 0.22 / (k + 1));
    s.phase[k] = rng.uniform(0.0, 2 * std::numbers::pi);
  }
  return s;
}

}  // namespace detail

inline SyntheticScene synthesize_scene(std::uint64_t seed, const SyntheticOptions& opt = {}) {
  detail::SceneRng rng(seed * 0x9E3779B97F4A7C15ull + 0x5157ull);
  const int w = rng.integer(opt.min_width, opt.max_width);
  const int h = rng.integer(opt.min_height, opt.max_height);

  const detail::Rgb bg_top = detail::random_color(rng);
  const detail::Rgb bg_bottom = detail::random_color(rng);
  const detail::Rgb bg_mean = {(bg_top[0] + bg_bottom[0]) / 2, (bg_top[1] + bg_bottom[1]) / 2,
                               (bg_top[2] + bg_bottom[2]) / 2};
  detail::Rgb fg = detail::random_color(rng);
  for (int tries = 0; tries < 64 && detail::color_distance(fg, bg_mean) < 0.35; ++tries)
    fg = detail::random_color(rng);

  const detail::ValueNoise bg_noise(rng, w, h, 64);
  const detail::ValueNoise grain_noise(rng, w, h, 8);
  const detail::ValueNoise fg_noise(rng, w, h, 16);
  const detail::ValueNoise tint_noise(rng, w, h, 128);

  const double short_side = std::min(w, h);
  const double radius = short_side * rng.uniform(0.14, 0.30);
  const detail::StarShape body = detail::random_star(rng, w * rng.uniform(0.4, 0.6),
                                                     h * rng.uniform(0.4, 0.6), radius);
  // Thin appendages (legs, beaks, antennae) that superpixels cannot follow.
  struct Limb {
    double x0, y0, x1, y1, half_width;
    bool contains(double x, double y) const {
      const double vx = x1 - x0, vy = y1 - y0;
      const double t = std::clamp(((x - x0) * vx + (y - y0) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
      const double dx = x - (x0 + t * vx), dy = y - (y0 + t * vy);
      return dx * dx + dy * dy <= half_width * half_width;
    }
  };
  std::vector<Limb> limbs;
  const int limb_count = rng.integer(1, 4);
  for (int i = 0; i < limb_count; ++i) {
    const double angle = rng.uniform(0, 2 * std::numbers::pi);
    const double r0 = radius * 0.7, r1 = radius * rng.uniform(1.3, 1.8);
    limbs.push_back({body.cx + std::cos(angle) * r0, body.cy + std::sin(angle) * r0,
                     body.cx + std::cos(angle) * r1, body.cy + std::sin(angle) * r1,
                     rng.uniform(0.8, 2.0)});
  }
  auto in_object = [&](double x, double y) {
    if (body.contains(x, y)) return true;
    for (const auto& limb : limbs)
      if (limb.contains(x, y)) return true;
    return false;
  };

  struct Distractor {
    detail::StarShape shape;
    detail::Rgb color;
  };
  std::vector<Distractor> distractors;
  const int distractor_count = rng.integer(2, 5);
  for (int i = 0; i < distractor_count; ++i) {
    // Keep distractors in the outer band so they do not overlap the object.
    const double angle = rng.uniform(0, 2 * std::numbers::pi);
    const double cx = w / 2.0 + std::cos(angle) * w * 0.42;
    const double cy = h / 2.0 + std::sin(angle) * h * 0.42;
    distractors.push_back({detail::random_star(rng, cx, cy, short_side * rng.uniform(0.04, 0.08)),
                           detail::random_color(rng)});
  }

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
  std::vector<Label> labels(static_cast<std::size_t>(w) * h, 0);
  constexpr int kSub = 4;      // coverage samples per axis
  constexpr double kBlur = 2.5;  // footprint width in pixels
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = (y + 0.5) / h;
      const double shade = 0.16 * bg_noise(x, y) + 0.10 * grain_noise(x, y);
      const double tint = 0.05 * tint_noise(x, y);
      detail::Rgb bg;
      for (int c = 0; c < 3; ++c)
        bg[c] = bg_top[c] * (1 - t) + bg_bottom[c] * t + shade + (c == 0 ? tint : -tint / 2);
      for (const auto& d : distractors) {
        if (d.shape.contains(x + 0.5, y + 0.5)) bg = d.color;
      }

      // Coverage over a footprint wider than the pixel softens edges like
      // optical blur; the mask uses the pixel center only.
      int inside = 0;
      for (int sy = 0; sy < kSub; ++sy)
        for (int sx = 0; sx < kSub; ++sx)
          inside += in_object(x + 0.5 + kBlur * ((sx + 0.5) / kSub - 0.5),
                              y + 0.5 + kBlur * ((sy + 0.5) / kSub - 0.5));
      const double alpha = static_cast<double>(inside) / (kSub * kSub);
      if (in_object(x + 0.5, y + 0.5)) labels[static_cast<std::size_t>(y) * w + x] = 1;

      const double texture = 0.16 * fg_noise(x, y);
      for (int c = 0; c < 3; ++c) {
        const double obj = fg[c] + texture;
        double v = alpha * obj + (1 - alpha) * bg[c] + 0.03 * rng.normal();
        v = std::clamp(v, 0.0, 1.0);
        bytes[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }

  char stem[32];
  std::snprintf(stem, sizeof stem, "scene_%04llu", static_cast<unsigned long long>(seed));
  return {stem, Image::from_bytes(3, w, h, bytes), Mask(w, h, std::move(labels))};
}

/// Scenes for seeds first_seed .. first_seed + count - 1.
inline std::vector<SyntheticScene> synthesize_corpus(int count, std::uint64_t first_seed = 1,
                                                     const SyntheticOptions& opt = {}) {
  std::vector<SyntheticScene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) scenes.push_back(synthesize_scene(first_seed + i, opt));
  return scenes;
}

}  // namespace sigrid
