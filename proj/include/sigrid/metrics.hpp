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

// Pixel-level segmentation metrics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sigrid/error.hpp"
#include "sigrid/image.hpp"

namespace sigrid {

inline constexpr double kDefaultBeta = 0.3;
inline constexpr int kFBetaThresholds = 256;

/// Fraction of positions where the labels agree.
inline double accuracy(std::span<const Label> pred, std::span<const Label> gt) {
  require(pred.size() == gt.size(), "accuracy: size mismatch");
  if (gt.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) hits += pred[i] == gt[i];
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

/// Mean IoU over the classes present in either labeling. A class absent from
/// both contributes 1, so an empty labeling scores 1.
inline double mean_iou(std::span<const Label> pred, std::span<const Label> gt) {
  require(pred.size() == gt.size(), "iou: size mismatch");
  std::array<std::size_t, 256> inter{}, uni{};
  std::array<bool, 256> present{};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label p = pred[i], g = gt[i];
    present[p] = present[g] = true;
    if (p == g) {
      ++inter[p];
      ++uni[p];
    } else {
      ++uni[p];
      ++uni[g];
    }
  }
  double sum = 0.0;
  int classes = 0;
  for (int c = 0; c < 256; ++c) {
    if (!present[c]) continue;
    sum += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
    ++classes;
  }
  return classes == 0 ? 1.0 : sum / classes;
}

inline double iou(const Mask& pred, const Mask& gt) {
  require(pred.width() == gt.width() && pred.height() == gt.height(),
          "iou: mask dimensions differ");
  return mean_iou(pred.labels(), gt.labels());
}

inline double pixel_accuracy(const Mask& pred, const Mask& gt) {
  require(pred.width() == gt.width() && pred.height() == gt.height(),
          "accuracy: mask dimensions differ");
  return accuracy(pred.labels(), gt.labels());
}

/// F-beta from confusion counts; 0 when precision or recall is undefined.
inline double f_beta(std::size_t tp, std::size_t fp, std::size_t fn, double beta) {
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  return denom == 0.0 ? 0.0 : (1.0 + b2) * precision * recall / denom;
}

/// Number of thresholds t_k = k/255 with t_k <= score.
inline int threshold_rank(double score) {
  int k = std::clamp(static_cast<int>(std::floor(score * 255.0)), 0, kFBetaThresholds - 1);
  while (k + 1 < kFBetaThresholds && static_cast<double>(k + 1) / 255.0 <= score) ++k;
  while (k > 0 && static_cast<double>(k) / 255.0 > score) --k;
  return k + (static_cast<double>(k) / 255.0 <= score ? 1 : 0);
}

/// Maximum F-beta over the 256 thresholds {0, 1/255, ..., 1}, predicting
/// foreground where score >= t.
inline double max_f_beta(std::span<const float> scores, std::span<const Label> gt,
                         double beta = kDefaultBeta) {
  require(scores.size() == gt.size(), "max_f_beta: size mismatch");
  // pos[k]/neg[k]: foreground/background samples whose score clears exactly k thresholds.
  std::array<std::size_t, kFBetaThresholds + 1> pos{}, neg{};
  std::size_t total_pos = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    require(gt[i] <= 1, "max_f_beta: ground truth must be binary");
    const int rank = threshold_rank(scores[i]);
    if (gt[i]) {
      ++pos[rank];
      ++total_pos;
    } else {
      ++neg[rank];
    }
  }
  // Samples predicted positive at threshold k are those with rank > k.
  double best = 0.0;
  std::size_t tp = 0, fp = 0;
  for (int k = kFBetaThresholds - 1; k >= 0; --k) {
    tp += pos[k + 1];
    fp += neg[k + 1];
    best = std::max(best, f_beta(tp, fp, total_pos - tp, beta));
  }
  return best;
}

inline double max_f_beta(std::span<const float> scores, const Mask& gt,
                         double beta = kDefaultBeta) {
  require(scores.size() == gt.pixel_count(), "max_f_beta: score map size differs from mask");
  return max_f_beta(scores, gt.labels(), beta);
}

}  // namespace sigrid
