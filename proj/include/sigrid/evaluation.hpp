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

// Cell- and pixel-level evaluation of predictions against ground truth.

#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "sigrid/error.hpp"
#include "sigrid/format.hpp"
#include "sigrid/image.hpp"
#include "sigrid/metrics.hpp"
#include "sigrid/sigrid.hpp"

namespace sigrid {

struct MetricsReport {
  std::string image_id;
  double pixel_accuracy = 0;
  double pixel_iou = 0;
  double pixel_max_f_beta = 0;
  double cell_accuracy = 0;
  double cell_iou = 0;
  double cell_max_f_beta = 0;
  double max_iou = 0;
  double beta = kDefaultBeta;

  // pixel_iou <= max_iou; false flags a prediction that beat the bound.
  bool within_max_iou() const { return pixel_iou <= max_iou; }
};

namespace detail {

struct CellSamples {
  std::vector<Label> gt;
  std::vector<Label> pred;
  std::vector<float> scores;
};

inline void fill_cell_metrics(MetricsReport& report, const CellSamples& s) {
  report.cell_accuracy = accuracy(s.pred, s.gt);
  report.cell_iou = mean_iou(s.pred, s.gt);
  report.cell_max_f_beta = max_f_beta(s.scores, s.gt, report.beta);
}

inline void fill_pixel_metrics(MetricsReport& report, const Mask& pred,
                               std::span<const float> scores, const Mask& gt) {
  report.pixel_accuracy = pixel_accuracy(pred, gt);
  report.pixel_iou = iou(pred, gt);
  report.pixel_max_f_beta = max_f_beta(scores, gt, report.beta);
}

}  // namespace detail

/// Metrics for a per-cell prediction. Cell metrics cover retained (non-EMPTY)
/// cells only; pixel metrics use the back-projected prediction.
inline MetricsReport evaluate(const CellPrediction& pred, const Mask& gt, const Sigrid& sg,
                              double beta = kDefaultBeta) {
  require(pred.spec == sg.spec, "prediction grid does not match the sigrid grid");
  require(gt.width() == sg.image_width && gt.height() == sg.image_height,
          "ground truth dimensions differ from the sigrid source image");
  MetricsReport report;
  report.beta = beta;
  const CellLabelGrid gt_cells = rasterize_labels(gt, sg);

  detail::CellSamples samples;
  for (const auto& [cell, rec] : sg.cells) {
    const std::size_t i = static_cast<std::size_t>(cell.row) * sg.spec.width + cell.col;
    samples.gt.push_back(gt_cells.labels[i]);
    samples.pred.push_back(pred.labels[i]);
    samples.scores.push_back(pred.scores[i]);
  }
  detail::fill_cell_metrics(report, samples);

  const Mask pred_mask = backproject(pred.label_grid(), sg);
  const auto pixel_scores = backproject_values<float>(pred.scores, sg);
  detail::fill_pixel_metrics(report, pred_mask, pixel_scores, gt);
  report.max_iou = max_iou(gt, sg);
  return report;
}

/// Metrics for a pixel-level prediction mask; cell metrics come from
/// rasterizing the prediction onto the same grid.
inline MetricsReport evaluate(const Mask& pred, const Mask& gt, const Sigrid& sg,
                              double beta = kDefaultBeta) {
  require(pred.width() == gt.width() && pred.height() == gt.height(),
          "prediction and ground truth dimensions differ");
  require(gt.width() == sg.image_width && gt.height() == sg.image_height,
          "ground truth dimensions differ from the sigrid source image");
  MetricsReport report;
  report.beta = beta;
  const CellLabelGrid gt_cells = rasterize_labels(gt, sg);
  const CellLabelGrid pred_cells = rasterize_labels(pred, sg);
  detail::CellSamples samples;
  for (const auto& [cell, rec] : sg.cells) {
    samples.gt.push_back(gt_cells.at(cell));
    samples.pred.push_back(pred_cells.at(cell));
    samples.scores.push_back(static_cast<float>(pred_cells.at(cell) != 0));
  }
  detail::fill_cell_metrics(report, samples);

  std::vector<float> scores(pred.pixel_count());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = pred.labels()[i] != 0 ? 1.0f : 0.0f;
  detail::fill_pixel_metrics(report, pred, scores, gt);
  report.max_iou = max_iou(gt, sg);
  return report;
}

/// Unweighted mean of per-image reports, accumulated in the given order.
inline MetricsReport corpus_mean(std::span<const MetricsReport> reports) {
  MetricsReport mean;
  mean.image_id = "MEAN";
  if (reports.empty()) return mean;
  mean.beta = reports.front().beta;
  for (const auto& r : reports) {
    mean.pixel_accuracy += r.pixel_accuracy;
    mean.pixel_iou += r.pixel_iou;
    mean.pixel_max_f_beta += r.pixel_max_f_beta;
    mean.cell_accuracy += r.cell_accuracy;
    mean.cell_iou += r.cell_iou;
    mean.cell_max_f_beta += r.cell_max_f_beta;
    mean.max_iou += r.max_iou;
  }
  const double n = static_cast<double>(reports.size());
  mean.pixel_accuracy /= n;
  mean.pixel_iou /= n;
  mean.pixel_max_f_beta /= n;
  mean.cell_accuracy /= n;
  mean.cell_iou /= n;
  mean.cell_max_f_beta /= n;
  mean.max_iou /= n;
  return mean;
}

inline constexpr const char* kReportCsvHeader =
    "image_id,pixel_acc,pixel_iou,pixel_maxf,cell_acc,cell_iou,cell_maxf,max_iou";

inline std::string report_csv_row(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", r.pixel_accuracy,
                r.pixel_iou, r.pixel_max_f_beta, r.cell_accuracy, r.cell_iou, r.cell_max_f_beta,
                r.max_iou);
  return r.image_id + buf;
}

/// CSV with one row per image followed by a MEAN row.
inline std::string format_report_csv(std::span<const MetricsReport> reports) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : reports) out += report_csv_row(r) + "\n";
  out += report_csv_row(corpus_mean(reports)) + "\n";
  return out;
}

/// Aligned plain-text table, same rows as the CSV.
inline std::string format_report_table(std::span<const MetricsReport> reports) {
  std::size_t id_width = 8;
  for (const auto& r : reports) id_width = std::max(id_width, r.image_id.size());
  auto row = [&](const std::string& id, const MetricsReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %9.4f  %9.4f  %10.4f  %8.4f  %8.4f  %9.4f  %7.4f\n",
                  static_cast<int>(id_width), id.c_str(), r.pixel_accuracy, r.pixel_iou,
                  r.pixel_max_f_beta, r.cell_accuracy, r.cell_iou, r.cell_max_f_beta, r.max_iou);
    return std::string(buf);
  };
  char head[256];
  std::snprintf(head, sizeof head, "%-*s  %9s  %9s  %10s  %8s  %8s  %9s  %7s\n",
                static_cast<int>(id_width), "image", "pixel_acc", "pixel_iou", "pixel_maxf",
                "cell_acc", "cell_iou", "cell_maxf", "max_iou");
  std::string out = head;
  for (const auto& r : reports) out += row(r.image_id, r);
  out += row("MEAN", corpus_mean(reports));
  return out;
}

}  // namespace sigrid
