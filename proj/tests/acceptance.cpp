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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Uses a procedurally generated 25-image corpus (object-centric
// scenes with binary masks) written to a scratch directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "sigrid/all.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sigrid;
using Clock = std::chrono::steady_clock;

constexpr int kCorpusSize = 25;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

void descriptor_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  const auto cfg = DescriptorConfig::parse("ac,a,w,h,c,s,e,hu");
  std::size_t values = 0, mismatches = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 57), h = 8 + static_cast<int>(rng() % 57);
    const int k = 1 + static_cast<int>(rng() % 20);
    const auto sp = testing::random_superpixelation(rng, w, h, k);
    const auto img = testing::random_image(rng, w, h);
    const auto got = compute_descriptors(img, sp, cfg);
    const auto want = testing::naive_descriptors(img, sp, cfg);
    if (got.size() != want.size()) {
      ++mismatches;
      continue;
    }
    for (const auto& [id, v] : want) {
      const auto& g = got.at(id);
      for (std::size_t c = 0; c < v.size(); ++c) {
        ++values;
        const double scale = std::max(std::abs(g[c]), std::abs(v[c]));
        if (scale > 0) worst = std::max(worst, std::abs(g[c] - v[c]) / scale);
        if (!testing::close_rel(g[c], v[c], 1e-6, 0.0)) ++mismatches;
      }
    }
  }
  const double t = seconds_since(start);
  report(1, "descriptor-oracle-equivalence", mismatches == 0 && t < 30,
         fmt("100 instances, %zu values, %zu outside 1e-6 rel, worst rel %.2e, %.2f s", values,
             mismatches, worst, t));
}

void hu_invariance() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  double translate = 0, rotate_rel = 0, upscale_worst = 0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto px = testing::random_blob(rng, 48, 60 + static_cast<int>(rng() % 300));
    const int dx = 1 + static_cast<int>(rng() % 500), dy = 1 + static_cast<int>(rng() % 500);
    std::vector<Pixel> moved, rot, up;
    for (const auto& p : px) {
      moved.push_back({p.x + dx, p.y + dy});
      rot.push_back({47 - p.y, p.x});
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) up.push_back({2 * p.x + i, 2 * p.y + j});
    }
    const auto a = hu_moments_raw(px), b = hu_moments_raw(moved), r = hu_moments_raw(rot),
               u = hu_moments_raw(up);
    for (int i = 0; i < 7; ++i) {
      translate = std::max(translate, std::abs(a[i] - b[i]));
      const double ra = i < 6 ? a[i] : std::abs(a[i]);
      const double rr = i < 6 ? r[i] : std::abs(r[i]);
      const double scale = std::max(std::abs(ra), std::abs(rr));
      if (!testing::close_rel(ra, rr, 1e-6, 0.0)) ok = false;
      rotate_rel = std::max(rotate_rel, std::abs(ra - rr) / scale);
    }
    upscale_worst = std::max(upscale_worst, std::abs(u[0] - a[0]) / std::abs(a[0]));

    // Translation through the image-level accumulator as well.
    std::vector<RegionId> ids1(600 * 600, 2), ids2(600 * 600, 2);
    for (const auto& p : px) ids1[static_cast<std::size_t>(p.y) * 600 + p.x] = 1;
    for (const auto& p : moved) ids2[static_cast<std::size_t>(p.y) * 600 + p.x] = 1;
    const Image img = Image::from_bytes(1, 600, 600, std::vector<std::uint8_t>(600 * 600, 9));
    const auto cfg = DescriptorConfig::parse("hu");
    const auto d1 = compute_descriptors(img, Superpixelation(600, 600, ids1), cfg).at(1);
    const auto d2 = compute_descriptors(img, Superpixelation(600, 600, ids2), cfg).at(1);
    for (int i = 0; i < 7; ++i) translate = std::max(translate, std::abs(d1[i] - d2[i]));
  }
  ok = ok && translate <= 1e-9 && upscale_worst <= 0.05;
  const double t = seconds_since(start);
  report(2, "hu-invariance", ok && t < 10,
         fmt("20 blobs, translation max diff %.1e, rotation max rel %.1e, 2x upscale phi1 max "
             "rel %.2f%%, %.2f s",
             translate, rotate_rel, 100 * upscale_worst, t));
}

struct CorpusRun {
  fs::path images, masks, out1, out8;
  BatchSummary one, eight;
  double seconds_one = 0;
};

void round_trip_bound(const CorpusRun& run) {
  std::mt19937_64 rng(11);
  std::size_t images = 0, equal = 0, perturbed = 0, violations = 0;
  double min_gap = 1.0;
  for (const auto& item : run.one.items) {
    if (!item.ok) continue;
    ++images;
    const SgrdFile f = read_sgrd(run.out1 / (item.stem + ".sgrd"));
    const Mask gt = load_mask(run.masks / (item.stem + ".png"));
    const double bound = max_iou(gt, f.sigrid);
    const CellLabelGrid labels = rasterize_labels(gt, f.sigrid);
    equal += iou(backproject(labels, f.sigrid), gt) == bound;
    std::vector<Cell> occupied;
    for (const auto& [cell, rec] : f.sigrid.cells) occupied.push_back(cell);
    for (double rate : {0.002, 0.01, 0.05, 0.2, 0.5}) {
      for (int rep = 0; rep < 4; ++rep) {
        CellLabelGrid p = labels;
        for (const Cell& c : occupied)
          if (std::uniform_real_distribution<double>(0, 1)(rng) < rate) p.at(c) = 1 - p.at(c);
        const double v = iou(backproject(p, f.sigrid), gt);
        ++perturbed;
        if (v > bound) ++violations;
        min_gap = std::min(min_gap, bound - v);
      }
    }
  }
  report(3, "round-trip-bound", images == kCorpusSize && equal == images && violations == 0,
         fmt("%zu/%zu images exact equality, %zu perturbed predictions, %zu above max_iou, "
             "smallest gap %.2e",
             equal, images, perturbed, violations, min_gap));
}

void collision_and_max_iou(const CorpusRun& run) {
  const auto& s = run.one;
  report(4, "collision-band", s.failures == 0 && s.mean_collision_rate < 0.01 && run.seconds_one < 120,
         fmt("K=1500 m=20 grid 80, %zu images, mean collision rate %.3f%%, %.1f s",
             s.items.size(), 100 * s.mean_collision_rate, run.seconds_one));
  double worst = 1;
  for (const auto& it : s.items) worst = std::min(worst, it.max_iou);
  report(5, "max-iou-band", s.failures == 0 && s.mean_max_iou >= 0.90,
         fmt("mean max_iou %.4f (lowest image %.4f)", s.mean_max_iou, worst));
}

void compression(const CorpusRun& run) {
  const double dense = static_cast<double>(DescriptorConfig{}.channels()) * GridSpec{}.cell_count();
  double pixel_elems = 0;
  std::size_t smaller = 0, n = 0;
  double worst_ratio = 0;
  for (const auto& it : run.one.items) {
    const auto h = read_sgrd_header(run.out1 / (it.stem + ".sgrd"));
    const double raw = 3.0 * h.image_width * h.image_height;
    const double size = static_cast<double>(fs::file_size(run.out1 / (it.stem + ".sgrd")));
    pixel_elems += raw;
    smaller += size < raw;
    worst_ratio = std::max(worst_ratio, size / raw);
    ++n;
  }
  pixel_elems /= static_cast<double>(n);
  const double nominal = 3.0 * 310 * 375 / dense;
  const double ratio = pixel_elems / dense;
  report(6, "compression", dense == 64000 && nominal >= 5 && ratio >= 5 && smaller == n,
         fmt("dense %.0f elements; 310x375 nominal ratio %.2fx; corpus mean %.0f pixel elements, "
             "ratio %.2fx; SGRD < raw 24-bit for %zu/%zu (largest %.1f%% of raw)",
             dense, nominal, pixel_elems, ratio, smaller, n, 100 * worst_ratio));
}

void determinism(const CorpusRun& run) {
  std::size_t same = 0, total = 0;
  for (const auto& it : run.one.items) {
    ++total;
    const auto a = slurp(run.out1 / (it.stem + ".sgrd"));
    same += !a.empty() && a == slurp(run.out8 / (it.stem + ".sgrd"));
  }
  const bool summary = slurp(run.out1 / "summary.csv") == slurp(run.out8 / "summary.csv");
  report(7, "batch-determinism", same == total && total == kCorpusSize && summary,
         fmt("workers 1 vs 8: %zu/%zu SGRD files identical, summary.csv %s", same, total,
             summary ? "identical" : "differs"));
}

void sgrd_format(const CorpusRun& run, const SyntheticScene& probe, const fs::path& scratch) {
  std::size_t exact = 0, n = 0;
  for (const auto& it : run.one.items) {
    const auto bytes = detail::read_file_bytes(run.out1 / (it.stem + ".sgrd"));
    const SgrdFile f = decode_sgrd(bytes);
    exact += encode_sgrd(f) == bytes && decode_sgrd(encode_sgrd(f)) == f;
    ++n;
  }
  std::mt19937_64 rng(8);
  save_image(scratch / "probe.png", probe.image);
  save_mask(scratch / "probe_mask.png", probe.mask);
  std::size_t matching = 0;
  std::string first_bad;
  for (int i = 0; i < 10; ++i) {
    PipelineConfig cfg;
    cfg.slic.segments = 100 + static_cast<int>(rng() % 2000);
    cfg.slic.compactness = 5 + static_cast<double>(rng() % 40);
    cfg.grid = {8 + static_cast<int>(rng() % 120), 8 + static_cast<int>(rng() % 120)};
    cfg.descriptors = DescriptorConfig::from_bitmask(static_cast<std::uint16_t>(1 + rng() % 255));
    const bool with_mask = rng() & 1;
    const fs::path out = scratch / ("fuzz_" + std::to_string(i) + ".sgrd");
    const auto built = cmd_build(scratch / "probe.png",
                                 with_mask ? std::optional<fs::path>(scratch / "probe_mask.png")
                                           : std::nullopt,
                                 out, cfg);
    const auto r = inspect_sgrd(out);
    const auto& h = r.header;
    const bool ok = h.version == kSgrdVersion &&
                    h.flags == (with_mask ? kSgrdFlagLabels : 0) &&
                    h.image_width == static_cast<std::uint32_t>(probe.image.width()) &&
                    h.image_height == static_cast<std::uint32_t>(probe.image.height()) &&
                    h.grid_width == cfg.grid.width && h.grid_height == cfg.grid.height &&
                    h.channels == cfg.descriptors.channels() &&
                    h.descriptor_mask == cfg.descriptors.bitmask() &&
                    h.retained == built.assignment.retained_count() &&
                    r.file_size == fs::file_size(out) && read_sgrd(out) == built.file;
    matching += ok;
    if (!ok && first_bad.empty()) first_bad = " first mismatch: config " + std::to_string(i);
  }
  report(8, "sgrd-format", exact == n && n == kCorpusSize && matching == 10,
         fmt("%zu/%zu corpus files round-trip bit-exact; inspect matches config for %zu/10 fuzzed "
             "builds%s",
             exact, n, matching, first_bad.c_str()));
}

void metric_values() {
  std::vector<Label> gt(1000, 0);
  for (int i = 0; i < 250; ++i) gt[static_cast<std::size_t>(i) * 4] = 1;
  std::vector<float> perfect(gt.begin(), gt.end()), inverted(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) inverted[i] = 1.0f - static_cast<float>(gt[i]);
  const double f_perfect = max_f_beta(perfect, gt, 0.3);
  const double f_inv = max_f_beta(inverted, gt, 0.3);
  const double f_inv_oracle = testing::max_f_beta_sweep(inverted, gt, 0.3);
  const double closed = (1 + 0.09) * 0.25 / (0.09 * 0.25 + 1);

  std::vector<Label> g(16, 0), p(16, 0);
  g[0] = g[1] = g[4] = g[5] = 1;
  p[0] = p[1] = p[10] = p[11] = 1;
  const double hand = mean_iou(p, g);

  const bool ok = f_perfect == 1.0 && std::abs(f_inv - 0.2665) <= 1e-3 &&
                  std::abs(f_inv - closed) <= 1e-12 && std::abs(f_inv - f_inv_oracle) <= 1e-12 &&
                  std::abs(hand - 0.5238) <= 1e-4;
  report(9, "metrics", ok,
         fmt("MaxF perfect %.4f; inverted (p=0.25, beta=0.3) %.5f, sweep oracle %.5f, closed "
             "form %.5f; hand-count IoU %.5f",
             f_perfect, f_inv, f_inv_oracle, closed, hand));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  descriptor_oracle();
  hu_invariance();

  testing::TempDir scratch("acceptance");
  CorpusRun run;
  run.images = scratch / "images";
  run.masks = scratch / "masks";
  run.out1 = scratch / "w1";
  run.out8 = scratch / "w8";
  fs::create_directories(run.images);
  fs::create_directories(run.masks);
  for (const auto& s : synthesize_corpus(kCorpusSize, 1)) {
    save_image(run.images / (s.stem + ".png"), s.image);
    save_mask(run.masks / (s.stem + ".png"), s.mask);
  }

  PipelineConfig cfg;  // K = 1500, m = 20, grid 80, ac + hu
  cfg.input_dir = run.images;
  cfg.mask_dir = run.masks;
  cfg.output_dir = run.out1;
  auto t = Clock::now();
  run.one = cmd_batch(cfg);
  run.seconds_one = seconds_since(t);
  cfg.output_dir = run.out8;
  cfg.workers = 8;
  run.eight = cmd_batch(cfg);

  round_trip_bound(run);
  collision_and_max_iou(run);
  compression(run);
  determinism(run);
  sgrd_format(run, synthesize_scene(1000), scratch.path());
  metric_values();

  std::printf("%d criteria failed; total %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
