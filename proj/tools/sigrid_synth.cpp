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

// Writes a procedurally generated object-centric corpus (images + masks).

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "sigrid/image.hpp"
#include "sigrid/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic image/mask corpus"};
  int count = 25;
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--count", count, "number of scenes")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the first scene");
  app.add_option("-o,--output-dir", out, "output directory (images/ and masks/)")->required();
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  const fs::path images = fs::path(out) / "images", masks = fs::path(out) / "masks";
  fs::create_directories(images);
  fs::create_directories(masks);
  for (int i = 0; i < count; ++i) {
    const auto scene = sigrid::synthesize_scene(seed + static_cast<std::uint64_t>(i));
    sigrid::save_image(images / (scene.stem + ".png"), scene.image);
    sigrid::save_mask(masks / (scene.stem + ".png"), scene.mask);
  }
  std::printf("wrote %d scenes to %s\n", count, out.c_str());
  return 0;
}
