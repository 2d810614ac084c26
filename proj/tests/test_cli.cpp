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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sigrid/all.hpp"
#include "support/temp_dir.hpp"

namespace sigrid {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(SIGRID_CLI_PATH) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(dir_ / "images");
    fs::create_directories(dir_ / "masks");
    for (const auto& s : synthesize_corpus(2, 1, {110, 130, 90, 110})) {
      save_image(dir_ / "images" / (s.stem + ".png"), s.image);
      save_mask(dir_ / "masks" / (s.stem + ".png"), s.mask);
    }
  }
  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  testing::TempDir dir_{"cli"};
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("build").code, 2);
  EXPECT_EQ(cli("--segments 10 build " + p("images/scene_0001.png") + " -o " + p("x.sgrd") +
                " --descriptors zz").code,
            2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(Cli, BuildInspectRender) {
  const auto b = cli("--segments 150 --grid 20 --descriptors ac,a,hu build " +
                     p("images/scene_0001.png") + " --mask " + p("masks/scene_0001.png") +
                     " -o " + p("a.sgrd"));
  EXPECT_EQ(b.code, 0) << b.out;
  EXPECT_NE(b.out.find("max_iou"), std::string::npos);
  const auto i = cli("inspect " + p("a.sgrd"));
  EXPECT_EQ(i.code, 0);
  EXPECT_NE(i.out.find("grid: 20x20"), std::string::npos);
  EXPECT_NE(i.out.find("channels: 11"), std::string::npos);
  EXPECT_NE(i.out.find("(labels)"), std::string::npos);
  EXPECT_EQ(cli("render " + p("a.sgrd") + " --mode labels -o " + p("l.png")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "l.png"));
  EXPECT_EQ(cli("render " + p("a.sgrd") + " --mode sideways -o " + p("l.png")).code, 2);
}

TEST_F(Cli, MissingInputExitsTwo) {
  EXPECT_EQ(cli("build " + p("nope.png") + " -o " + p("a.sgrd")).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "a.sgrd"));
  EXPECT_EQ(cli("inspect " + p("nope.sgrd")).code, 2);
}

TEST_F(Cli, ConfigFileAndOverride) {
  {
    std::ofstream cfg(dir_ / "run.cfg");
    cfg << "segments = 120\ngrid = 16\ndescriptors = a,w\n";
  }
  ASSERT_EQ(cli("--config " + p("run.cfg") + " --grid 12x10 build " + p("images/scene_0002.png") +
                " -o " + p("c.sgrd")).code,
            0);
  const auto h = read_sgrd_header(dir_ / "c.sgrd");
  EXPECT_EQ(h.grid_width, 12);
  EXPECT_EQ(h.grid_height, 10);
  EXPECT_EQ(h.channels, 2);
}

TEST_F(Cli, BatchBackprojectEval) {
  const auto b = cli("--segments 150 --grid 20 --workers 2 batch --input-dir " + p("images") +
                     " --mask-dir " + p("masks") + " --output-dir " + p("out"));
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_NE(b.out.find("mean max_iou"), std::string::npos);

  const SgrdFile f = read_sgrd(dir_ / "out" / "scene_0001.sgrd");
  fs::create_directories(dir_ / "pred");
  write_sgpd(dir_ / "pred" / "scene_0001.sgpd", prediction_from_labels(*f.labels));
  EXPECT_EQ(cli("backproject " + p("out/scene_0001.sgrd") + " " + p("pred/scene_0001.sgpd") +
                " -o " + p("bp.png")).code,
            0);
  EXPECT_EQ(load_mask(dir_ / "bp.png"), backproject(*f.labels, f.sigrid));

  // scene_0002 has no prediction: partial report, exit 1.
  const auto e = cli("eval " + p("pred") + " " + p("masks") + " " + p("out") + " -o " + p("rep"));
  EXPECT_EQ(e.code, 1) << e.out;
  EXPECT_NE(e.out.find("scene_0002"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "report.csv"));

  fs::copy_file(dir_ / "masks" / "scene_0002.png", dir_ / "pred" / "scene_0002.png");
  EXPECT_EQ(cli("eval " + p("pred") + " " + p("masks") + " " + p("out")).code, 0);
}

TEST_F(Cli, BatchPartialFailureExitsOne) {
  {
    std::ofstream bad(dir_ / "images" / "broken.png");
    bad << "x";
  }
  const auto b = cli("--segments 100 --grid 16 batch --input-dir " + p("images") +
                     " --output-dir " + p("out"));
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.out.find("FAILED broken"), std::string::npos);
}

}  // namespace
}  // namespace sigrid
