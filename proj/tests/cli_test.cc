/* Copyright 2026 The semocc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Runs the command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "semocc/io.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / "semocc_cli_test");
    fs::remove_all(*dir_);
    fs::create_directories(*dir_);
    const Result r = Run("gen --config " + Demo("noiseless.json") + " --out " +
                         (*dir_ / "scene").string());
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static std::string Demo(const char* name) {
    return (fs::path(SEMOCC_TEST_DATA_DIR) / "demo" / name).string();
  }
  static std::string Scene() { return (*dir_ / "scene" / "sequence.json").string(); }

  static Result Run(const std::string& args) {
    const fs::path out = *dir_ / "stdout.txt", err = *dir_ / "stderr.txt";
    const std::string cmd = std::string(SEMOCC_CLI) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST_F(CliTest, PipelineOnNoiselessDemo) {
  const fs::path out = *dir_ / "pipe";
  const Result r = Run("--workers 2 pipeline --kv --config " + Scene() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("miou=");
  ASSERT_NE(pos, std::string::npos) << r.out;
  EXPECT_GE(std::stod(r.out.substr(pos + 5)), 0.95);
  for (const char* f : {"vocab.txt", "grid.lvx", "aggregate.lpc", "prediction.lvx", "report.txt",
                        "labeled"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
}

TEST_F(CliTest, EvalIdenticalGridsPrintsOne) {
  const fs::path gt = *dir_ / "scene" / "frame_000" / "gt.lvx";
  const fs::path classes = *dir_ / "scene" / "classes.txt";
  const Result r = Run("eval --pred " + gt.string() + " --gt " + gt.string() + " --classes " +
                       classes.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out, HasSubstr("mIoU: 1.0000"));
}

TEST_F(CliTest, LabelReconstructVoxelizeChain) {
  const fs::path work = *dir_ / "chain";
  ASSERT_EQ(Run("label --config " + Scene() + " --out " + (work / "labeled").string()).code, 0);
  const Result rec = Run("reconstruct --config " + Scene() + " --out " + (work / "agg").string());
  ASSERT_EQ(rec.code, 0) << rec.err;
  fs::path cloud;
  for (const auto& e : fs::directory_iterator(work / "agg")) {
    if (e.path().extension() == ".lpc") cloud = e.path();
  }
  ASSERT_FALSE(cloud.empty());
  const Result vox = Run("voxelize --cloud " + cloud.string() +
                         " --grid -8,-8,-1,0.4,40,40,16 --strategy nearest --out " +
                         (work / "grid.lvx").string());
  ASSERT_EQ(vox.code, 0) << vox.err;
  EXPECT_EQ(ReadVoxelGrid(work / "grid.lvx").spec.dims(), (std::array<int, 3>{40, 40, 16}));
}

TEST_F(CliTest, AutoencoderTrainAndEncode) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Random(20, 8);
  rows.rowwise().normalize();
  const fs::path emb = *dir_ / "ae" / "emb.lem";
  WriteEmbeddings(emb, rows);
  const fs::path ckpt = *dir_ / "ae" / "ae.lae";
  const Result t = Run("ae-train --embeddings " + emb.string() + " --out " + ckpt.string() +
                       " --hidden 6 --latent 4 --epochs 5 --seed 3");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_THAT(t.out, HasSubstr("holdout"));
  const fs::path z = *dir_ / "ae" / "z.lem";
  ASSERT_EQ(Run("ae-encode --checkpoint " + ckpt.string() + " --embeddings " + emb.string() +
                " --out " + z.string())
                .code,
            0);
  EXPECT_EQ(ReadEmbeddings(z).cols(), 4);
  const fs::path back = *dir_ / "ae" / "back.lem";
  ASSERT_EQ(Run("ae-encode --decode --checkpoint " + ckpt.string() + " --embeddings " +
                z.string() + " --out " + back.string())
                .code,
            0);
  EXPECT_EQ(ReadEmbeddings(back).cols(), 8);
}

TEST_F(CliTest, AblatePrintsOrdering) {
  const Result r = Run("ablate --config " + Demo("noisy.json") + " --seeds 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out, HasSubstr("ordering: majority"));
  EXPECT_THAT(r.out, HasSubstr("sign_test"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run("eval --bogus-flag").code, 1);
  EXPECT_EQ(Run("pipeline --config " + (*dir_ / "missing.json").string()).code, 1);
  const fs::path bad = *dir_ / "bad.lvx";
  WriteFileBytes(bad, {'L', 'V', 'X', '1', 0, 0});
  const Result fmt = Run("eval --pred " + bad.string() + " --gt " + bad.string());
  EXPECT_EQ(fmt.code, 1);
  EXPECT_THAT(fmt.err, HasSubstr(bad.string()));
  EXPECT_THAT(fmt.err, HasSubstr("@ byte 4"));
  // A diverging run is a processing error.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Random(10, 4);
  WriteEmbeddings(*dir_ / "div.lem", rows);
  const Result div = Run("ae-train --embeddings " + (*dir_ / "div.lem").string() + " --out " +
                         (*dir_ / "div.lae").string() + " --hidden 3 --latent 2 --lr 1e300");
  EXPECT_EQ(div.code, 2) << div.err;
  EXPECT_THAT(div.err, HasSubstr("epoch 1"));
}

}  // namespace
}  // namespace semocc
