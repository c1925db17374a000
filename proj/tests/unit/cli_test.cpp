#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "clothgrasp/data_io.hpp"
#include "fixtures.hpp"

using namespace clothgrasp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("clothgrasp_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    for (const char* cls : {"shirt", "tshirt", "pant"}) {
      ASSERT_EQ(run(std::string("synth --class ") + cls + " --seed 300 --count 2 --out " + (dir_ / "train").string()).code, 0);
    }
    ASSERT_EQ(run("train --annotations " + (dir_ / "train/annotations.txt").string() + " --data " +
                  (dir_ / "train").string() + " --out " + (dir_ / "model.txt").string())
                  .code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static CliRun run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const std::string cmd = std::string(CLOTHGRASP_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = fs::exists(out) ? read_file(out.string()) : "";
    return r;
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("detect --model " + (dir_ / "model.txt").string()).code, 1);
  EXPECT_EQ(run("synth --class sock --seed 1 --out " + (dir_ / "x").string()).code, 1);
  EXPECT_EQ(run("detect --model " + (dir_ / "nope.txt").string() + " --input " + (dir_ / "nope.pcd").string()).code, 1);
}

TEST_F(Cli, SynthWritesSceneFiles) {
  EXPECT_TRUE(fs::exists(dir_ / "train/pant-301.pcd"));
  EXPECT_TRUE(fs::exists(dir_ / "train/pant-301_mask.pgm"));
  const auto recs = load_annotations((dir_ / "train/annotations.txt").string());
  EXPECT_EQ(recs.size(), 6u);
  const PointCloud c = read_pcd((dir_ / "train/shirt-300.pcd").string());
  ASSERT_TRUE(c.organized);
  EXPECT_EQ(c.organized->width, 640);
}

TEST_F(Cli, ModelFileHasEntries) {
  const std::string model = read_file((dir_ / "model.txt").string());
  EXPECT_EQ(model.rfind("vfh-knn v1 ", 0), 0u);
}

TEST_F(Cli, DetectIsDeterministic) {
  const std::string args = "detect --model " + (dir_ / "model.txt").string() + " --input " +
                           (dir_ / "train/pant-300.pcd").string();
  const CliRun a = run(args);
  const CliRun b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("label WaistPant"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("point_a "), std::string::npos);
  EXPECT_NE(a.out.find("point_b "), std::string::npos);
}

TEST_F(Cli, DetectDumpsMaps) {
  const fs::path maps = dir_ / "maps";
  EXPECT_EQ(run("detect --model " + (dir_ / "model.txt").string() + " --input " +
                (dir_ / "train/shirt-301.pcd").string() + " --dump-maps " + maps.string())
                .code,
            0);
  EXPECT_FALSE(fs::is_empty(maps));
}

TEST_F(Cli, DetectExitCodes) {
  const fs::path flat = dir_ / "flat.pcd";
  save_pcd(flat.string(), depth_to_cloud(fixture::plane_image(640, 480, 1.0f), {}), PcdEncoding::kBinary);
  const CliRun none = run("detect --model " + (dir_ / "model.txt").string() + " --input " + flat.string());
  EXPECT_EQ(none.code, 3);
  EXPECT_NE(none.out.find("label NoDetection"), std::string::npos) << none.out;

  const fs::path bad = dir_ / "bad.pcd";
  write_file(bad.string(), "VERSION 0.5\n");
  EXPECT_EQ(run("detect --model " + (dir_ / "model.txt").string() + " --input " + bad.string()).code, 2);
  EXPECT_EQ(run("detect --model " + bad.string() + " --input " + flat.string()).code, 2);
}

TEST_F(Cli, WrinklePrintsIndices) {
  const CliRun r = run("wrinkle --input " + (dir_ / "train/tshirt-300.pcd").string() + " --mask " +
                    (dir_ / "train/tshirt-300_mask.pgm").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("mean ", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("\nentropy "), std::string::npos);
}

TEST_F(Cli, EvalWritesReport) {
  const fs::path test = dir_ / "test";
  ASSERT_EQ(run("synth --class pant --seed 900 --out " + test.string()).code, 0);
  const fs::path report = dir_ / "report.txt";
  EXPECT_EQ(run("eval --model " + (dir_ / "model.txt").string() + " --annotations " +
                (test / "annotations.txt").string() + " --data " + test.string() + " --report " + report.string())
                .code,
            0);
  const std::string text = read_file(report.string());
  EXPECT_EQ(text.rfind("eval-report v1\n", 0), 0u);
  EXPECT_NE(text.find("image pant-900 truth W"), std::string::npos) << text;
}
