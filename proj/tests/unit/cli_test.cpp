#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>

#include "cli.hpp"
#include "irisbench/manifest.hpp"
#include "irisbench/protocols.hpp"
#include "oracles.hpp"

using namespace irisbench;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "irisbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = oracle::scratch_dir("cli"); }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthGenerateTwentySubjects) {
  ASSERT_EQ(run({"-q", "--workers", "1", "synth", "generate", "--subjects", "20", "--seed", "1", "--out", path("c"),
                 "--closed-eye", "0", "--out-of-frame", "0", "--motion-blur", "0"}),
            cli::kExitOk);
  EXPECT_EQ(load_manifest(path("c/manifest.jsonl")).size(), 19800u);
}

TEST_F(Cli, DilationIdentificationIsRejected) {
  ASSERT_EQ(run({"-q", "synth", "generate", "--subjects", "2", "--seed", "1", "--out", path("c")}), cli::kExitOk);
  testing::internal::CaptureStderr();
  const int code = run({"protocol", "build", "--in", path("c/manifest.jsonl"), "--name", "dilation", "--task",
                        "identification", "--eye", "left", "--seed", "1", "--out", path("p.csv")});
  const auto err = testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, cli::kExitDomain);
  EXPECT_NE(err.find("protocol 'dilation' is not defined for identification"), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(path("p.csv")));
}

TEST_F(Cli, UsageErrors) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"synth", "generate", "--subjects", "2", "--out", path("c")}), cli::kExitUsage);
  EXPECT_EQ(run({"synth", "generate", "--subjects", "2", "--seed", "1", "--out", path("c"), "--bogus"}),
            cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"encode", "--in", "x", "--out", "y", "--method", "sift"}), cli::kExitUsage);
  const auto err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("--seed"), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(path("c")));
}

TEST_F(Cli, MissingInputIsDomainError) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"clean", "--in", path("none.jsonl"), "--out", path("o.jsonl")}), cli::kExitDomain);
  testing::internal::GetCapturedStderr();
}

TEST_F(Cli, ConfigFillsUnsetFlags) {
  std::ofstream(path("run.cfg")) << "# corpus\nsubjects = 2\nseed=4\nclosed_eye=0\nworkers=2\n";
  ASSERT_EQ(run({"-q", "--config", path("run.cfg"), "synth", "generate", "--out", path("a")}), cli::kExitOk);
  const auto a = load_manifest(path("a/manifest.jsonl"));
  EXPECT_EQ(a.size(), 1980u);
  // An explicit flag wins over the file.
  ASSERT_EQ(run({"-q", "--config", path("run.cfg"), "synth", "generate", "--subjects", "1", "--out", path("b")}),
            cli::kExitOk);
  EXPECT_EQ(load_manifest(path("b/manifest.jsonl")).size(), 990u);
  std::ofstream(path("bad.cfg")) << "no_such_flag=1\n";
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"--config", path("bad.cfg"), "synth", "generate", "--out", path("c")}), cli::kExitUsage);
  testing::internal::GetCapturedStderr();
}

TEST_F(Cli, PipelineToVerificationReport) {
  auto ok = [](int code) { ASSERT_EQ(code, cli::kExitOk); };
  ok(run({"-q", "synth", "generate", "--subjects", "3", "--seed", "3", "--out", path("c")}));
  ok(run({"-q", "clean", "--in", path("c/manifest.jsonl"), "--out", path("clean.jsonl")}));
  ok(run({"-q", "quality", "score", "--in", path("clean.jsonl"), "--out", path("scored.jsonl")}));
  ok(run({"-q", "split", "--in", path("scored.jsonl"), "--out", path("split.jsonl"), "--seed", "3", "--ratio", "0.34"}));
  const auto records = load_manifest(path("split.jsonl"));
  for (const auto& r : records) {
    ASSERT_TRUE(r.quality && r.category && r.split);
  }
  ok(run({"-q", "protocol", "build", "--in", path("split.jsonl"), "--name", "any", "--task", "verification", "--eye",
          "left", "--seed", "3", "--genuine-cap", "300", "--impostor-cap", "30", "--out", path("pairs.csv")}));
  const auto pairs = load_pairs(path("pairs.csv"));
  EXPECT_EQ(pairs.genuine_count(), 300u);
  EXPECT_EQ(pairs.pairs.size(), 330u);
}

TEST_F(Cli, EvalVerifyReportsEachFar) {
  ASSERT_EQ(run({"-q", "synth", "generate", "--subjects", "4", "--seed", "5", "--out", path("c")}), cli::kExitOk);
  ASSERT_EQ(run({"-q", "quality", "score", "--in", path("c/manifest.jsonl"), "--out", path("s.jsonl")}),
            cli::kExitDomain);  // degraded captures carry no annotation
  ASSERT_EQ(run({"-q", "clean", "--in", path("c/manifest.jsonl"), "--out", path("clean.jsonl")}), cli::kExitOk);
  ASSERT_EQ(run({"-q", "quality", "score", "--in", path("clean.jsonl"), "--out", path("s.jsonl")}), cli::kExitOk);
  ASSERT_EQ(run({"-q", "protocol", "build", "--in", path("s.jsonl"), "--name", "control", "--task", "verification",
                 "--eye", "left", "--seed", "5", "--genuine-cap", "60", "--impostor-cap", "200", "--out",
                 path("p.csv")}),
            cli::kExitOk);
  ASSERT_EQ(run({"-q", "encode", "--in", path("s.jsonl"), "--pairs", path("p.csv"), "--method", "bbox", "--out",
                 path("t.irtb")}),
            cli::kExitOk);
  ASSERT_EQ(run({"-q", "match", "--pairs", path("p.csv"), "--templates", path("t.irtb"), "--out", path("sc.csv")}),
            cli::kExitOk);
  ASSERT_EQ(run({"-q", "eval", "verify", "--pairs", path("p.csv"), "--scores", path("sc.csv"), "--far",
                 "1e-1,1e-3,1e-5", "--out", path("r.json")}),
            cli::kExitOk);
  std::ifstream in(path("r.json"));
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j.size(), 1u);
  ASSERT_EQ(j[0]["points"].size(), 3u);
  EXPECT_FALSE(j[0]["points"][0]["frr"].is_null());
  EXPECT_TRUE(j[0]["points"][2]["frr"].is_null());  // 200 impostors cannot resolve 1e-5
  ASSERT_EQ(run({"-q", "report", "--in", path("r.json"), "--out", path("r.txt")}), cli::kExitOk);
  std::ifstream txt(path("r.txt"));
  std::string header;
  std::getline(txt, header);
  EXPECT_NE(header.find("FRR@1e-05"), std::string::npos);
}
