#include <sys/wait.h>

#include <cstdlib>

#include <gtest/gtest.h>

#include "support.hpp"

using gestgen::testing::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

// Runs the CLI through the shell with stdout and stderr captured.
Run cli(const std::string& args, const TempDir& dir) {
  const std::string log = dir.file("cli.log");
  const std::string cmd = std::string("\"") + GESTGEN_CLI + "\" " + args + " >\"" + log + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = gestgen::testing::read_bytes(log);
  return r;
}

}  // namespace

TEST(Cli, HelpListsSubcommands) {
  TempDir dir;
  const auto r = cli("--help", dir);
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"synth", "retarget", "dataset", "train", "generate", "play", "pipeline"}) {
    EXPECT_NE(r.output.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(cli("", dir).code, 2);
  EXPECT_EQ(cli("frobnicate", dir).code, 2);
  EXPECT_EQ(cli("train", dir).code, 2);
  EXPECT_EQ(cli("synth --frames notanumber", dir).code, 2);
}

TEST(Cli, MissingInputExitsThree) {
  TempDir dir;
  const auto r = cli("retarget --recording \"" + dir.file("none.jsonl") + "\"", dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.output.find("none.jsonl"), std::string::npos);
}

TEST(Cli, ValidationFailureExitsTwo) {
  TempDir dir;
  gestgen::testing::write_text(dir.file("bad.jsonl"), "{\"not\": \"a recording\"}\n");
  EXPECT_EQ(cli("retarget --recording \"" + dir.file("bad.jsonl") + "\"", dir).code, 2);
}

TEST(Cli, StagesChainThroughFiles) {
  TempDir dir;
  auto q = [&](const std::string& name) { return "\"" + dir.file(name) + "\""; };
  ASSERT_EQ(cli("synth --frames 200 --seed 2 --out " + q("s/rec.jsonl"), dir).code, 0);
  ASSERT_EQ(cli("retarget --recording " + q("s/rec.jsonl") + " --hands " + q("s/hands.jsonl") +
                    " --out " + q("poses.jsonl"),
                dir)
                .code,
            0);
  ASSERT_EQ(cli("dataset build " + q("poses.jsonl") + " --out " + q("corpus.bin"), dir).code, 0);
  ASSERT_EQ(cli("train --corpus " + q("corpus.bin") + " --epochs 3 --out " + q("model"), dir).code, 0);
  ASSERT_EQ(cli("generate --model " + q("model") + " --duration 5 --out " + q("seq.jsonl"), dir).code,
            0);
  const auto play = cli("play --seq " + q("seq.jsonl"), dir);
  EXPECT_EQ(play.code, 0);
  // 5 UMs with 2 blend frames: 28 rows plus the column header.
  EXPECT_EQ(std::count(play.output.begin(), play.output.end(), '\n'), 29);
}
