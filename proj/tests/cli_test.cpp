#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "support/temp_dir.hpp"

namespace {

using masses::testing::TempDir;

const std::string kWorkedExamples = MASSES_FIXTURE_DIR "/worked_examples";

int run(const std::string& args) {
  const std::string cmd = std::string(MASSES_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string worked_examples_args() {
  return "--annotations " + kWorkedExamples + "/annotations.jsonl --format simple-jsonl --fixture-backend " + kWorkedExamples +
         "/groups.json";
}

TEST(CliTest, EvaluateAnalyzeCompare) {
  TempDir dir;
  const auto out = dir.path().string();
  EXPECT_EQ(run("evaluate " + worked_examples_args() + " --predictions " + kWorkedExamples + "/predictions.json --out " + out +
                "/eval --round 2"),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "eval" / "samples.jsonl"));
  EXPECT_EQ(run("analyze " + worked_examples_args() + " --ses-thresholds 0.5,0.9 --out " + out + "/data"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "data" / "hist_ses_0.5.csv"));
  EXPECT_EQ(run("compare --run " + out + "/eval/samples.jsonl --metrics vqa3plus,masses_0.9 --out " + out + "/c1"),
            0);
  EXPECT_EQ(run("compare --left " + out + "/eval/samples.jsonl --right " + out + "/eval/samples.jsonl --out " +
                out + "/c2"),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "c2" / "deltas.csv"));
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  const auto out = dir.path().string();
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("evaluate --bogus"), 2);
  const auto bad = dir.write("bad.jsonl", "{not json\n");
  EXPECT_EQ(run("analyze --annotations " + bad + " --format simple-jsonl --out " + out + "/x"), 2);
  const auto empty = dir.write("empty.json", "[]");
  EXPECT_EQ(run("evaluate " + worked_examples_args() + " --predictions " + empty + " --out " + out + "/y"), 3);
  EXPECT_EQ(run("analyze " + worked_examples_args() + " --ses-thresholds 1.5 --out " + out + "/z"), 2);
  EXPECT_EQ(run("compare --run " + kWorkedExamples + "/annotations.jsonl --metrics ma --out " + out + "/w"), 2);
}

}  // namespace
