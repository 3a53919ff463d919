#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

const std::string kData = std::string(LOADGUARD_SOURCE_DIR) + "/data/";

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
  const std::string cmd = std::string(LOADGUARD_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) r.out += buf.data();
  const int raw = ::pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("loadguard-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateExitCodes) {
  const auto ok = cli("simulate " + kData + "scenarios/balanced.cfg");
  EXPECT_EQ(ok.status, 0) << ok.out;
  EXPECT_TRUE(contains(ok.out, "SAFE")) << ok.out;

  const auto over = cli("simulate " + kData + "scenarios/overload.cfg --lcd");
  EXPECT_EQ(over.status, 2) << over.out;
  EXPECT_TRUE(contains(over.out, "OVERLOAD")) << over.out;

  const auto left = cli("simulate " + kData + "scenarios/left_heavy.cfg");
  EXPECT_EQ(left.status, 2) << left.out;
  EXPECT_TRUE(contains(left.out, "IMBALANCE")) << left.out;
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto a = cli("simulate " + kData + "scenarios/balanced.cfg --seed 42");
  const auto b = cli("simulate " + kData + "scenarios/balanced.cfg --seed 42");
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(cli("simulate --no-such-flag " + kData + "scenarios/balanced.cfg").status, 1);
  EXPECT_EQ(cli("").status, 1);
  EXPECT_EQ(cli("simulate /nonexistent.cfg").status, 1);
  EXPECT_EQ(cli("rules --jurisdiction mars").status, 1);
}

TEST_F(CliTest, ReplayValidAndMalformed) {
  const auto ok = cli("replay " + kData + "traces/valid.trace");
  EXPECT_EQ(ok.status, 0) << ok.out;
  EXPECT_TRUE(contains(ok.out, "code=")) << ok.out;

  const auto bad = cli("replay " + kData + "traces/malformed.trace");
  EXPECT_EQ(bad.status, 1) << bad.out;
  EXPECT_TRUE(contains(bad.out, "malformed.trace:3:")) << bad.out;
}

TEST_F(CliTest, WeighPersistsAndAssessReplays) {
  const auto st = kData + "station/station4.cfg";
  const auto over = cli("weigh --station " + st + " --frames " + kData + "station/frames_overload.csv --data-dir " +
                        dir_.string());
  EXPECT_EQ(over.status, 2) << over.out;
  EXPECT_TRUE(contains(over.out, "flags=OVERLOAD")) << over.out;
  EXPECT_TRUE(contains(over.out, "record=rec-000001")) << over.out;

  const auto ok = cli("weigh --station " + st + " --frames " + kData + "station/frames_balanced.csv --data-dir " +
                      dir_.string());
  EXPECT_EQ(ok.status, 0) << ok.out;

  const auto records = (dir_ / "records.jsonl").string();
  EXPECT_EQ(cli("assess " + records + " --id rec-000001").status, 2);
  EXPECT_EQ(cli("assess " + records).status, 0);
  EXPECT_EQ(cli("assess " + records + " --id rec-000099").status, 1);
}

TEST_F(CliTest, WeighUsesEnvironmentDataDir) {
  const std::string env = "LOADGUARD_DATA_DIR=" + dir_.string() + " ";
  const std::string cmd = env + LOADGUARD_CLI + " weigh --station " + kData + "station/station4.cfg --frames " +
                          kData + "station/frames_balanced.csv > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "records.jsonl"));
}

TEST_F(CliTest, WeighRejectsShortStreamAndSupportsWim) {
  const auto st = kData + "station/station4.cfg";
  const auto shortr = cli("weigh --station " + st + " --frames " + kData + "station/frames_short.csv --data-dir " +
                          dir_.string());
  EXPECT_EQ(shortr.status, 1) << shortr.out;
  EXPECT_FALSE(std::filesystem::exists(dir_ / "records.jsonl"));

  const auto wim = cli("weigh --mode wim --station " + st + " --frames " + kData +
                       "station/frames_wim.csv --data-dir " + dir_.string());
  EXPECT_EQ(wim.status, 0) << wim.out;
  EXPECT_TRUE(contains(wim.out, "mode=wim")) << wim.out;
}

TEST_F(CliTest, WeighComplianceChecks) {
  const auto base = "weigh --station " + kData + "station/station4.cfg --frames " + kData +
                    "station/frames_balanced.csv --data-dir " + dir_.string();
  const auto pass = cli(base + " --jurisdiction us --verification acceptance --reference-kg 320 --axle-config 2");
  EXPECT_EQ(pass.status, 0) << pass.out;
  EXPECT_TRUE(contains(pass.out, "tolerance=pass gvw=pass")) << pass.out;
  const auto fail = cli(base + " --jurisdiction us --verification acceptance --reference-kg 300");
  EXPECT_EQ(fail.status, 2) << fail.out;
  EXPECT_TRUE(contains(fail.out, "tolerance=fail")) << fail.out;
}

TEST_F(CliTest, RulesQueries) {
  const auto us = cli("rules --jurisdiction us --verification acceptance --capacity-t 40");
  EXPECT_EQ(us.status, 0);
  EXPECT_TRUE(contains(us.out, "kg=40\n")) << us.out;

  const auto ke = cli("rules --jurisdiction kenya --verification re_verification --capacity-t 80");
  EXPECT_TRUE(contains(ke.out, "kg=20\n")) << ke.out;

  EXPECT_EQ(cli("rules --axle-config 7 --measured-kg 56000").status, 0);
  EXPECT_EQ(cli("rules --axle-config 7 --measured-kg 56001").status, 2);

  const auto extra = cli("rules --config " + kData + "station/extra_rules.cfg --axle-config 3");
  EXPECT_TRUE(contains(extra.out, "gvw_limit_kg=26000")) << extra.out;

  const auto all = cli("rules");
  EXPECT_TRUE(contains(all.out, "axle_config code=2A")) << all.out;
}

TEST_F(CliTest, CalibrateFromSpec) {
  const auto out = (dir_ / "cal.cfg").string();
  std::filesystem::create_directories(dir_);
  const auto r = cli("calibrate --spec " + kData + "station/cell120.cfg --known-mass 120 --prefix cell0. -o " + out);
  EXPECT_EQ(r.status, 0) << r.out;
  std::ifstream in(out);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_TRUE(contains(text, "cell0.scale = ")) << text;
  EXPECT_TRUE(contains(text, "cell0.tare_code = ")) << text;
  EXPECT_EQ(cli("calibrate --known-mass 120").status, 1);
}
