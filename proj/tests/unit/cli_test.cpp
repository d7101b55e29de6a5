#include <gtest/gtest.h>

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

namespace tu = cloudadl::testing;
namespace fs = std::filesystem;

namespace {

using Outcome = tu::CliOutcome;
using tu::slurp;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cloudadl-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) { return tu::run_cli(args, dir_); }
  std::string model(const std::string& name) { return "'" + (tu::models_dir() / name).string() + "'"; }
  fs::path write(const std::string& name, std::string_view text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckCleanModelIsSilent) {
  Outcome o = run("check " + model("messages.arc") + " " + model("sensor_channel.arc"));
  EXPECT_EQ(o.status, 0);
  EXPECT_EQ(o.out, "");
  EXPECT_EQ(o.err, "");
}

TEST_F(Cli, CheckReportsDiagnostics) {
  fs::path bad = write("bad.arc", R"(message Update { sensor: integer; }
message Ack { sensor: integer; }
component S { port in Update i; port out Ack o; component F f; connect i -> f.i;
  connect f.o -> o; }
component F { port in Update i; port out Update o; behavior forward(); }
)");
  Outcome o = run("check '" + bad.string() + "'");
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(o.out, "");
  EXPECT_NE(o.err.find(bad.string() + ":4:"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("E_TYPE_MISMATCH"), std::string::npos) << o.err;
}

TEST_F(Cli, CheckMissingFile) {
  Outcome o = run("check '" + (dir_ / "none.arc").string() + "'");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.err.find("E_IO"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("sim").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, SimExitCodes) {
  Outcome pass = run("sim " + model("sensor_channel.scn"));
  EXPECT_EQ(pass.status, 0) << pass.err;
  EXPECT_EQ(pass.out, "PASS sensor_channel\n");

  Outcome fatal = run("sim " + model("supervision_fatal.scn"));
  EXPECT_EQ(fatal.status, 3);
  EXPECT_EQ(fatal.out.rfind("FATAL ", 0), 0u) << fatal.out;

  Outcome fail = run("sim " + model("pipeline.scn") + " --max-steps 2");
  EXPECT_EQ(fail.status, 1);
  EXPECT_EQ(fail.out.rfind("FAIL pipeline: ", 0), 0u) << fail.out;

  fs::path broken = write("broken.scn", "scenario b\nmodel nowhere.arc\nroot X\n");
  EXPECT_EQ(run("sim '" + broken.string() + "'").status, 2);
}

TEST_F(Cli, SeededTracesAreIdentical) {
  fs::path a = dir_ / "a.trace";
  fs::path b = dir_ / "b.trace";
  ASSERT_EQ(run("sim " + model("sticky_session.scn") + " --seed 7 --trace '" + a.string() + "'").status, 0);
  ASSERT_EQ(run("sim " + model("sticky_session.scn") + " --seed 7 --trace '" + b.string() + "'").status, 0);
  std::string ta = slurp(a);
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b));
  EXPECT_NE(ta.find("\tBIND\t"), std::string::npos);
}

TEST_F(Cli, ResultsAndLatencyFiles) {
  fs::path lat = write("lat.txt", "* 2\n");
  fs::path out = dir_ / "rows";
  Outcome o = run("sim " + model("sensor_channel.scn") + " --latency '" + lat.string() + "' --results '" +
                  out.string() + "'");
  EXPECT_EQ(o.status, 0) << o.out << o.err;
  std::istringstream rows(slurp(out / "root_store.rows"));
  std::size_t n = 0;
  for (std::string line; std::getline(rows, line);) ++n;
  EXPECT_EQ(n, 83u);
}

TEST_F(Cli, FmtIsIdempotent) {
  fs::path f = write("m.arc", "message M{k:integer;}component C{port in M i;behavior sink();}");
  ASSERT_EQ(run("fmt '" + f.string() + "'").status, 0);
  std::string once = slurp(f);
  EXPECT_EQ(once.rfind("message M {\n", 0), 0u) << once;
  ASSERT_EQ(run("fmt '" + f.string() + "'").status, 0);
  EXPECT_EQ(slurp(f), once);
  EXPECT_EQ(run("check '" + f.string() + "'").status, 0);
}

TEST_F(Cli, FmtLeavesBrokenFilesAlone) {
  std::string text = "component C { port in ; }\n";
  fs::path f = write("bad.arc", text);
  Outcome o = run("fmt '" + f.string() + "'");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.err.find("E_SYNTAX"), std::string::npos);
  EXPECT_EQ(slurp(f), text);
}
