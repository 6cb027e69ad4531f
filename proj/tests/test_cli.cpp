#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = QUADSIM_CLI;
const std::string kDefaultConfig = std::string(QUADSIM_SOURCE_DIR) + "/configs/default.yaml";

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("quadsim_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name + ".yaml");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(run("validate -c " + kDefaultConfig), 0);
  EXPECT_EQ(run("validate -c " + write_config("bad_value", "gait: {duty_factor: 2.0}\n").string()), 2);
  EXPECT_EQ(run("validate -c " + write_config("bad_key", "gait: {periodd: 0.5}\n").string()), 2);
  EXPECT_EQ(run("validate -c /nonexistent/config.yaml"), 4);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("experiment moonwalk -o " + scratch("unknown").string()), 2);
  EXPECT_EQ(run("simulate -f json,pdf -o " + scratch("formats").string()), 2);
}

TEST(Cli, SimulateIsByteIdentical) {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  ASSERT_EQ(run("simulate -s 4 -d 1 -o " + a.string()), 0);
  ASSERT_EQ(run("simulate -s 4 -d 1 -o " + b.string()), 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++files;
  }
  EXPECT_GE(files, 4);
  EXPECT_TRUE(fs::exists(a / "telemetry.csv"));
  EXPECT_TRUE(fs::exists(a / "telemetry.jsonl"));
  EXPECT_NE(slurp(a / "simulate.json").find("\"seed\": 4"), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, DivergenceExitCode) {
  const fs::path cfg = write_config("diverge", "simulation: {divergence_speed: 0.05}\n");
  EXPECT_EQ(run("simulate -d 1 -c " + cfg.string() + " -o " + scratch("diverge").string()), 3);
}

TEST(Cli, UnwritableOutputIsIoError) {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file";
  EXPECT_EQ(run("export-urdf -o " + (blocker / "sub").string()), 4);
}

TEST(Cli, ExportUrdf) {
  const fs::path out = scratch("urdf");
  ASSERT_EQ(run("export-urdf -c " + kDefaultConfig + " -o " + out.string()), 0);
  EXPECT_NE(slurp(out / "robot.urdf").find("<robot name=\"quadsim\">"), std::string::npos);
  fs::remove_all(out);
}

TEST(Cli, FeasibilityMapWithSmallGrid) {
  const fs::path cfg = write_config("grid", "experiments: {feasibility: {grid: {femur_steps: 8, tibia_steps: 8}}}\n");
  const fs::path out = scratch("feas");
  ASSERT_EQ(run("feasibility-map -f json -c " + cfg.string() + " -o " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "feasibility-map.json"));
  fs::remove_all(out);
}
