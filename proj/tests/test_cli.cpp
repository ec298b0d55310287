#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "aoi/cli.hpp"

namespace fs = std::filesystem;
using namespace aoi;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aoi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& text, const fs::path& sub = "out") {
    err_.str("");
    return cli::run(cli::parse_instance(text), dir_ / sub, err_);
  }
  json solution(const fs::path& sub = "out") { return json::parse(slurp(dir_ / sub / "solution.json")); }

  fs::path dir_;
  std::ostringstream err_;
};

std::string input_error(const std::string& text, std::optional<cli::Mode> forced = std::nullopt) {
  try {
    cli::parse_instance(text, forced);
  } catch (const cli::InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(CliParse, Diagnostics) {
  EXPECT_NE(input_error("{\"mode\": \"sweep\", \"T\": 10,\n \"energy\": [[0, 20]] \"N_max\": 3}").find("line 2"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"sweep","T":10,"energy":[[0,20]],"N_max":3,"colour":1})").find("'colour'"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"sweep","T":-1,"energy":[[0,20]],"N_max":3})").find("'T'"), std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"arrivals","T":10,"energy":[[0,3]]})").find("'arrivals'"), std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"arrivals","T":10,"energy":[[0,3]],"arrivals":[2,1]})").find("'arrivals'"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"arrivals","T":10,"energy":[[0,3],[2,1]],"arrivals":[2]})").find("'energy'"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"sweep","T":10,"energy":[[0,20]],"N_max":3})", cli::Mode::Arrivals)
                .find("'mode'"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"mode":"validate","T":10,"energy":[[0,20]],"N":4})").find("'N'"), std::string::npos);
}

TEST(CliParse, ModeFromSubcommand) {
  const cli::ProblemInstance in = cli::parse_instance(R"({"T":10,"energy":[[0,20]],"N_max":3})", cli::Mode::Sweep);
  EXPECT_EQ(in.mode, cli::Mode::Sweep);
  EXPECT_EQ(*in.max_updates, 3);
  EXPECT_DOUBLE_EQ(in.B, 1.0);
}

TEST_F(CliRun, SweepArtifacts) {
  ASSERT_EQ(run(R"({"mode":"sweep","T":10,"energy":[[0,20]],"N_max":10})"), cli::exit_code::ok);
  const json s = solution();
  EXPECT_EQ(s["status"], "optimal");
  EXPECT_EQ(s["N"], 5);
  EXPECT_NEAR(s["age"].get<double>(), 14.3637486355893, 1e-8);
  std::istringstream csv(slurp(dir_ / "out" / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "N,feasible,d,age");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const std::string head = std::to_string(rows) + (rows >= 8 ? ",0," : ",1,");
    EXPECT_EQ(line.rfind(head, 0), 0u) << line;
  }
  EXPECT_EQ(rows, 10);
}

TEST_F(CliRun, ArrivalsRecord) {
  ASSERT_EQ(run(R"({"mode":"arrivals","T":10,"energy":[[0,3]],"arrivals":[2]})"), cli::exit_code::ok);
  const json s = solution();
  EXPECT_NEAR(s["policy"]["t"][0].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(s["policy"]["d"][0].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(s["age"].get<double>(), 36.0, 1e-8);
  EXPECT_TRUE(s["residuals"]["kkt_pass"].get<bool>());
  EXPECT_EQ(slurp(dir_ / "out" / "trajectory.csv").substr(0, 9), "time,age\n");
}

TEST_F(CliRun, InfeasibleExitCode) {
  EXPECT_EQ(run(R"({"mode":"arrivals","T":10,"energy":[[0,1.3]],"arrivals":[2]})"), cli::exit_code::infeasible);
  const json s = solution();
  EXPECT_EQ(s["status"], "infeasible");
  EXPECT_EQ(s["constraint"], "energy_below_shannon_floor");
  EXPECT_EQ(run(R"({"mode":"controlled","T":10,"energy":[[0,1.5]],"N":2})"), cli::exit_code::infeasible);
  EXPECT_EQ(run(R"({"mode":"delay","T":10,"energy":[[0,2]],"arrivals":[1,2]})"), cli::exit_code::infeasible);
}

TEST_F(CliRun, ByteStableAndReplayable) {
  const std::string text = R"({"mode":"delay","T":10,"energy":[[0,6]],"arrivals":[1,1.5,4]})";
  ASSERT_EQ(run(text, "a"), cli::exit_code::ok);
  ASSERT_EQ(run(text, "b"), cli::exit_code::ok);
  ASSERT_EQ(run(slurp(dir_ / "a" / "instance.json"), "c"), cli::exit_code::ok);
  for (const char* f : {"instance.json", "solution.json", "trajectory.csv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "c" / f)) << f;
  }
  const json s = solution("a");
  EXPECT_EQ(s["objective_kind"], "delay");
  EXPECT_LE(s["age_optimal"]["age"].get<double>(), s["age"].get<double>() + 1e-9);
}

TEST_F(CliRun, ValidatePasses) {
  ASSERT_EQ(run(R"({"mode":"validate","T":10,"energy":[[0,20]],"N":2,"seed":3,"count":2})"), cli::exit_code::ok);
  const json v = json::parse(slurp(dir_ / "out" / "validation.json"));
  EXPECT_EQ(v["status"], "passed");
}
