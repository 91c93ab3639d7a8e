#include "cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"

namespace tsroa::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    static std::atomic<int> counter{0};
    dir_ = fs::temp_directory_path() /
           ("tsroa_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "tsroa");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return main_with_args(static_cast<int>(argv.size()), argv.data());
  }

  fs::path write_spec(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

const std::string kWorked = testing::data_path("cubic_2d.sys");
const std::string kWorkedWithShear = testing::data_path("cubic_2d_shear.sys");

TEST_F(Cli, AnalyzeWorkedSystem) {
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", (dir_ / "a").string()}), kExitOk);
  const Json j = Json::parse(slurp(dir_ / "a/result.json"));
  EXPECT_EQ(j["status"], "certified");
  EXPECT_EQ(j["vertices"].size(), 4u);
  EXPECT_EQ(j["scheduling"].size(), 2u);
  EXPECT_EQ(j["P"].size(), 2u);
  EXPECT_GT(j["margin"].get<double>(), 1e-6);
  EXPECT_EQ(j["spec_hash"], content_hash(slurp(kWorked)));
  EXPECT_EQ(j["options"]["eps"].get<double>(), 1e-6);
  EXPECT_EQ(j["options"]["seed"].get<int>(), 1);

  const std::string csv = slurp(dir_ / "a/boundary.csv");
  EXPECT_EQ(csv.rfind("piece_index,x1,x2\n", 0), 0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 257);
}

TEST_F(Cli, AnalyzeLevelIsBoxLevelOfItsP) {
  // Closed form for the [-1,1] x [-0.5,0.5] box: min(1 / Pinv_11, 0.25 / Pinv_22).
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", dir_.string()}), kExitOk);
  const Json j = Json::parse(slurp(dir_ / "result.json"));
  Eigen::Matrix2d P;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) P(r, c) = j["P"][r][c].get<double>();
  const double k = j["k"].get<double>();
  const Eigen::Matrix2d Pinv = P.inverse();
  EXPECT_NEAR(k, std::min(1.0 / Pinv(0, 0), 0.25 / Pinv(1, 1)), 1e-12);
}

TEST_F(Cli, AnalyzeIsByteIdentical) {
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", (dir_ / "a").string()}), kExitOk);
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", (dir_ / "b").string()}), kExitOk);
  EXPECT_EQ(slurp(dir_ / "a/result.json"), slurp(dir_ / "b/result.json"));
  EXPECT_EQ(slurp(dir_ / "a/boundary.csv"), slurp(dir_ / "b/boundary.csv"));
}

TEST_F(Cli, AnalyzeUnstableIsInfeasible) {
  EXPECT_EQ(run_args({"analyze", testing::data_path("unstable.sys"), "--out", dir_.string()}),
            kExitInfeasible);
  const Json j = Json::parse(slurp(dir_ / "result.json"));
  EXPECT_EQ(j["status"], "lmi_infeasible");
  EXPECT_TRUE(j["pieces"].empty());
  EXPECT_FALSE(fs::exists(dir_ / "boundary.csv"));
}

TEST_F(Cli, InputErrors) {
  EXPECT_EQ(run_args({"analyze", (dir_ / "missing.sys").string(), "--out", dir_.string()}),
            kExitInputError);
  const fs::path bad = write_spec("bad.sys", "states x; dx = x + 1; domain x in [-1,1];");
  EXPECT_EQ(run_args({"analyze", bad.string(), "--out", dir_.string()}), kExitInputError);
  EXPECT_EQ(run_args({"analyze", kWorked, "--eps", "-1", "--out", dir_.string()}), kExitInputError);
  EXPECT_EQ(run_args({"analyze", kWorked, "--bogus"}), kExitInputError);
  EXPECT_EQ(run_args({}), kExitInputError);
}

TEST_F(Cli, OptionPrecedence) {
  const fs::path spec = write_spec(
      "opt.sys", "states x; dx = -x; domain x in [-1,1]; option eps = 1e-4; option seed = 9;");
  ASSERT_EQ(run_args({"analyze", spec.string(), "--seed", "3", "--out", dir_.string()}), kExitOk);
  const Json j = Json::parse(slurp(dir_ / "result.json"));
  EXPECT_EQ(j["options"]["eps"].get<double>(), 1e-4);  // file over default
  EXPECT_EQ(j["options"]["seed"].get<int>(), 3);       // flag over file
  EXPECT_EQ(j["options"]["tmax"].get<double>(), 50.0);  // default
}

TEST_F(Cli, SweepEnlarges) {
  ASSERT_EQ(run_args({"sweep", kWorkedWithShear, "--out", dir_.string()}), kExitOk);
  const Json j = Json::parse(slurp(dir_ / "sweep.json"));
  ASSERT_EQ(j["cases"].size(), 2u);
  EXPECT_EQ(j["cases"][0]["status"], "certified");
  EXPECT_EQ(j["cases"][1]["status"], "certified");
  EXPECT_EQ(j["pieces"].size(), 2u);
  const double id = j["areas"]["identity"]["area"];
  const double un = j["areas"]["union"]["area"];
  const double se = std::hypot(j["areas"]["identity"]["std_error"].get<double>(),
                               j["areas"]["union"]["std_error"].get<double>());
  EXPECT_GT(un - id, 3.0 * se);
  EXPECT_TRUE(j.contains("tool_defaults"));
  const std::string csv = slurp(dir_ / "union_boundary.csv");
  EXPECT_EQ(csv.rfind("piece_index,x1,x2\n", 0), 0u);
  EXPECT_NE(csv.find("\n1,"), std::string::npos);  // the shear piece shows on the outline
}

TEST_F(Cli, SweepAutoZeroEqualsAnalyze) {
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", (dir_ / "a").string()}), kExitOk);
  ASSERT_EQ(run_args({"sweep", kWorked, "--auto", "0", "--mc", "10000", "--out",
                      (dir_ / "s").string()}),
            kExitOk);
  const Json a = Json::parse(slurp(dir_ / "a/result.json"));
  const Json s = Json::parse(slurp(dir_ / "s/sweep.json"));
  ASSERT_EQ(s["cases"].size(), 1u);
  EXPECT_EQ(s["cases"][0]["P"], a["P"]);
  EXPECT_EQ(s["cases"][0]["k"], a["k"]);
  EXPECT_EQ(s["pieces"], a["pieces"]);
}

TEST_F(Cli, SweepAutoUsesGeneratedFamily) {
  ASSERT_EQ(run_args({"sweep", kWorked, "--auto", "3", "--mc", "10000", "--out", dir_.string()}),
            kExitOk);
  const Json j = Json::parse(slurp(dir_ / "sweep.json"));
  ASSERT_EQ(j["cases"].size(), 4u);
  EXPECT_EQ(j["cases"][1]["transform"], Json::parse("[[1.0,0.5],[0.0,1.0]]"));
  EXPECT_EQ(j["transform_source"], "auto");
}

TEST_F(Cli, SweepAllInfeasible) {
  const fs::path spec = write_spec(
      "unstable2.sys",
      "states x1 x2; dx1 = x1; dx2 = x2; domain x1 in [-1,1], x2 in [-1,1]; transform [1,1;0,1];");
  EXPECT_EQ(run_args({"sweep", spec.string(), "--out", dir_.string()}), kExitInfeasible);
  const Json j = Json::parse(slurp(dir_ / "sweep.json"));
  EXPECT_EQ(j["cases"].size(), 2u);
  EXPECT_TRUE(j["areas"].is_null());
}

TEST_F(Cli, VerifyAfterAnalyze) {
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", dir_.string()}), kExitOk);
  EXPECT_EQ(run_args({"verify", (dir_ / "result.json").string(), "--out", dir_.string()}), kExitOk);
  const Json v = Json::parse(slurp(dir_ / "verify.json"));
  EXPECT_EQ(v["total_violations"], 0);
  EXPECT_EQ(v["pieces"][0]["samples"], 500);
  EXPECT_EQ(v["spec_hash"], content_hash(slurp(kWorked)));
}

TEST_F(Cli, VerifyFlagsInflatedLevel) {
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", dir_.string()}), kExitOk);
  Json j = Json::parse(slurp(dir_ / "result.json"));
  j["pieces"][0]["k"] = j["pieces"][0]["k"].get<double>() * 100.0;
  std::ofstream(dir_ / "edited.json") << j.dump(2);
  EXPECT_EQ(run_args({"verify", (dir_ / "edited.json").string(), "--out", dir_.string()}),
            kExitViolations);
  const Json v = Json::parse(slurp(dir_ / "verify.json"));
  EXPECT_GE(v["total_violations"].get<int>(), 1);
}

TEST_F(Cli, VerifyInputErrors) {
  EXPECT_EQ(run_args({"verify", (dir_ / "none.json").string(), "--out", dir_.string()}),
            kExitInputError);
  ASSERT_EQ(run_args({"analyze", kWorked, "--out", dir_.string()}), kExitOk);
  Json j = Json::parse(slurp(dir_ / "result.json"));
  j["pieces"] = Json::array();
  std::ofstream(dir_ / "empty.json") << j.dump();
  EXPECT_EQ(run_args({"verify", (dir_ / "empty.json").string(), "--out", dir_.string()}),
            kExitInputError);
  std::ofstream(dir_ / "garbage.json") << "{not json";
  EXPECT_EQ(run_args({"verify", (dir_ / "garbage.json").string(), "--out", dir_.string()}),
            kExitInputError);
}

TEST_F(Cli, ExportBoundary) {
  ASSERT_EQ(run_args({"sweep", kWorkedWithShear, "--mc", "10000", "--out", dir_.string()}), kExitOk);
  ASSERT_EQ(run_args({"export", (dir_ / "sweep.json").string(), "--boundary-points", "10", "--out",
                      (dir_ / "e").string()}),
            kExitOk);
  const std::string csv = slurp(dir_ / "e/boundary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

TEST(ContentHash, KnownVectors) {
  EXPECT_EQ(content_hash(""), "fnv1a64:cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "fnv1a64:af63dc4c8601ec8c");
}

}  // namespace
}  // namespace tsroa::cli
