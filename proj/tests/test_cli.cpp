#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <vkpose/report.hpp>

#include "cli_config.hpp"
#include "commands.hpp"

using namespace vkpose;
using namespace vkpose::cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vkpose_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
  static int counter;
};
int TempDir::counter = 0;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr const char* kSmallConfig =
    R"({"n_keypoints": 8, "distribution": "regular", "pixel_noise_sigma": 0.0,
        "n_trials": 10, "base_seed": 5})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("an empty object parses to the default configuration") {
  CliConfig c = parse_config("{}");
  CHECK(c.scene.n_keypoints == 8);
  CHECK(c.scene.pixel_noise_sigma == 0.0);
  CHECK(c.weights.lambda1 == 100.0);
  CHECK(c.thresholds.add_fraction == 0.10);
  CHECK(c.mode == ExperimentMode::kInference);
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_config(R"({"n_keypoint": 8})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "n_keypoint");
  }
}

TEST_CASE("invalid values are rejected by key") {
  CHECK_THROWS_AS(parse_config(R"({"pixel_noise_sigma": -1.0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n_keypoints": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"distribution": "grid"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "training"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"avg_confidence": 1.0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n_keypoints": 5})"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("the config echo reparses to itself") {
  CliConfig c = parse_config(
      R"({"n_keypoints": 6, "distribution": "r-sphere", "pixel_noise_sigma": 1.5,
          "mode": "surrogate", "consistency_squared": true, "lambda2": 25.0})");
  std::string echo = config_echo_json(c);
  CliConfig back = parse_config(echo);
  CHECK(config_echo_json(back) == echo);
  CHECK(back.scene.distribution.kind == KeypointDistribution::Kind::kRSphere);
  CHECK(back.penalty == ConsistencyPenalty::kSquared);
  CHECK(back.weights.lambda2 == 25.0);
}

TEST_CASE("simulate writes reports and exits 0") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", kSmallConfig);
  std::ostringstream err;
  int code = cmd_simulate(cfg, dir.at("out.csv"), dir.at("out.json"), err);
  CHECK(code == 0);
  CHECK(err.str().empty());

  std::string csv = slurp(dir.at("out.csv"));
  CHECK(csv.rfind(kTrialCsvHeader, 0) == 0);

  std::string json = slurp(dir.at("out.json"));
  CHECK(json.find("\"pass_rate_add\": 1.0") != std::string::npos);
  CHECK(json.find("\"n_trials\": 10") != std::string::npos);
  CHECK(json.find("\"config\"") != std::string::npos);
  CHECK(json.find("\"median_rot_deg\"") != std::string::npos);
  CHECK(json.find("\"p90_trans\"") != std::string::npos);
}

TEST_CASE("simulate rejects a negative noise level with exit code 2") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", R"({"pixel_noise_sigma": -0.5})");
  std::ostringstream err;
  int code = cmd_simulate(cfg, dir.at("o.csv"), dir.at("o.json"), err);
  CHECK(code == 2);
  CHECK(err.str().find("pixel_noise_sigma") != std::string::npos);
}

TEST_CASE("simulate reports unknown keys with exit code 2") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", R"({"noise": 1.0})");
  std::ostringstream err;
  CHECK(cmd_simulate(cfg, dir.at("o.csv"), dir.at("o.json"), err) == 2);
  CHECK(err.str().find("noise") != std::string::npos);
}

TEST_CASE("missing config files exit with code 3") {
  TempDir dir;
  std::ostringstream err;
  CHECK(cmd_simulate(dir.at("absent.json"), dir.at("o.csv"), dir.at("o.json"),
                     err) == 3);
}

TEST_CASE("unwritable outputs exit with code 3") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", kSmallConfig);
  std::ostringstream err;
  CHECK(cmd_simulate(cfg, (dir.path / "no_dir" / "o.csv").string(),
                     dir.at("o.json"), err) == 3);
}

TEST_CASE("repeated runs produce byte-identical csv output") {
  TempDir dir;
  std::string cfg = dir.file(
      "cfg.json",
      R"({"pixel_noise_sigma": 1.5, "n_trials": 16, "base_seed": 99})");
  std::ostringstream err;
  REQUIRE(cmd_simulate(cfg, dir.at("a.csv"), dir.at("a.json"), err) == 0);
  REQUIRE(cmd_simulate(cfg, dir.at("b.csv"), dir.at("b.json"), err) == 0);
  std::string a = slurp(dir.at("a.csv"));
  CHECK(!a.empty());
  CHECK(a == slurp(dir.at("b.csv")));
}

TEST_CASE("the thread cap environment variable is validated") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", kSmallConfig);
  ::setenv("POSE_SIM_THREADS", "abc", 1);
  std::ostringstream err;
  int code = cmd_simulate(cfg, dir.at("o.csv"), dir.at("o.json"), err);
  ::unsetenv("POSE_SIM_THREADS");
  CHECK(code == 2);
  CHECK(err.str().find("POSE_SIM_THREADS") != std::string::npos);
}

TEST_CASE("csv output does not depend on the thread cap") {
  TempDir dir;
  std::string cfg = dir.file(
      "cfg.json",
      R"({"pixel_noise_sigma": 2.0, "n_trials": 24, "base_seed": 7})");
  std::ostringstream err;
  ::setenv("POSE_SIM_THREADS", "1", 1);
  REQUIRE(cmd_simulate(cfg, dir.at("one.csv"), dir.at("one.json"), err) == 0);
  ::setenv("POSE_SIM_THREADS", "8", 1);
  REQUIRE(cmd_simulate(cfg, dir.at("many.csv"), dir.at("many.json"), err) == 0);
  ::unsetenv("POSE_SIM_THREADS");
  CHECK(slurp(dir.at("one.csv")) == slurp(dir.at("many.csv")));
}

TEST_CASE("surrogate mode summaries include the loss statistics") {
  TempDir dir;
  std::string cfg = dir.file(
      "cfg.json",
      R"({"mode": "surrogate", "pixel_noise_sigma": 2.0, "n_trials": 4,
          "refine_max_iters": 40, "base_seed": 3})");
  std::ostringstream err;
  REQUIRE(cmd_simulate(cfg, dir.at("o.csv"), dir.at("o.json"), err) == 0);
  std::string json = slurp(dir.at("o.json"));
  CHECK(json.find("\"median_initial_loss\"") != std::string::npos);
  CHECK(json.find("\"median_final_loss\"") != std::string::npos);
  CHECK(json.find("\"loss_reduced_fraction\": 1.0") != std::string::npos);
}

TEST_CASE("sweep writes one summary row per value") {
  TempDir dir;
  std::string cfg = dir.file(
      "cfg.json", R"({"n_trials": 6, "base_seed": 11})");
  std::ostringstream err;
  int code = cmd_sweep(cfg, "n_keypoints", {"4", "6", "8", "12"},
                       dir.at("sweep.csv"), err);
  CHECK(code == 0);
  std::string csv = slurp(dir.at("sweep.csv"));
  CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);
  std::size_t rows = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos;
       pos += 2) {
    ++rows;
  }
  CHECK(rows == 5);  // header + one row per value
  CHECK(csv.find("n_keypoints,4,6,0,1,1,1,1,") != std::string::npos);
}

TEST_CASE("sweep covers the distribution axis") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", R"({"n_trials": 5})");
  std::ostringstream err;
  CHECK(cmd_sweep(cfg, "distribution", {"regular", "r-sphere", "r-volume"},
                  dir.at("sweep.csv"), err) == 0);
  std::string csv = slurp(dir.at("sweep.csv"));
  CHECK(csv.find("distribution,r-sphere,5,0,1,") != std::string::npos);
}

TEST_CASE("sweep rejects unknown parameters and empty value lists") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json", "{}");
  std::ostringstream err;
  CHECK(cmd_sweep(cfg, "focal_length", {"1"}, dir.at("s.csv"), err) == 2);
  CHECK(err.str().find("focal_length") != std::string::npos);

  std::ostringstream err2;
  CHECK(cmd_sweep(cfg, "n_keypoints", {}, dir.at("s.csv"), err2) == 2);

  std::ostringstream err3;
  CHECK(cmd_sweep(cfg, "n_keypoints", {"5"}, dir.at("s.csv"), err3) == 2);

  std::ostringstream err4;
  CHECK(cmd_sweep(cfg, "pixel_noise_sigma", {"x"}, dir.at("s.csv"), err4) == 2);
}

}  // TEST_SUITE
