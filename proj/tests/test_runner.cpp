#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gbbm/runner.hpp"

using namespace gbbm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gbbm_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_transport() {
  ExperimentConfig c;
  c.experiment = Experiment::transport;
  c.n_modes = 4;
  c.t = 0.2;
  c.dt = 1e-2;
  c.samples = 1000;
  c.r = 20.0;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("outputs carry headers") {
    ExperimentConfig c;
    c.experiment = Experiment::conservation;
    c.n_modes = 16;
    c.t = 1.0;
    c.dt = 1e-2;
    c.out_dir = fresh_dir("headers").string();
    const ReportBundle report = run(c);
    CHECK(report.passed);
    CHECK(report.config_hash == c.hash());
    REQUIRE(report.files.size() == 2);

    const nlohmann::json j = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "conservation.json"));
    CHECK(j["header"]["tool"] == kToolName);
    CHECK(j["header"]["version"] == tool_version());
    CHECK(j["header"]["config_hash"] == c.hash());
    CHECK(j["status"] == "pass");
    CHECK(j["results"]["max_relative_drift"].get<double>() < 1e-6);
    CHECK(j["config"] == c.canonical_json());

    std::istringstream csv(slurp(fs::path(c.out_dir) / "conservation.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == std::string("# tool: gbbm ") + tool_version());
    std::getline(csv, line);
    CHECK(line == "# config_hash: " + c.hash());
    std::getline(csv, line);
    CHECK(line == "# experiment: conservation");
    std::getline(csv, line);
    CHECK(line == "# status: pass");
    std::getline(csv, line);
    CHECK(line == "t,conserved,relative_drift");
    CHECK_FALSE(fs::exists(fs::path(c.out_dir) / "conservation.json.partial"));
  }

  TEST_CASE("runs are byte identical across worker counts") {
    ExperimentConfig c = small_transport();
    c.out_dir = fresh_dir("w1").string();
    c.workers = 1;
    run(c);
    ExperimentConfig d = c;
    d.out_dir = fresh_dir("w4").string();
    d.workers = 4;
    run(d);
    for (const char* name : {"transport.json", "transport.csv"})
      CHECK(slurp(fs::path(c.out_dir) / name) == slurp(fs::path(d.out_dir) / name));
  }

  TEST_CASE("transport at t = 0 passes exactly") {
    ExperimentConfig c = small_transport();
    c.t = 0.0;
    c.out_dir = fresh_dir("t0").string();
    const ReportBundle report = run(c);
    CHECK(report.passed);
    CHECK(report.results["direct"]["value"] == report.results["plain"]["value"]);
    CHECK(report.results["weighted"]["value"] == report.results["plain"]["value"]);
  }

  TEST_CASE("singular demo") {
    ExperimentConfig c;
    c.experiment = Experiment::singular_demo;
    c.gamma = 1.4;
    c.out_dir = fresh_dir("singular").string();
    const ReportBundle report = run(c);
    CHECK(report.passed);
    CHECK(report.results["growth_exponent"].get<double>() == doctest::Approx(0.2).epsilon(0.25));
  }

  TEST_CASE("invalid configs write nothing") {
    ExperimentConfig c;
    c.gamma = 0.5;
    c.out_dir = fresh_dir("invalid").string();
    CHECK_THROWS_AS(run(c), ValidationError);
    CHECK_FALSE(fs::exists(c.out_dir));
    try {
      run(c);
    } catch (const ValidationError& e) {
      CHECK_FALSE(e.diagnostics().empty());
    }
  }

  TEST_CASE("output directory resolution") {
    ExperimentConfig c;
    c.out_dir = "explicit";
    CHECK(resolve_out_dir(c) == "explicit");
    c.out_dir.clear();
    ::setenv("GBBM_OUT_DIR", "/tmp/from_env", 1);
    CHECK(resolve_out_dir(c) == "/tmp/from_env");
    ::unsetenv("GBBM_OUT_DIR");
    CHECK(resolve_out_dir(c) == "gbbm_out");
  }
}
