#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sfcalc/scenario.hpp"
#include "sfcalc/verify.hpp"

using namespace sfcalc;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = SFCALC_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"({
  "schema": 1,
  "name": "mini",
  "model": {"kind": "blocks", "blocks": [{"dim": 1, "weight": 1}]},
  "path": {"kind": "samples", "nodes": [0, 1], "samples": [[[[-1]]], [[[1]]]]},
  "engines": ["crossing", "phillips"]
})";

int cli(const std::string& args) {
  const std::string cmd = std::string(SFCALC_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("bundled scenarios parse") {
  const auto files = bundled_scenarios();
  CHECK(files.size() >= 5);
  for (const auto& f : files) {
    INFO(f.string());
    CHECK_NOTHROW(load_scenario(f));
  }
}

TEST_CASE("single crossing scenario: every engine gives 1") {
  const auto sc = load_scenario(kDir / "single_crossing.json");
  const auto rec = run_scenario(sc);
  CHECK(rec.passed);
  CHECK(rec.rows.size() == 8);
  for (const auto& r : rec.rows) {
    INFO(r.engine);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  }
  REQUIRE(rec.aps_index);
  CHECK(*rec.aps_index == 1.0);
  CHECK(rec.agreement.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("shifted Dirac scenario") {
  const auto rec = run_scenario(load_scenario(kDir / "zsign_dirac.json"));
  CHECK(rec.passed);
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0].engine == "phillips");
  CHECK(std::abs(rec.rows[0].value - 1.0 / std::numbers::pi) < 1e-7);
}

TEST_CASE("weighted involution scenario") {
  const auto rec = run_scenario(load_scenario(kDir / "involution_weighted.json"));
  CHECK(rec.passed);
  for (const auto& r : rec.rows) CHECK(r.value == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("CSV output is deterministic across runs and thread counts") {
  const auto sc = load_scenario(kDir / "random_agreement.json");
  const auto a = to_csv(run_scenario(sc, {1}));
  const auto b = to_csv(run_scenario(sc, {1}));
  const auto c = to_csv(run_scenario(sc, {3}));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.rfind(csv_header(), 0) == 0);
  CHECK(csv_header().find("scenario,engine,parameter_s,value,error_estimate,runtime_ms,seed") == 0);

  RunOptions other;
  other.seed_override = 8;
  CHECK(to_csv(run_scenario(sc, other)) != a);
}

TEST_CASE("artifacts are written") {
  const auto sc = parse_scenario(kMinimal);
  const auto rec = run_scenario(sc);
  const fs::path dir = fs::temp_directory_path() / "sfcalc_test_artifacts";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_artifacts(rec, sc, dir);
  CHECK(slurp(dir / sc.csv_name) == to_csv(rec));
  const auto log = slurp(dir / sc.log_name);
  CHECK(log.find("mini") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("parse errors carry line and column") {
  const std::string bad = "{\n  \"schema\": 1,\n  \"name\": oops\n}";
  try {
    parse_scenario(bad);
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(e.where().find("line 3") == 0);
  }
}

TEST_CASE("field errors carry a JSON pointer") {
  auto expect_where = [](std::string text, const std::string& from, const std::string& to,
                         const std::string& where) {
    text.replace(text.find(from), from.size(), to);
    try {
      parse_scenario(text);
      FAIL("expected a field error for " << where);
    } catch (const ScenarioError& e) {
      CHECK(e.where() == where);
    }
  };
  const std::string m = kMinimal;
  expect_where(m, "\"schema\": 1", "\"schema\": 2", "/schema");
  expect_where(m, "\"weight\": 1", "\"weight\": -1", "/model/blocks/0/weight");
  expect_where(m, "\"crossing\"", "\"magic\"", "/engines/0");
  expect_where(m, "\"nodes\": [0, 1]", "\"nodes\": [0, 0.5]", "/path/nodes");
  expect_where(m, "\"name\": \"mini\",", "", "/name");
}

TEST_CASE("failed assertions are reported") {
  std::string text = kMinimal;
  text.insert(text.rfind('}'), ", \"assertions\": {\"expected\": 2.0}");
  const auto rec = run_scenario(parse_scenario(text));
  CHECK_FALSE(rec.passed);
  CHECK(rec.failures.size() == 2);
}

TEST_CASE("unknown verify suite") {
  CHECK_THROWS_AS(verify("nonsense"), ValidationError);
  CHECK(suite_names().size() == 4);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = fs::temp_directory_path() / "sfcalc_cli_codes";
  fs::create_directories(dir);
  const auto out = " --out " + dir.string();
  CHECK(cli("run " + (kDir / "single_crossing.json").string() + out) == 0);

  std::ofstream(dir / "broken.json") << "{ \"schema\": 1, ";
  CHECK(cli("run " + (dir / "broken.json").string() + out) == 2);

  std::string failing = kMinimal;
  failing.insert(failing.rfind('}'), ", \"assertions\": {\"expected\": 2.0}");
  std::ofstream(dir / "failing.json") << failing;
  CHECK(cli("run " + (dir / "failing.json").string() + out) == 1);

  // put the threshold on a singular value to force an ambiguous cut
  const auto with_theta = [](double theta) {
    std::string text = kMinimal;
    const std::string from = "[\"crossing\", \"phillips\"]";
    std::ostringstream to;
    to.precision(17);
    to << "[\"aps\"], \"aps\": {\"M\": 200, \"geometry\": \"cylinder\", \"theta\": " << theta << "}";
    return text.replace(text.find(from), from.size(), to.str());
  };
  const auto probe = run_scenario(parse_scenario(with_theta(1e-7)));
  const auto& diag = probe.rows.at(0).diagnostics;
  const double theta = diag.at("smallest_above") / diag.at("sigma_max");
  REQUIRE(theta < 1e-2);
  CHECK_THROWS_AS(run_scenario(parse_scenario(with_theta(theta))), NumericError);
  std::ofstream(dir / "numeric.json") << with_theta(theta);
  CHECK(cli("run " + (dir / "numeric.json").string() + out) == 3);

  CHECK(cli("verify nonsense") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("list-scenarios") == 0);
  fs::remove_all(dir);
}
