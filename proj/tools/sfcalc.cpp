// sfcalc: run scenario files and verification suites.
//
// Exit codes: 0 success, 1 failed assertion or suite, 2 parse/validation error
// or unknown suite, 3 numeric failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "sfcalc/errors.hpp"
#include "sfcalc/scenario.hpp"
#include "sfcalc/verify.hpp"

namespace {

int run(const std::string& file, const std::string& out, const sfcalc::RunOptions& opts) {
  const auto sc = sfcalc::load_scenario(file);
  const auto rec = sfcalc::run_scenario(sc, opts);
  sfcalc::write_artifacts(rec, sc, out, opts.timings);
  std::cout << sfcalc::to_csv(rec, opts.timings);
  if (!rec.passed) {
    for (const auto& f : rec.failures) std::cerr << "assertion failed: " << f << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral flow and APS index calculator"};
  app.set_version_flag("--version", SFCALC_VERSION);
  app.require_subcommand(1);

  int threads = 1;
  double tolerance_scale = 1.0;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
  app.add_option("--tolerance-scale", tolerance_scale, "Multiply assertion tolerances")
      ->check(CLI::PositiveNumber);

  std::string file, out = ".";
  bool timings = false;
  auto* run_cmd = app.add_subcommand("run", "Execute a scenario file");
  run_cmd->add_option("scenario", file, "Scenario file (JSON, schema 1)")->required();
  run_cmd->add_option("--out", out, "Directory for the CSV and log");
  run_cmd->add_flag("--timings", timings, "Record runtimes in the CSV");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", suite, "engines | aps | geometry | all")->required();

  auto* list_cmd = app.add_subcommand("list-scenarios", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto seed = sfcalc::seed_from_environment();
    if (*run_cmd) {
      sfcalc::RunOptions opts{threads, tolerance_scale, timings, seed};
      return run(file, out, opts);
    }
    if (*verify_cmd) {
      const auto rep = sfcalc::verify(suite, {threads, tolerance_scale, seed});
      std::cout << rep.table();
      return rep.passed() ? 0 : 1;
    }
    if (*list_cmd) {
      for (const auto& p : sfcalc::bundled_scenarios())
        std::cout << p.stem().string() << "  " << p.string() << "\n";
      return 0;
    }
  } catch (const sfcalc::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const sfcalc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
