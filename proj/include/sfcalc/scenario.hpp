#pragma once

// Scenario documents (JSON, schema 1), their execution, and the CSV/log
// artifacts of a run.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfcalc/apsindex.hpp"
#include "sfcalc/errors.hpp"

namespace sfcalc {

/// Scenario could not be parsed or violates the schema. `where` is either
/// "line L, column C" or a JSON pointer to the offending field.
class ScenarioError : public ValidationError {
public:
  ScenarioError(const std::string& where, const std::string& what)
      : ValidationError(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

struct EngineParams {
  std::vector<double> s_grid{0.5, 2.0, 8.0};
  std::vector<std::string> chi{"default"};
  double window = 1.0;
  int phillips_depth = 20;
  bool appendix_rescale = true;
  bool appendix_regularize = false;
};

struct ApsParams {
  int M = 200;
  Scheme scheme = Scheme::forward_upwind;
  ApsGeometry geometry = ApsGeometry::interval_aps;
  double theta = 1e-7;
  std::optional<double> L;
  bool strict_flat = true;
  bool endpoint_regularize = false;
};

struct Assertions {
  std::optional<double> expected;
  double tolerance = 1e-6;
  bool agreement = false;
};

struct Scenario {
  std::string name;
  std::string model_kind;  // "blocks" | "frequency" | "circle"
  // blocks
  std::vector<Block> blocks;
  // frequency
  double density = 0.0;  // constant density; 0 means integer lattice
  double cutoff = 50.0;
  // circle
  int circle_n = 16;
  std::string metric = "breathing";
  int circle_samples = 41;

  std::string path_kind;  // "samples" | "generator" | "shifted_dirac" | "metric"
  std::vector<double> nodes;
  std::vector<std::vector<Mat<cd>>> samples;
  Interpolation interpolation = Interpolation::linear;
  std::string generator;
  std::optional<std::uint64_t> seed;
  int generator_nodes = 4;
  double u_start = -1.0, u_end = 1.0;
  int steps = 16;

  std::vector<std::string> engines;
  EngineParams params;
  ApsParams aps;
  Assertions assertions;
  std::string csv_name, log_name;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& file);

struct EngineRow {
  std::string engine;
  std::optional<double> s;
  double value = 0.0;
  double error_estimate = 0.0;
  double runtime_ms = 0.0;
  std::map<std::string, double> diagnostics;
};

struct RunOptions {
  int threads = 1;
  double tolerance_scale = 1.0;
  bool timings = false;  // record runtimes in the CSV (breaks byte-identity)
  std::optional<std::uint64_t> seed_override;
};

struct RunRecord {
  std::string scenario;
  std::vector<EngineRow> rows;
  std::optional<double> aps_index;
  std::vector<std::string> labels;  // agreement matrix rows/cols
  Eigen::MatrixXd agreement;        // value_i - value_j
  std::map<std::string, double> diagnostics;
  double wall_ms = 0.0;
  std::string version;
  std::optional<std::uint64_t> seed;
  bool passed = true;
  std::vector<std::string> failures;
};

RunRecord run_scenario(const Scenario& sc, const RunOptions& opts = {});

std::string csv_header();
std::string to_csv(const RunRecord& rec, bool timings = false);
std::string to_log(const RunRecord& rec);

/// Writes <csv_name> and <log_name> into `dir`.
void write_artifacts(const RunRecord& rec, const Scenario& sc, const std::filesystem::path& dir,
                     bool timings = false);

/// Bundled scenario files, sorted by name.
std::vector<std::filesystem::path> bundled_scenarios();

/// SFCALC_SEED, if set to an unsigned integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace sfcalc
