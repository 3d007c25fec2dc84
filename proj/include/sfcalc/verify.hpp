#pragma once

// Fixed-seed property and agreement suites behind `sfcalc verify`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfcalc {

struct VerifyCase {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  int threads = 1;
  double tolerance_scale = 1.0;
  std::optional<std::uint64_t> seed;  // base seed override
};

struct VerifyReport {
  std::vector<VerifyCase> cases;
  bool passed() const;
  std::string table() const;
};

/// "engines", "aps", "geometry" or "all"; anything else is a ValidationError.
VerifyReport verify(const std::string& suite, const VerifyOptions& opts = {});
std::vector<std::string> suite_names();

}  // namespace sfcalc
