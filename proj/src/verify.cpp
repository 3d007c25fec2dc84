#include "sfcalc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "sfcalc/apsindex.hpp"
#include "sfcalc/chi.hpp"
#include "sfcalc/engines.hpp"
#include "sfcalc/generators.hpp"
#include "sfcalc/geometry.hpp"

namespace sfcalc {

namespace {

using Case = std::function<VerifyCase()>;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

VerifyCase make(const std::string& suite, const std::string& name, bool ok, std::string detail) {
  return VerifyCase{suite, name, ok, std::move(detail)};
}

// Every engine on one random path: crossing = phillips, integral and
// appendix within tol.
VerifyCase engine_agreement(std::uint64_t seed, double tol) {
  Rng rng(seed);
  const auto m = random_model(rng, 3, 16);
  const auto p = random_path(rng, m, 3);
  const double c = sf_crossing(p).value;
  double worst = std::abs(sf_phillips(p).value - c);
  bool ok = worst == 0.0;
  for (double s : {0.5, 2.0, 8.0}) worst = std::max(worst, std::abs(sf_integral(p, s).raw - c));
  for (const auto& id : ChiProfile::ids())
    worst = std::max(worst, std::abs(sf_appendix(p, ChiProfile::by_id(id), {true}).raw - c));
  ok = ok && worst < tol;
  return make("engines", "agreement seed " + std::to_string(seed), ok,
              "flow " + num(c) + ", max deviation " + num(worst));
}

VerifyCase structural(const std::string& prop, std::uint64_t seed) {
  Rng rng(seed);
  const auto m = random_model(rng, 2, 6);
  const auto a = random_path(rng, m, 3);
  auto sf = [](const OperatorPath<cd>& p) { return sf_crossing(p).value; };
  double lhs = 0.0, rhs = 0.0;
  if (prop == "concatenation") {
    const auto end = random_invertible(rng, m);
    const auto b = OperatorPath<cd>({0.0, 0.5, 1.0}, {a.back(), random_block_hermitian(rng, m), end});
    lhs = sf(concatenate(a, b));
    rhs = sf(a) + sf(b);
  } else if (prop == "reparametrization") {
    lhs = sf(reparametrize(a, [](double u) { return u * u * (3.0 - 2.0 * u); }, 17));
    rhs = sf(a);
  } else if (prop == "conjugation") {
    const auto H = random_block_hermitian(rng, m);
    auto U = [&](double u) {
      const auto dec = eigh(H);
      std::vector<Mat<cd>> blocks;
      for (std::size_t b = 0; b < m.block_count(); ++b) {
        const auto& e = dec.block(b);
        Vec<cd> ph(e.values.size());
        for (Eigen::Index k = 0; k < ph.size(); ++k)
          ph(k) = std::exp(cd(0.0, 3.0 * std::sin(std::numbers::pi * u) * e.values(k)));
        blocks.push_back(e.vectors * ph.asDiagonal() * e.vectors.adjoint());
      }
      return BlockOperator<cd>(m, blocks);
    };
    lhs = sf(conjugate(a, std::function<BlockOperator<cd>(double)>(U)));
    rhs = sf(a);
  } else if (prop == "direct_sum") {
    const auto m2 = random_model(rng, 2, 6);
    const auto b = random_path(rng, m2, 3);
    lhs = sf(direct_sum(a, b));
    rhs = sf(a) + sf(b);
  } else {
    lhs = sf(reverse(a));
    rhs = -sf(a);
  }
  return make("engines", prop + " seed " + std::to_string(seed), std::abs(lhs - rhs) < 1e-9,
              num(lhs) + " vs " + num(rhs));
}

VerifyCase index_equals_flow(std::uint64_t seed, Scheme scheme) {
  Rng rng(seed);
  const auto m = random_small_model(rng, 2, 8);
  const auto p = random_flat_path(rng, m, 3);
  const double c = sf_crossing(p).value;
  SuspensionProblem<cd> prob{p};
  prob.scheme = scheme;
  const auto r = aps_index_report(prob);
  return make("aps", to_string(scheme) + " seed " + std::to_string(seed),
              quantize(r.index, m) == c,
              "index " + num(r.index) + ", flow " + num(c) + ", gap " + num(r.largest_below) + " | " +
                  num(r.smallest_above));
}

VerifyCase involution(double expected, const WeightedBlockModel& m, std::vector<Eigen::Index> minus,
                      std::uint64_t seed, double tol) {
  Rng rng(seed);
  const auto p = involution_path(rng, m, minus);
  std::vector<double> values{sf_crossing(p).value, sf_phillips(p).value};
  for (double s : {0.5, 2.0, 8.0}) values.push_back(sf_integral(p, s).raw);
  values.push_back(sf_appendix(p, ChiProfile::by_id("default")).raw);
  SuspensionProblem<cd> prob{p};
  values.push_back(quantize(aps_index(prob), m));
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - expected));
  return make("aps", "involution tr(P-) = " + num(expected), worst < tol,
              "max deviation " + num(worst));
}

VerifyCase halfline(std::uint64_t seed) {
  Rng rng(seed);
  const auto data = random_halfline_data(rng, 4);
  std::vector<double> res;
  double boundary = 0.0;
  for (int K : {200, 400, 800}) {
    const auto f = data.f(K);
    const auto g = halfline_aps_apply_inverse(data.D0, f, data.T);
    res.push_back(halfline_residual(data.D0, g, f, data.T));
    const auto P = spectral_projection(eigh(data.D0), Interval::nonnegative()).dense();
    boundary = std::max(boundary, (P * g.row(0).transpose()).norm());
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  const bool ok = r1 > 1.7 && r1 < 2.3 && r2 > 1.7 && r2 < 2.3 && boundary < 1e-8;
  return make("aps", "half-line inverse seed " + std::to_string(seed), ok,
              "residual ratios " + num(r1) + ", " + num(r2) + ", boundary " + num(boundary));
}

VerifyCase truncation(std::uint64_t seed) {
  Rng rng(seed);
  const auto pair = random_perturbation_pair(rng, 5);
  const auto rep = perturbation_truncation_check(pair.D, pair.K, {});
  bool ok = rep.minimal_R.has_value();
  for (const auto& st : rep.steps)
    if (st.passing && !(st.agree && st.matches_full)) ok = false;
  return make("aps", "truncation seed " + std::to_string(seed), ok,
              rep.minimal_R ? "minimal R " + num(*rep.minimal_R) : "no passing R");
}

VerifyCase signature(const std::string& metric, double tol) {
  const auto m = CircleMetricPath::named(metric, 16);
  SignatureFlowOptions o;
  const auto rep = signature_flow_scenario(m, o);
  double worst = std::abs(rep.aps_index);
  for (const auto& [k, v] : rep.engines) worst = std::max(worst, std::abs(v));
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.decay.size(); ++i)
    if (!(rep.decay[i] < rep.decay[i - 1])) decreasing = false;
  const bool ok = worst < tol && rep.kernel_trace_min == 2.0 && rep.kernel_trace_max == 2.0 &&
                  rep.symmetry_defect < 1e-8 && rep.conjugation_residual < 1e-8 && rep.cg_holds &&
                  decreasing;
  return make("geometry", "signature flow, " + metric + " metric", ok,
              "max |flow| " + num(worst) + ", conjugation residual " + num(rep.conjugation_residual));
}

VerifyCase dirac(double lo, double hi, double expected) {
  const auto rep = dirac_family_scenario(lo, hi, FrequencyModel::integer_lattice());
  const bool ok = std::abs(rep.flow - expected) < 1e-7 && rep.max_kernel_trace == 0.0;
  return make("geometry", "Dirac family u: " + num(lo) + " -> " + num(hi), ok,
              "flow " + num(rep.flow) + ", expected " + num(expected));
}

std::vector<Case> cases_for(const std::string& suite, const VerifyOptions& opts) {
  const std::uint64_t base = opts.seed.value_or(20240);
  const double ts = opts.tolerance_scale;
  std::vector<Case> cases;
  if (suite == "engines" || suite == "all") {
    for (std::uint64_t i = 0; i < 50; ++i)
      cases.push_back([=] { return engine_agreement(base + i, 1e-6 * ts); });
    for (const char* prop :
         {"concatenation", "reparametrization", "conjugation", "direct_sum", "reversal"})
      for (std::uint64_t i = 0; i < 20; ++i)
        cases.push_back([=] { return structural(prop, base + 1000 + i); });
  }
  if (suite == "aps" || suite == "all") {
    for (std::uint64_t i = 0; i < 30; ++i) {
      const auto scheme = i % 2 == 0 ? Scheme::forward_upwind : Scheme::implicit_midpoint;
      cases.push_back([=] { return index_equals_flow(base + 2000 + i, scheme); });
    }
    cases.push_back([=] { return involution(1.0, WeightedBlockModel::single(3), {1}, base, 1e-6 * ts); });
    cases.push_back([=] { return involution(2.0, WeightedBlockModel::single(4), {2}, base, 1e-6 * ts); });
    cases.push_back([=] { return involution(3.0, WeightedBlockModel::single(5), {3}, base, 1e-6 * ts); });
    cases.push_back([=] {
      return involution(1.5, WeightedBlockModel({{3, 1.0}, {2, 0.5}}), {1, 1}, base, 1e-6 * ts);
    });
    for (std::uint64_t i = 0; i < 5; ++i) cases.push_back([=] { return halfline(base + 3000 + i); });
    for (std::uint64_t i = 0; i < 10; ++i) cases.push_back([=] { return truncation(base + 4000 + i); });
  }
  if (suite == "geometry" || suite == "all") {
    for (const char* metric : {"breathing", "tilt", "mixed"})
      cases.push_back([=] { return signature(metric, 1e-6 * ts); });
    cases.push_back([] { return dirac(-1.0, 1.0, 1.0 / std::numbers::pi); });
    cases.push_back([] { return dirac(0.0, 0.0, 0.0); });
    cases.push_back([] { return dirac(-2.0, 2.0, 2.0 / std::numbers::pi); });
  }
  return cases;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const VerifyCase& c) { return c.passed; });
}

std::string VerifyReport::table() const {
  std::ostringstream o;
  std::size_t width = 4;
  for (const auto& c : cases) width = std::max(width, c.name.size());
  for (const auto& c : cases) {
    o << (c.passed ? "PASS  " : "FAIL  ") << c.suite << std::string(10 - std::min<std::size_t>(9, c.suite.size()), ' ')
      << c.name << std::string(width - c.name.size() + 2, ' ') << c.detail << "\n";
  }
  std::size_t failed = 0;
  for (const auto& c : cases) failed += !c.passed;
  o << cases.size() - failed << " passed, " << failed << " failed\n";
  return o.str();
}

std::vector<std::string> suite_names() { return {"engines", "aps", "geometry", "all"}; }

VerifyReport verify(const std::string& suite, const VerifyOptions& opts) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw ValidationError("unknown suite '" + suite + "' (expected engines, aps, geometry or all)");
  const auto cases = cases_for(suite, opts);
  VerifyReport rep;
  rep.cases.resize(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cases.size();) {
      try {
        rep.cases[i] = cases[i]();
      } catch (const std::exception& e) {
        rep.cases[i] = VerifyCase{suite, "case " + std::to_string(i), false, e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, opts.threads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

}  // namespace sfcalc
