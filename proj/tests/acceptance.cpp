// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sfcalc/apsindex.hpp"
#include "sfcalc/engines.hpp"
#include "sfcalc/generators.hpp"
#include "sfcalc/geometry.hpp"
#include "sfcalc/quadrature.hpp"

using namespace sfcalc;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    out.ok = false;
    out.detail += " [over budget " + std::to_string(static_cast<int>(budget_s)) + " s]";
  }
  if (!out.ok) ++failures;
  std::printf("[%s] %2d %-34s %7.2f s  %s\n", out.ok ? "PASS" : "FAIL", id, title, secs,
              out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void worse(double& acc, double v) { acc = std::max(acc, v); }

double all_engines_deviation(const OperatorPath<cd>& p, double expected, bool aps,
                             int grid = 200) {
  double dev = 0.0;
  worse(dev, std::abs(sf_crossing(p).value - expected));
  worse(dev, std::abs(sf_phillips(p).value - expected));
  for (double s : {0.5, 2.0, 8.0}) worse(dev, std::abs(sf_integral(p, s).raw - expected));
  for (const auto& id : ChiProfile::ids())
    worse(dev, std::abs(sf_appendix(p, ChiProfile::by_id(id), {true}).raw - expected));
  if (aps) {
    SuspensionProblem<cd> prob{p};
    prob.grid = grid;
    worse(dev, std::abs(quantize(aps_index(prob), p.model()) - expected));
  }
  return dev;
}

Outcome engine_agreement() {
  int bad = 0;
  double dev = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const auto m = random_model(rng, 3, 16);
    const auto p = random_path(rng, m, 3);
    const double c = sf_crossing(p).value;
    double d = 0.0;
    for (double s : {0.5, 2.0, 8.0}) worse(d, std::abs(sf_integral(p, s).raw - c));
    for (const auto& chi : {ChiProfile::sine_smoothstep(), ChiProfile::quintic()})
      worse(d, std::abs(sf_appendix(p, chi, {true}).raw - c));
    worse(dev, d);
    if (sf_phillips(p).value != c || !(d < 1e-6)) ++bad;
  }
  return {bad == 0, "50 paths, " + std::to_string(bad) + " failing, max deviation " + fmt("%.2e", dev)};
}

Outcome index_equals_flow() {
  int bad = 0, ambiguous = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(100 + seed);
    const auto m = random_small_model(rng, 2, 8);
    const auto p = random_flat_path(rng, m, 3);
    const double c = sf_crossing(p).value;
    for (auto scheme : {Scheme::forward_upwind, Scheme::implicit_midpoint}) {
      SuspensionProblem<cd> prob{p};
      prob.scheme = scheme;
      try {
        const auto r = aps_index_report(prob);
        if (quantize(r.index, m) != c) ++bad;
        worst_gap = std::min(worst_gap, r.smallest_above / r.threshold);
      } catch (const NumericError&) {
        ++ambiguous;
      }
    }
  }
  return {bad == 0 && ambiguous == 0,
          "30 paths x 2 schemes, " + std::to_string(bad) + " mismatches, " +
              std::to_string(ambiguous) + " ambiguous, smallest nonzero singular value at " + fmt("%.1e", worst_gap) + " x threshold"};
}

Outcome single_crossing() {
  const auto p = single_crossing_path(false);
  bool ok = sf_crossing(p).value == 1.0 && sf_phillips(p).value == 1.0;
  for (const auto& id : ChiProfile::ids()) ok = ok && sf_appendix(p, ChiProfile::by_id(id)).value == 1.0;
  SuspensionProblem<cd> prob{p};
  prob.geometry = ApsGeometry::cylinder;
  ok = ok && aps_index(prob) == 1.0;
  double dev = 0.0;
  for (double s : {0.5, 1.0, 4.0}) {
    const auto r = sf_integral(p, s, 1e-13);
    ok = ok && r.value == 1.0;
    const auto& d = r.diagnostics;
    worse(dev, std::abs(d.at("integral_term") - std::erf(std::sqrt(s))));
    worse(dev, std::abs(0.5 * (d.at("eta_end") - d.at("eta_start")) - std::erfc(std::sqrt(s))));
    worse(dev, std::abs(d.at("kernel_end") - d.at("kernel_start")));
    worse(dev, std::abs(r.raw - 1.0));
  }
  return {ok && dev < 1e-12, "term decomposition deviation " + fmt("%.1e", dev)};
}

Outcome involutions() {
  struct Case {
    double expected;
    WeightedBlockModel m;
    std::vector<Eigen::Index> minus;
  };
  const std::vector<Case> cases{{1.0, WeightedBlockModel::single(3), {1}},
                                {2.0, WeightedBlockModel::single(4), {2}},
                                {3.0, WeightedBlockModel::single(6), {3}},
                                {1.5, WeightedBlockModel({{3, 1.0}, {2, 0.5}}), {1, 1}}};
  double dev = 0.0;
  std::uint64_t seed = 40;
  for (const auto& c : cases) {
    Rng rng(seed++);
    worse(dev, all_engines_deviation(involution_path(rng, c.m, c.minus), c.expected, true));
  }
  return {dev < 1e-6, "tr(P-) in {1, 2, 3, 1.5}, max deviation " + fmt("%.2e", dev)};
}

Outcome dirac() {
  const auto rep = dirac_family_scenario(-1.0, 1.0, FrequencyModel::integer_lattice());
  const double err = std::abs(rep.flow - 1.0 / std::numbers::pi);
  return {err < 1e-7 && rep.max_kernel_trace == 0.0,
          "flow " + fmt("%.10f", rep.flow) + ", error " + fmt("%.1e", err) + ", max kernel trace " +
              fmt("%g", rep.max_kernel_trace)};
}

Outcome signature_vanishing() {
  SignatureFlowOptions o;
  o.s_grid.clear();
  double dev = 0.0;
  bool ok = true;
  for (const char* name : {"breathing", "tilt", "mixed"}) {
    const auto rep = signature_flow_scenario(CircleMetricPath::named(name, 16), o);
    for (const auto& [k, v] : rep.engines) worse(dev, std::abs(v));
    ok = ok && rep.aps_index == 0.0 && rep.kernel_trace_min == 2.0 && rep.kernel_trace_max == 2.0;
  }
  return {ok && dev < 1e-6, "3 metrics, max |flow| " + fmt("%.1e", dev)};
}

Outcome cheeger_gromov() {
  const std::vector<double> s_grid{2, 4, 16, 64, 256};
  bool holds = true, monotone = true;
  double worst_ratio = 0.0;
  for (const char* name : {"breathing", "tilt", "mixed"}) {
    const auto path = hermitian_signature_path(CircleMetricPath::named(name, 16));
    std::vector<double> integrated;
    for (double s : s_grid) {
      for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto b = cg_bound(path.eval(u), s);
        holds = holds && b.lhs <= b.term_I + b.term_II;
      }
      const auto q = integrate([&](double u) { return cg_bound(path.eval(u), s).lhs; }, 0.0, 1.0,
                               {1e-12}, path.nodes());
      integrated.push_back(q.value);
    }
    for (std::size_t i = 1; i < integrated.size(); ++i)
      monotone = monotone && integrated[i] < integrated[i - 1];
    worse(worst_ratio, integrated.back() / integrated.front());
  }
  return {holds && monotone && worst_ratio < 1e-3,
          std::string(holds ? "bound holds" : "bound violated") + ", " +
              (monotone ? "monotone" : "not monotone") + ", final/initial " + fmt("%.1e", worst_ratio)};
}

Outcome structural() {
  int bad = 0, total = 0;
  auto sf = [](const OperatorPath<cd>& p) { return sf_crossing(p).value; };
  auto check = [&](double lhs, double rhs) {
    ++total;
    if (std::abs(lhs - rhs) > 1e-9) ++bad;
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(700 + seed);
    const auto m = random_model(rng, 2, 6);
    const auto a = random_path(rng, m, 3);
    const double fa = sf(a);

    const OperatorPath<cd> b({0.0, 0.5, 1.0}, {a.back(), random_block_hermitian(rng, m),
                                               random_invertible(rng, m)});
    check(sf(concatenate(a, b)), fa + sf(b));
    check(sf_phillips(concatenate(a, b)).value, sf_phillips(a).value + sf_phillips(b).value);

    check(sf(reparametrize<cd>(a, [](double u) { return std::sin(0.5 * std::numbers::pi * u); }, 25)), fa);
    check(sf(reparametrize<cd>(a, [](double u) { return u * u; }, 25)), fa);

    std::vector<Mat<cd>> gens;
    for (const auto& blk : m.blocks()) gens.push_back(random_hermitian(rng, blk.dim));
    const std::function<BlockOperator<cd>(double)> U = [&](double u) {
      std::vector<Mat<cd>> bl;
      for (const auto& g : gens) {
        Eigen::SelfAdjointEigenSolver<Mat<cd>> es(g);
        const double t = 2.0 * std::sin(std::numbers::pi * u);
        const Vec<cd> ph = (cd(0, t) * es.eigenvalues().cast<cd>()).array().exp();
        bl.push_back(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
      }
      return BlockOperator<cd>(m, bl);
    };
    check(sf(conjugate(a, U)), fa);

    const auto c = random_path(rng, random_model(rng, 2, 5), 3);
    check(sf(direct_sum(a, c)), fa + sf(c));

    check(sf(reverse(a)), -fa);
    check(sf_integral(reverse(a), 2.0).value, -sf_integral(a, 2.0).value);
  }
  return {bad == 0, std::to_string(total) + " checks over 20 seeds, " + std::to_string(bad) + " failures"};
}

Outcome halfline() {
  double rmin = 1e9, rmax = 0.0, boundary = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(300 + seed);
    const auto data = random_halfline_data(rng, 4);
    const auto P = spectral_projection(eigh(data.D0), Interval::nonnegative()).dense();
    std::vector<double> res;
    for (int K : {200, 400, 800}) {
      const Mat<cd> f = data.f(K);
      const Mat<cd> g = halfline_aps_apply_inverse(data.D0, f, data.T);
      res.push_back(halfline_residual(data.D0, g, f, data.T));
      const Vec<cd> g0 = g.row(0).transpose();
      worse(boundary, (P * g0).norm());
    }
    for (int i = 0; i < 2; ++i) {
      rmin = std::min(rmin, res[i] / res[i + 1]);
      rmax = std::max(rmax, res[i] / res[i + 1]);
    }
  }
  return {rmin > 1.7 && rmax < 2.3 && boundary < 1e-8,
          "residual ratios in [" + fmt("%.3f", rmin) + ", " + fmt("%.3f", rmax) + "], boundary " +
              fmt("%.1e", boundary)};
}

Outcome truncation() {
  int bad = 0, passing = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(500 + seed);
    const auto pair = random_perturbation_pair(rng, 5);
    const auto rep = perturbation_truncation_check(pair.D, pair.K, {});
    bool ok = rep.minimal_R.has_value();
    for (const auto& st : rep.steps) {
      if (!st.passing) continue;
      ++passing;
      ok = ok && st.agree && st.matches_full;
    }
    if (!ok) ++bad;
  }
  return {bad == 0, "10 pairs, " + std::to_string(passing) + " passing R values, " +
                        std::to_string(bad) + " failures"};
}

}  // namespace

int main() {
  criterion(1, "engine agreement", 60, engine_agreement);
  criterion(2, "index equals spectral flow", 120, index_equals_flow);
  criterion(3, "single crossing closed form", 0, single_crossing);
  criterion(4, "involution normalization", 0, involutions);
  criterion(5, "shifted Dirac type II flow", 5, dirac);
  criterion(6, "signature flow vanishes", 90, signature_vanishing);
  criterion(7, "Cheeger-Gromov bound and decay", 0, cheeger_gromov);
  criterion(8, "structural properties", 0, structural);
  criterion(9, "half-line inverse", 0, halfline);
  criterion(10, "truncation sweep", 0, truncation);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
