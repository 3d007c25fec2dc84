#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "sfcalc/geometry.hpp"

using namespace sfcalc;

namespace {

double kernel_trace(const SignatureOperator& op) {
  return eigh(op.hermitian()).count(Interval::closed(-1e-8, 1e-8));
}

}  // namespace

TEST_CASE("spectral derivative differentiates trigonometric polynomials exactly") {
  const int N = 9;
  const Mat<double> Dx = spectral_derivative(N);
  RealVec f(N), df(N);
  for (int j = 0; j < N; ++j) {
    const double x = 2.0 * std::numbers::pi * j / N;
    f(j) = std::sin(3 * x) + 0.5 * std::cos(x);
    df(j) = 3 * std::cos(3 * x) - 0.5 * std::sin(x);
  }
  CHECK((Dx * f - df).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flat circle: integer spectrum with a two-dimensional kernel") {
  const auto metric = CircleMetricPath::constant(8, FourierSeries{});
  const auto op = build_signature(metric, 0.3);
  const RealVec ev = eigh(op.hermitian()).eigenvalues();
  REQUIRE(ev.size() == 18);
  // Fourier oracle: -i d/dx on each form degree has eigenvalues k = -4..4.
  std::vector<double> expect;
  for (int k = -4; k <= 4; ++k) expect.insert(expect.end(), {double(k), double(k)});
  for (int i = 0; i < 18; ++i) CHECK(ev(i) == doctest::Approx(expect[i]).epsilon(1e-10));
  CHECK(kernel_trace(op) == 2.0);
}

TEST_CASE("chirality and kernel for every metric") {
  for (const auto& name : CircleMetricPath::names()) {
    const auto metric = CircleMetricPath::named(name, 8, 11);
    for (double u : {0.0, 0.35, 0.5, 1.0}) {
      const auto op = build_signature(metric, u);
      const Eigen::Index n = op.tau.rows();
      CHECK((op.tau * op.tau - Mat<cd>::Identity(n, n)).norm() < 1e-12);
      CHECK(kernel_trace(op) == 2.0);
      const RealVec ev = eigh(op.hermitian()).eigenvalues();
      CHECK((ev + ev.reverse()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("metric validation") {
  CHECK_THROWS_AS(CircleMetricPath::constant(7, FourierSeries{}), ValidationError);
  CHECK_THROWS_AS(CircleMetricPath::constant(8, FourierSeries{{0.2, 1.0}, {}}), ValidationError);
  CHECK_THROWS_AS(CircleMetricPath::named("nope", 8), ValidationError);
}

TEST_CASE("trivialization") {
  const auto tilt = CircleMetricPath::named("tilt", 16);
  CHECK((trivialization(tilt, 0.0).array() - 1.0).abs().maxCoeff() < 1e-15);
  const auto flat = CircleMetricPath::constant(16, FourierSeries{{1.2}, {0.1}});
  for (double u : {0.2, 0.7, 1.0})
    CHECK((trivialization(flat, u).array() - 1.0).abs().maxCoeff() < 1e-15);

  for (double u : {0.3, 0.6, 1.0}) {
    const RealVec U = trivialization(tilt, u);
    const RealVec g0 = build_signature(tilt, 0.0).gram, gu = build_signature(tilt, u).gram;
    const RealVec pulled = U.array().square() * g0.array();
    CHECK((pulled - gu).norm() / gu.norm() < 1e-9);
  }
}

TEST_CASE("hermitian signature path is self-adjoint with kernel trace 2 throughout") {
  const auto metric = CircleMetricPath::named("mixed", 8, 11);
  const auto p = hermitian_signature_path(metric);
  for (double u = 0.0; u <= 1.0; u += 0.125) {
    const auto b = p.eval(u);
    CHECK(eigh(b).count(Interval::closed(-1e-8, 1e-8)) == 2.0);
  }
}

TEST_CASE("conjugation identity for the heat-kernel integrand") {
  const auto metric = CircleMetricPath::named("breathing", 8, 11);
  for (double u : {0.3, 0.5}) {
    const auto [d, b] = conjugation_pair(metric, u, 2.0);
    CHECK(std::abs(d - b) < 1e-8);
  }
}

TEST_CASE("signature flow scenario on a small circle") {
  SignatureFlowOptions opts;
  opts.integral_s = {2.0};
  opts.s_grid = {4.0, 16.0, 64.0};
  opts.aps_grid = 32;
  opts.cg_points = 3;
  for (const char* name : {"flat", "breathing"}) {
    const auto rep = signature_flow_scenario(CircleMetricPath::named(name, 8, 11), opts);
    for (const auto& [k, v] : rep.engines) {
      INFO(name << " " << k);
      CHECK(std::abs(v) < 1e-6);
    }
    CHECK(rep.aps_index == 0.0);
    CHECK(rep.kernel_trace_min == 2.0);
    CHECK(rep.kernel_trace_max == 2.0);
    CHECK(rep.cg_holds);
    for (std::size_t i = 1; i < rep.decay.size(); ++i) CHECK(rep.decay[i] < rep.decay[i - 1]);
  }
}

TEST_CASE("shifted Dirac family") {
  const auto m = FrequencyModel::integer_lattice();
  const auto a = dirac_family_scenario(-1.0, 1.0, m);
  CHECK(a.flow == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-9));
  CHECK(a.max_kernel_trace == 0.0);
  CHECK(dirac_family_scenario(0.0, 0.0, m).flow == 0.0);
  CHECK(dirac_family_scenario(-2.0, 2.0, m).flow == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-9));
  CHECK(dirac_family_scenario(1.0, -1.0, m).flow == doctest::Approx(-1.0 / std::numbers::pi).epsilon(1e-9));
}
