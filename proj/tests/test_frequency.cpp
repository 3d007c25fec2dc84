#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "sfcalc/frequency.hpp"
#include "sfcalc/quadrature.hpp"

using namespace sfcalc;

namespace {

Symbol indicator(double a, double b) {
  return [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
}

}  // namespace

TEST_CASE("gauss-legendre rule integrates polynomials of degree 29 exactly") {
  const auto rule = gauss_legendre(15);
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * std::pow(rule.nodes[i], 28);
    w += rule.weights[i];
  }
  CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s == doctest::Approx(2.0 / 29.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -6, 6, {1e-13});
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

  const double br[] = {0.3};
  const auto step = integrate([](double x) { return x < 0.3 ? 1.0 : 0.0; }, 0, 1, {1e-12}, br);
  CHECK(step.value == doctest::Approx(0.3).epsilon(1e-12));

  QuadratureOptions tight{1e-30, 4};
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x + 1e-12); }, 0, 1, tight),
                  NumericError);
}

TEST_CASE("freq_trace of indicators on the integer lattice") {
  const auto m = FrequencyModel::integer_lattice();
  CHECK(freq_trace(m, indicator(-1, 1), Interval::closed(-1, 1)).value ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
  CHECK(freq_trace(m, [](double) { return 0.0; }).value == doctest::Approx(0.0));
  CHECK(freq_trace(m, indicator(0, 2), Interval::closed(0, 2)).value ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("freq_trace is normalization covariant") {
  const FrequencyModel unit([](double) { return 1.0; }, 50.0, "unit");
  CHECK(freq_trace(unit, indicator(-1, 1), Interval::closed(-1, 1)).value ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("property: freq_trace is monotone in nonnegative symbols") {
  const auto m = FrequencyModel::integer_lattice();
  double prev = -1.0;
  for (int k = 1; k <= 10; ++k) {
    const double a = 0.37 * k;
    const double t = freq_trace(m, indicator(-a, a), Interval::closed(-a, a)).value;
    CHECK(t > prev);
    CHECK(t == doctest::Approx(a / std::numbers::pi).epsilon(1e-9));
    prev = t;
  }
  for (int k = 1; k <= 5; ++k) {
    auto f = [k](double x) { return std::exp(-x * x / k); };
    auto g = [k](double x) { return std::exp(-x * x / k) * (1.0 + 0.5 * std::cos(x)); };
    CHECK(freq_trace(m, f).value <= freq_trace(m, g).value);
  }
}

TEST_CASE("eta and kernel of a frequency symbol") {
  const auto m = FrequencyModel::integer_lattice();
  CHECK(std::abs(eta_truncated(m, [](double x) { return x; }, 1.0, {0.0})) < 1e-12);
  CHECK(kernel_trace(m, [](double x) { return x; }, {0.0}) == doctest::Approx(0.0));
  // erfc(|xi+1|) integrated with the sign of xi+1: the shift by 1 leaves the
  // total symmetric about -1, so the eta stays zero up to the cutoff tails.
  CHECK(std::abs(eta_truncated(m, [](double x) { return x + 1.0; }, 1.0, {-1.0})) < 1e-10);
}
