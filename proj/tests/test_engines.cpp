#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "sfcalc/engines.hpp"
#include "sfcalc/generators.hpp"
#include "sfcalc/quadrature.hpp"

using namespace sfcalc;

namespace {

const auto kScalar = WeightedBlockModel::single(1);

BlockHermitian<cd> scalar(double x) {
  return BlockHermitian<cd>::diagonal(kScalar, RealVec::Constant(1, x));
}

const auto kCrossing = OperatorPath<cd>::linear(scalar(-1), scalar(1));

// eta_s(D) = pi^{-1/2} int_s^inf tr(D e^{-t D^2}) t^{-1/2} dt for a single eigenvalue.
double eta_oracle(double lambda, double s) {
  QuadratureOptions o{1e-13};
  const double tail = std::max(s, 60.0 / (lambda * lambda)) + s;
  return integrate([&](double t) { return lambda * std::exp(-t * lambda * lambda) / std::sqrt(t); },
                   s, tail, o)
             .value /
         std::sqrt(std::numbers::pi);
}

// B_u = B_0 + 4u P_0^- on [0, 1/2], constant afterwards, with three -1 eigenvalues.
OperatorPath<cd> half_involution(std::uint64_t seed) {
  Rng rng(seed);
  const auto m = WeightedBlockModel::single(5);
  RealVec d = RealVec::Ones(5);
  d.head(3).setConstant(-1.0);
  const Mat<cd> v = random_unitary(rng, 5);
  const Mat<cd> b0 = v * d.cast<cd>().asDiagonal() * v.adjoint();
  const Mat<cd> pm = 0.5 * (Mat<cd>::Identity(5, 5) - b0);
  const BlockHermitian<cd> start(m, {b0}), end(m, {Mat<cd>(b0 + 2.0 * pm)});
  return OperatorPath<cd>({0.0, 0.5, 1.0}, {start, end, end});
}

}  // namespace

TEST_CASE("sf_crossing examples") {
  CHECK(sf_crossing(kCrossing).value == 1.0);
  CHECK(sf_crossing(reverse(kCrossing)).value == -1.0);
  CHECK(sf_crossing(OperatorPath<cd>::constant(scalar(0.7))).value == 0.0);
  CHECK(sf_crossing(half_involution(3)).value == 3.0);
  CHECK_THROWS_AS(sf_crossing(kCrossing, 0.0), DomainError);
}

TEST_CASE("zero endpoint counts as nonnegative") {
  CHECK(sf_crossing(OperatorPath<cd>::linear(scalar(-1), scalar(0))).value == 1.0);
  CHECK(sf_crossing(OperatorPath<cd>::linear(scalar(0), scalar(1))).value == 0.0);
  CHECK(sf_phillips(OperatorPath<cd>::linear(scalar(-1), scalar(0))).value == 1.0);
}

TEST_CASE("sf_phillips examples") {
  CHECK(sf_phillips(kCrossing).value == 1.0);
  CHECK(sf_phillips(OperatorPath<cd>::constant(scalar(-2))).value == 0.0);
  CHECK(sf_phillips(half_involution(4)).value == 3.0);

  const auto fp = shifted_dirac_path(FrequencyModel::integer_lattice(), -1.0, 1.0);
  CHECK(sf_phillips(fp).value == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-9));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const auto p = random_path(rng, WeightedBlockModel::single(6), 4);
    CHECK(sf_phillips(p).value == sf_crossing(p).value);
  }
}

TEST_CASE("eta_truncated") {
  const auto one = eigh(scalar(1));
  CHECK(eta_truncated(one, 1.0) == doctest::Approx(0.1572992).epsilon(1e-7));
  CHECK(eta_truncated(one, 1.0) == doctest::Approx(eta_oracle(1.0, 1.0)).epsilon(1e-9));
  for (double lam : {0.3, 2.0}) {
    for (double s : {0.5, 3.0}) {
      const double e = eta_truncated(eigh(scalar(-lam)), s);
      CHECK(std::abs(e - (-eta_oracle(lam, s))) < 1e-9);
    }
  }
  const auto sym = BlockHermitian<cd>::diagonal(WeightedBlockModel::single(4),
                                                (RealVec(4) << -2, -0.5, 0.5, 2).finished());
  CHECK(std::abs(eta_truncated(sym, 0.7)) < 1e-15);
  CHECK(eta_truncated(scalar(0), 1.0) == 0.0);
  CHECK_THROWS_AS(eta_truncated(scalar(1), 0.0), DomainError);
}

TEST_CASE("sf_integral on the single crossing") {
  for (double s : {0.5, 1.0, 4.0}) {
    const auto r = sf_integral(kCrossing, s, 1e-13);
    CHECK(r.raw == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.diagnostics.at("integral_term") == doctest::Approx(std::erf(std::sqrt(s))).epsilon(1e-12));
    const double eta = 0.5 * r.diagnostics.at("eta_end") - 0.5 * r.diagnostics.at("eta_start");
    CHECK(eta == doctest::Approx(std::erfc(std::sqrt(s))).epsilon(1e-12));
    CHECK(r.diagnostics.at("kernel_end") == 0.0);
    CHECK(r.diagnostics.at("kernel_start") == 0.0);
  }
  const auto c = sf_integral(OperatorPath<cd>::constant(scalar(0.4)), 2.0);
  CHECK(std::abs(c.raw) < 1e-14);
  CHECK_THROWS_AS(sf_integral(kCrossing, -1.0), DomainError);
}

TEST_CASE("sf_integral with a kernel endpoint") {
  // u -> u: kernel at the start contributes -1/2, the rest gives 1/2.
  const auto p = OperatorPath<cd>::linear(scalar(0), scalar(1));
  CHECK(sf_integral(p, 2.0).value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sf_crossing(p).value == 0.0);
}

TEST_CASE("sf_appendix") {
  for (const auto& id : ChiProfile::ids()) {
    const auto chi = ChiProfile::by_id(id);
    CHECK(sf_appendix(kCrossing, chi).raw == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(sf_appendix(OperatorPath<cd>::constant(scalar(0.5)), chi).raw) < 1e-12);
  }
  const auto big = OperatorPath<cd>::linear(scalar(-3), scalar(2));
  CHECK_THROWS_AS(sf_appendix(big, ChiProfile::by_id("default")), PreconditionError);
  CHECK(sf_appendix(big, ChiProfile::by_id("default"), {true}).value == 1.0);
  const auto rounded = OperatorPath<cd>::linear(scalar(-1.0 - 1e-15), scalar(1.0 + 1e-15));
  CHECK(sf_appendix(rounded, ChiProfile::by_id("default")).value == 1.0);
  const auto kern = OperatorPath<cd>::linear(scalar(0), scalar(1));
  CHECK_THROWS_AS(sf_appendix(kern, ChiProfile::by_id("default")), PreconditionError);
  AppendixOptions reg;
  reg.regularize_endpoints = true;
  CHECK(sf_appendix(kern, ChiProfile::by_id("default"), reg).value == 0.0);
}

TEST_CASE("chi profiles are admissible") {
  for (const auto& id : ChiProfile::ids()) {
    const auto chi = ChiProfile::by_id(id);
    CHECK_NOTHROW(chi.validate());
    CHECK(chi(1.0) == doctest::Approx(1.0));
    CHECK(chi(-0.4) == doctest::Approx(-chi(0.4)));
    CHECK(chi.dchi(0.0) > 0.0);
  }
  CHECK_THROWS_AS(ChiProfile::by_id("nope"), ValidationError);
}

TEST_CASE("random 6x6 paths: engines agree") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    const auto p = random_path(rng, WeightedBlockModel::single(6), 4);
    const double ref = sf_crossing(p).value;
    double first = 0.0;
    for (double s : {0.5, 2.0, 8.0}) {
      const auto r = sf_integral(p, s);
      if (s == 0.5) first = r.raw;
      CHECK(std::abs(r.raw - first) < 1e-6);
      CHECK(r.value == ref);
    }
    const auto a = sf_appendix(p, ChiProfile::sine_smoothstep(), {true});
    const auto b = sf_appendix(p, ChiProfile::quintic(), {true});
    CHECK(std::abs(a.raw - b.raw) < 1e-7);
    CHECK(a.value == ref);
  }
}

TEST_CASE("cg_bound") {
  const auto z = cg_bound(scalar(0), 4.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.term_I == 0.0);
  CHECK(z.term_II > 0.0);
  const auto one = cg_bound(scalar(1), 4.0);
  CHECK(one.lhs == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-12));
  CHECK(one.lhs <= one.term_I + one.term_II);
  CHECK(one.holds);
  CHECK_THROWS_AS(cg_bound(scalar(1), 1.0), DomainError);

  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_block_hermitian(rng, random_model(rng, 3, 6), 3.0);
    for (double s : {1.5, 4.0, 64.0}) CHECK(cg_bound(a, s).holds);
  }
}

TEST_CASE("property: weighted flows are multiples of the weight step") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Rng rng(seed);
    const auto m = random_model(rng, 3, 5);
    const auto p = random_path(rng, m, 3);
    const auto r = sf_crossing(p);
    const double q = *m.weight_step();
    CHECK(std::abs(r.value / q - std::round(r.value / q)) < 1e-9);
    CHECK(sf_phillips(p).value == r.value);
    CHECK(sf_integral(p, 2.0).value == r.value);
  }
}

TEST_CASE("property: concatenation, reversal and direct sums") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Rng rng(500 + seed);
    const auto m = random_model(rng, 2, 5);
    const auto a = random_path(rng, m, 3);
    auto b = random_path(rng, m, 3);
    std::vector<BlockHermitian<cd>> bs = b.samples();
    bs.front() = a.back();
    b = OperatorPath<cd>(b.nodes(), bs);
    const double fa = sf_crossing(a).value, fb = sf_crossing(b).value;
    CHECK(sf_crossing(concatenate(a, b)).value == doctest::Approx(fa + fb));
    CHECK(sf_phillips(concatenate(a, b)).value == doctest::Approx(fa + fb));
    CHECK(sf_crossing(reverse(a)).value == doctest::Approx(-fa));

    const auto c = random_path(rng, random_model(rng, 2, 4), 3);
    CHECK(sf_crossing(direct_sum(a, c)).value == doctest::Approx(fa + sf_crossing(c).value));
  }
}

TEST_CASE("property: reparametrization and conjugation invariance") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(900 + seed);
    const auto m = random_model(rng, 2, 4);
    const auto p = random_path(rng, m, 3);
    const double ref = sf_crossing(p).value;
    const auto q = reparametrize<cd>(p, [](double u) { return u * u * (3.0 - 2.0 * u); }, 33);
    CHECK(sf_crossing(q).value == ref);

    std::vector<Mat<cd>> gens;
    for (const auto& b : m.blocks()) gens.push_back(random_hermitian(rng, b.dim));
    const std::function<BlockOperator<cd>(double)> U = [&](double u) {
      std::vector<Mat<cd>> bl;
      for (const auto& g : gens) {
        Eigen::SelfAdjointEigenSolver<Mat<cd>> es(g);
        const Vec<cd> ph = (cd(0, 3.0 * std::sin(std::numbers::pi * u)) *
                            es.eigenvalues().cast<cd>()).array().exp();
        bl.push_back(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
      }
      return BlockOperator<cd>(m, bl);
    };
    const auto fine = OperatorPath<cd>::sampled([&](double u) { return p.eval(u); }, 33);
    CHECK(sf_crossing(conjugate(fine, U)).value == ref);
  }
}

TEST_CASE("crossing count when an eigenvalue passes through a bisection level") {
  // the minus eigenvalue moves linearly from -1 to 1 and hits 0 and 1/2 at
  // dyadic parameters
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5), minus = 1 + static_cast<Eigen::Index>(seed % 2);
    const auto p = involution_path(rng, WeightedBlockModel::single(n), {minus});
    CHECK(sf_crossing(p).value == static_cast<double>(minus));
  }
}
