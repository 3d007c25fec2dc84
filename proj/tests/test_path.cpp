#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sfcalc/generators.hpp"
#include "sfcalc/path.hpp"

using namespace sfcalc;

namespace {

const auto kScalar = WeightedBlockModel::single(1);

BlockHermitian<cd> scalar(double x) {
  return BlockHermitian<cd>::diagonal(kScalar, RealVec::Constant(1, x));
}

double value(const BlockHermitian<cd>& a) { return std::real(a.block(0)(0, 0)); }

OperatorPath<cd> u_squared_cubic() {
  return OperatorPath<cd>::sampled([](double u) { return scalar(u * u); }, 5,
                                   Interpolation::cubic_hermite);
}

}  // namespace

TEST_CASE("eval") {
  const auto p = OperatorPath<cd>::linear(scalar(-1), scalar(1));
  CHECK(value(p.eval(0.5)) == doctest::Approx(0.0));
  CHECK(value(p.eval(1.0)) == 1.0);
  CHECK(value(p.eval(0.0)) == -1.0);
  CHECK(value(u_squared_cubic().eval(0.3)) == doctest::Approx(0.09).epsilon(1e-6));
  CHECK_THROWS_AS(p.eval(1.2), DomainError);
  CHECK_THROWS_AS(p.eval(-0.1), DomainError);
}

TEST_CASE("derivative") {
  const auto p = OperatorPath<cd>::linear(scalar(-1), scalar(1));
  for (double u : {0.1, 0.5, 0.9}) CHECK(value(p.derivative(u)) == doctest::Approx(2.0));
  CHECK(value(OperatorPath<cd>::constant(scalar(3)).derivative(0.4)) == 0.0);
  CHECK(value(u_squared_cubic().derivative(0.5)) == doctest::Approx(1.0).epsilon(1e-6));

  // right derivative at an interior node
  const OperatorPath<cd> kink({0.0, 0.5, 1.0}, {scalar(0), scalar(1), scalar(-1)});
  CHECK(value(kink.derivative(0.5)) == doctest::Approx(-4.0));
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(OperatorPath<cd>({0.0, 0.5}, {scalar(0), scalar(1)}), ValidationError);
  CHECK_THROWS_AS(OperatorPath<cd>({0.0, 0.7, 0.6, 1.0}, {scalar(0), scalar(1), scalar(1), scalar(1)}),
                  ValidationError);
  const auto two = BlockHermitian<cd>::identity(WeightedBlockModel::single(2));
  CHECK_THROWS_AS(OperatorPath<cd>({0.0, 1.0}, {scalar(0), two}), StructuralError);
  CHECK(single_crossing_path(true).endpoint_flat());
  CHECK_FALSE(single_crossing_path(false).endpoint_flat());
}

TEST_CASE("concatenate") {
  const auto c = OperatorPath<cd>::constant(scalar(2));
  const auto cc = concatenate(c, c);
  for (double u : {0.0, 0.3, 0.5, 0.8, 1.0}) CHECK(value(cc.eval(u)) == doctest::Approx(2.0));

  const auto a = OperatorPath<cd>::linear(scalar(-1), scalar(0));
  const auto b = OperatorPath<cd>::linear(scalar(0), scalar(1));
  const auto ab = concatenate(a, b);
  CHECK(ab.size() == 3);
  CHECK(ab.nodes()[1] == doctest::Approx(0.5));
  CHECK(value(ab.eval(0.25)) == doctest::Approx(-0.5));
  CHECK(value(ab.eval(0.75)) == doctest::Approx(0.5));

  CHECK_THROWS_AS(concatenate(a, a), ValidationError);
}

TEST_CASE("conjugate") {
  Rng rng(5);
  const WeightedBlockModel m({{3, 1.0}, {2, 2.0}});
  const auto p = random_path(rng, m, 3);
  const auto id = [&](double) { return BlockOperator<cd>::identity(m); };
  const auto same = conjugate(p, std::function<BlockOperator<cd>(double)>(id));
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK((same.samples()[i] - p.samples()[i]).frobenius_norm() < 1e-14);

  const auto diag_path = OperatorPath<cd>::linear(
      BlockHermitian<cd>::diagonal(m, (RealVec(5) << 1, -2, 3, 0.5, -1).finished()),
      BlockHermitian<cd>::diagonal(m, (RealVec(5) << -1, 2, 0, 0.5, 4).finished()));
  const std::function<BlockOperator<cd>(double)> phase = [&](double) {
    Mat<cd> d = Mat<cd>::Zero(5, 5);
    for (int k = 0; k < 5; ++k) d(k, k) = std::polar(1.0, 0.7 * k);
    return BlockOperator<cd>::from_dense(m, d);
  };
  const auto dp = conjugate(diag_path, phase);
  for (std::size_t i = 0; i < dp.size(); ++i)
    CHECK((dp.samples()[i] - diag_path.samples()[i]).frobenius_norm() < 1e-14);

  const std::function<BlockOperator<cd>(double)> rot = [&](double u) {
    std::vector<Mat<cd>> bl;
    for (const auto& b : m.blocks()) {
      Rng r(static_cast<std::uint64_t>(1000 * u) + b.dim);
      bl.push_back(random_unitary(r, b.dim));
    }
    return BlockOperator<cd>(m, bl);
  };
  const auto q = conjugate(p, rot);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const RealVec a = eigh(p.samples()[i]).eigenvalues(), b = eigh(q.samples()[i]).eigenvalues();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
  }

  const std::function<BlockOperator<cd>(double)> bad = [&](double) {
    return cd(2.0) * BlockOperator<cd>::identity(m);
  };
  CHECK_THROWS_AS(conjugate(p, bad), ValidationError);
}

TEST_CASE("property: eigenvalues move by at most the operator distance") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto m = random_model(rng, 2, 6);
    const auto p = random_path(rng, m, 4);
    for (int k = 0; k < 50; ++k) {
      const double u = k / 50.0, v = (k + 1) / 50.0;
      const auto a = p.eval(u), b = p.eval(v);
      const RealVec ea = eigh(a).eigenvalues(), eb = eigh(b).eigenvalues();
      CHECK((ea - eb).cwiseAbs().maxCoeff() <= operator_norm(b - a) + 1e-12);
    }
  }
}

TEST_CASE("reverse and reparametrize") {
  const auto p = OperatorPath<cd>::linear(scalar(-1), scalar(1));
  const auto r = reverse(p);
  CHECK(value(r.eval(0.25)) == doctest::Approx(0.5));
  const auto q = reparametrize<cd>(p, [](double u) { return u * u; }, 11);
  CHECK(value(q.eval(0.5)) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(reparametrize<cd>(p, [](double u) { return 0.5 * u; }, 5), ValidationError);
}
