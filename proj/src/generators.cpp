#include "sfcalc/generators.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sfcalc {

namespace {

constexpr int kMaxDraws = 1000;

template <typename F>
BlockHermitian<cd> block_wise(const WeightedBlockModel& m, F&& f) {
  std::vector<Mat<cd>> blocks;
  for (std::size_t b = 0; b < m.block_count(); ++b) blocks.push_back(f(b, m.block_dim(b)));
  return BlockHermitian<cd>(m, std::move(blocks));
}

}  // namespace

Mat<cd> random_hermitian(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat<cd> x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = g(rng), im = g(rng);
      x(i, j) = cd(re, im);
    }
  return (0.5 * scale / std::sqrt(static_cast<double>(n))) * (x + x.adjoint());
}

Mat<cd> random_unitary(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat<cd> x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = g(rng), im = g(rng);
      x(i, j) = cd(re, im);
    }
  Eigen::HouseholderQR<Mat<cd>> qr(x);
  Mat<cd> q = qr.householderQ() * Mat<cd>::Identity(n, n);
  const Mat<cd> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(r(k, k)) > 0) q.col(k) *= r(k, k) / std::abs(r(k, k));
  return q;
}

WeightedBlockModel random_model(Rng& rng, int max_blocks, Eigen::Index max_dim) {
  std::uniform_int_distribution<int> nb(1, max_blocks);
  std::uniform_int_distribution<Eigen::Index> nd(1, max_dim);
  std::uniform_int_distribution<int> nw(1, 4);
  std::vector<Block> blocks(nb(rng));
  for (auto& b : blocks) {
    b.dim = nd(rng);
    b.weight = 0.5 * nw(rng);
  }
  return WeightedBlockModel(std::move(blocks));
}

WeightedBlockModel random_small_model(Rng& rng, int max_blocks, Eigen::Index max_total) {
  std::uniform_int_distribution<int> nb(1, max_blocks);
  std::uniform_int_distribution<int> nw(1, 4);
  const int count = static_cast<int>(std::min<Eigen::Index>(nb(rng), max_total));
  std::vector<Block> blocks(count);
  Eigen::Index left = max_total;
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<Eigen::Index> nd(1, left - (count - 1 - i));
    blocks[i].dim = nd(rng);
    blocks[i].weight = 0.5 * nw(rng);
    left -= blocks[i].dim;
  }
  return WeightedBlockModel(std::move(blocks));
}

BlockHermitian<cd> random_block_hermitian(Rng& rng, const WeightedBlockModel& m, double scale) {
  return block_wise(m, [&](std::size_t, Eigen::Index n) { return random_hermitian(rng, n, scale); });
}

BlockHermitian<cd> random_invertible(Rng& rng, const WeightedBlockModel& m, double gap, double scale) {
  for (int i = 0; i < kMaxDraws; ++i) {
    auto a = random_block_hermitian(rng, m, scale);
    if (eigh(a).min_abs_eigenvalue() >= gap) return a;
  }
  throw NumericError("random_invertible: no sample with the requested gap");
}

OperatorPath<cd> random_path(Rng& rng, const WeightedBlockModel& m, int nodes, double gap) {
  if (nodes < 2) throw ValidationError("random_path: need at least two nodes");
  std::vector<BlockHermitian<cd>> samples;
  std::vector<double> u;
  for (int i = 0; i < nodes; ++i) {
    u.push_back(i + 1 == nodes ? 1.0 : static_cast<double>(i) / (nodes - 1));
    const bool end = i == 0 || i + 1 == nodes;
    samples.push_back(end ? random_invertible(rng, m, gap) : random_block_hermitian(rng, m));
  }
  return OperatorPath<cd>(std::move(u), std::move(samples));
}

OperatorPath<cd> random_flat_path(Rng& rng, const WeightedBlockModel& m, int interior, double gap) {
  std::vector<double> u{0.0, 0.1};
  std::vector<BlockHermitian<cd>> samples;
  const auto a = random_invertible(rng, m, gap);
  samples = {a, a};
  for (int i = 1; i <= interior; ++i) {
    u.push_back(0.1 + 0.8 * i / (interior + 1));
    samples.push_back(random_block_hermitian(rng, m));
  }
  const auto b = random_invertible(rng, m, gap);
  u.insert(u.end(), {0.9, 1.0});
  samples.insert(samples.end(), {b, b});
  return OperatorPath<cd>(std::move(u), std::move(samples));
}

OperatorPath<cd> involution_path(Rng& rng, const WeightedBlockModel& m,
                                 const std::vector<Eigen::Index>& minus) {
  if (minus.size() != m.block_count()) throw StructuralError("involution_path: one count per block");
  std::vector<Mat<cd>> b0, b1;
  for (std::size_t b = 0; b < m.block_count(); ++b) {
    const Eigen::Index n = m.block_dim(b);
    if (minus[b] < 0 || minus[b] > n) throw ValidationError("involution_path: bad -1 multiplicity");
    RealVec d = RealVec::Ones(n);
    d.head(minus[b]).setConstant(-1.0);
    const Mat<cd> v = random_unitary(rng, n);
    const Mat<cd> B = v * d.cast<cd>().asDiagonal() * v.adjoint();
    const Mat<cd> P = 0.5 * (Mat<cd>::Identity(n, n) - B);
    b0.push_back(B);
    b1.push_back(B + 2.0 * P);
  }
  const BlockHermitian<cd> start(m, b0), end(m, b1);
  return OperatorPath<cd>({0.0, 0.1, 0.9, 1.0}, {start, start, end, end});
}

OperatorPath<cd> single_crossing_path(bool flat) {
  const auto m = WeightedBlockModel::single(1);
  const auto lo = BlockHermitian<cd>::diagonal(m, RealVec::Constant(1, -1.0));
  const auto hi = BlockHermitian<cd>::diagonal(m, RealVec::Constant(1, 1.0));
  if (flat) return OperatorPath<cd>({0.0, 0.1, 0.9, 1.0}, {lo, lo, hi, hi});
  return OperatorPath<cd>::linear(lo, hi);
}

PerturbationPair random_perturbation_pair(Rng& rng, Eigen::Index n, double spread) {
  const auto m = WeightedBlockModel::single(n);
  std::uniform_real_distribution<double> ev(-spread, spread);
  for (int i = 0; i < kMaxDraws; ++i) {
    RealVec d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      double x;
      do x = ev(rng);
      while (std::abs(x) < 0.2);
      d(k) = x;
    }
    const Mat<cd> v = random_unitary(rng, n);
    const BlockHermitian<cd> D(m, {v * d.cast<cd>().asDiagonal() * v.adjoint()});
    const auto K1 = BlockHermitian<cd>(m, {random_hermitian(rng, n, 3.0)});
    if (eigh(D + K1).min_abs_eigenvalue() < 0.05) continue;
    return {D, OperatorPath<cd>::linear(BlockHermitian<cd>::zero(m), K1)};
  }
  throw NumericError("random_perturbation_pair: no invertible D + K_1 found");
}

HalflineData random_halfline_data(Rng& rng, Eigen::Index n, double T) {
  const auto m = WeightedBlockModel::single(n);
  HalflineData data{random_invertible(rng, m, 0.3, 2.0), T, {}};
  std::normal_distribution<double> g(0.0, 1.0);
  Vec<cd> a(n), b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ar = g(rng), ai = g(rng), br = g(rng), bi = g(rng);
    a(k) = cd(ar, ai);
    b(k) = cd(br, bi);
  }
  data.f = [a, b, T, n](int intervals) {
    Mat<cd> f(intervals + 1, n);
    for (int j = 0; j <= intervals; ++j) {
      const double x = T * j / intervals;
      f.row(j) = ((1.0 - x / T) * (a + std::sin(2.0 * x) * b)).transpose();
    }
    f.row(intervals).setZero();
    return f;
  };
  return data;
}

OperatorPath<cd> generate_path(const std::string& name, std::uint64_t seed,
                               const WeightedBlockModel& m, int nodes) {
  Rng rng(seed);
  if (name == "random") return random_path(rng, m, nodes);
  if (name == "random_flat") return random_flat_path(rng, m, std::max(1, nodes - 4));
  if (name == "involution") {
    std::vector<Eigen::Index> minus;
    for (const auto& b : m.blocks()) minus.push_back((b.dim + 1) / 2);
    return involution_path(rng, m, minus);
  }
  if (name == "single_crossing") return single_crossing_path(false);
  throw ValidationError("unknown path generator '" + name + "'");
}

std::vector<std::string> generator_names() {
  return {"random", "random_flat", "involution", "single_crossing"};
}

}  // namespace sfcalc
