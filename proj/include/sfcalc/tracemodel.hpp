#pragma once

// Finite semifinite-trace operator models: block-diagonal matrix algebras whose
// trace weights each block, plus the spectral calculus built on top of them.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfcalc/errors.hpp"
#include "sfcalc/jacobi.hpp"

namespace sfcalc {

using cd = std::complex<double>;

struct Block {
  Eigen::Index dim = 1;
  double weight = 1.0;
  bool operator==(const Block&) const = default;
};

class WeightedBlockModel {
public:
  WeightedBlockModel() : WeightedBlockModel(std::vector<Block>{{1, 1.0}}) {}
  explicit WeightedBlockModel(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw StructuralError("WeightedBlockModel: no blocks");
    for (const auto& b : blocks_) {
      if (b.dim < 1) throw ValidationError("WeightedBlockModel: block dimension must be positive");
      if (!(b.weight > 0.0) || !std::isfinite(b.weight))
        throw ValidationError("WeightedBlockModel: block weight must be positive and finite");
    }
  }
  static WeightedBlockModel single(Eigen::Index dim, double weight = 1.0) {
    return WeightedBlockModel({{dim, weight}});
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  Eigen::Index block_dim(std::size_t b) const { return blocks_[b].dim; }
  double weight(std::size_t b) const { return blocks_[b].weight; }

  Eigen::Index dim() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks_) n += b.dim;
    return n;
  }
  Eigen::Index offset(std::size_t b) const {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < b; ++i) n += blocks_[i].dim;
    return n;
  }
  double identity_trace() const {
    double t = 0.0;
    for (const auto& b : blocks_) t += b.weight * static_cast<double>(b.dim);
    return t;
  }

  /// Largest q = w_min / k (k <= 64) of which every weight is an integer
  /// multiple. Spectral flow and index values on this model are multiples of q.
  std::optional<double> weight_step() const {
    double w = blocks_.front().weight;
    for (const auto& b : blocks_) w = std::min(w, b.weight);
    for (int k = 1; k <= 64; ++k) {
      const double q = w / k;
      bool ok = true;
      for (const auto& b : blocks_) {
        const double r = b.weight / q;
        if (std::abs(r - std::round(r)) > 1e-9 * r) ok = false;
      }
      if (ok) return q;
    }
    return std::nullopt;
  }

  WeightedBlockModel direct_sum(const WeightedBlockModel& other) const {
    auto all = blocks_;
    all.insert(all.end(), other.blocks_.begin(), other.blocks_.end());
    return WeightedBlockModel(std::move(all));
  }

  bool operator==(const WeightedBlockModel&) const = default;

private:
  std::vector<Block> blocks_;
};

/// Round `value` to the model's weight step when there is one.
inline double quantize(double value, const WeightedBlockModel& model) {
  if (auto q = model.weight_step()) return *q * std::round(value / *q);
  return value;
}

/// General element of the block algebra.
template <typename Scalar>
class BlockOperator {
public:
  BlockOperator() = default;
  BlockOperator(WeightedBlockModel model, std::vector<Mat<Scalar>> blocks)
      : model_(std::move(model)), blocks_(std::move(blocks)) {
    if (blocks_.size() != model_.block_count())
      throw StructuralError("BlockOperator: block count does not match the model");
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (blocks_[b].rows() != model_.block_dim(b) || blocks_[b].cols() != model_.block_dim(b))
        throw StructuralError("BlockOperator: block shape does not match the model");
  }

  static BlockOperator zero(const WeightedBlockModel& m) {
    std::vector<Mat<Scalar>> bl;
    for (const auto& b : m.blocks()) bl.push_back(Mat<Scalar>::Zero(b.dim, b.dim));
    return BlockOperator(m, std::move(bl));
  }
  static BlockOperator identity(const WeightedBlockModel& m) {
    std::vector<Mat<Scalar>> bl;
    for (const auto& b : m.blocks()) bl.push_back(Mat<Scalar>::Identity(b.dim, b.dim));
    return BlockOperator(m, std::move(bl));
  }
  /// Split a dense matrix into blocks; entries outside the blocks must vanish.
  static BlockOperator from_dense(const WeightedBlockModel& m, const Mat<Scalar>& dense) {
    if (dense.rows() != m.dim() || dense.cols() != m.dim())
      throw StructuralError("BlockOperator::from_dense: shape does not match the model");
    std::vector<Mat<Scalar>> bl;
    for (std::size_t b = 0; b < m.block_count(); ++b) {
      const auto o = m.offset(b), n = m.block_dim(b);
      bl.push_back(dense.block(o, o, n, n));
    }
    BlockOperator out(m, std::move(bl));
    if ((out.dense() - dense).norm() != 0.0)
      throw ValidationError("BlockOperator::from_dense: nonzero entries outside the blocks");
    return out;
  }

  const WeightedBlockModel& model() const { return model_; }
  const std::vector<Mat<Scalar>>& blocks() const { return blocks_; }
  const Mat<Scalar>& block(std::size_t b) const { return blocks_[b]; }
  Mat<Scalar>& block(std::size_t b) { return blocks_[b]; }

  Mat<Scalar> dense() const {
    const auto n = model_.dim();
    Mat<Scalar> d = Mat<Scalar>::Zero(n, n);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto o = model_.offset(b);
      d.block(o, o, blocks_[b].rows(), blocks_[b].cols()) = blocks_[b];
    }
    return d;
  }

  BlockOperator adjoint() const {
    auto out = *this;
    for (auto& b : out.blocks_) b = b.adjoint().eval();
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return std::sqrt(s);
  }

  template <typename F>
  BlockOperator map_blocks(F&& f) const {
    auto out = *this;
    for (auto& b : out.blocks_) b = f(b);
    return out;
  }

private:
  WeightedBlockModel model_;
  std::vector<Mat<Scalar>> blocks_;
};

namespace detail {
template <typename Scalar>
void require_same_model(const BlockOperator<Scalar>& a, const BlockOperator<Scalar>& b) {
  if (!(a.model() == b.model())) throw StructuralError("operands live on different models");
}
}  // namespace detail

template <typename Scalar>
BlockOperator<Scalar> operator+(const BlockOperator<Scalar>& a, const BlockOperator<Scalar>& b) {
  detail::require_same_model(a, b);
  auto out = a;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) out.block(i) += b.block(i);
  return out;
}
template <typename Scalar>
BlockOperator<Scalar> operator-(const BlockOperator<Scalar>& a, const BlockOperator<Scalar>& b) {
  detail::require_same_model(a, b);
  auto out = a;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) out.block(i) -= b.block(i);
  return out;
}
template <typename Scalar>
BlockOperator<Scalar> operator*(const BlockOperator<Scalar>& a, const BlockOperator<Scalar>& b) {
  detail::require_same_model(a, b);
  auto out = a;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) out.block(i) = a.block(i) * b.block(i);
  return out;
}
template <typename Scalar>
BlockOperator<Scalar> operator*(Scalar c, const BlockOperator<Scalar>& a) {
  return a.map_blocks([c](const Mat<Scalar>& m) -> Mat<Scalar> { return c * m; });
}

/// Self-adjoint element. Construction checks Hermiticity to 1e-12 (relative,
/// Frobenius) and stores the exactly symmetrized blocks.
template <typename Scalar>
class BlockHermitian {
public:
  static constexpr double kHermitianTol = 1e-12;

  BlockHermitian() = default;
  explicit BlockHermitian(const BlockOperator<Scalar>& op) : op_(op) {
    const double nrm = op.frobenius_norm();
    const double asym = (op - op.adjoint()).frobenius_norm();
    if (asym > kHermitianTol * std::max(nrm, 1e-300) && asym > 0.0)
      throw ValidationError("BlockHermitian: operator is not Hermitian (relative asymmetry " +
                            std::to_string(asym / nrm) + ")");
    symmetrize();
  }
  BlockHermitian(WeightedBlockModel model, std::vector<Mat<Scalar>> blocks)
      : BlockHermitian(BlockOperator<Scalar>(std::move(model), std::move(blocks))) {}

  /// Skip validation; used for results that are Hermitian by construction.
  static BlockHermitian trusted(BlockOperator<Scalar> op) {
    BlockHermitian h;
    h.op_ = std::move(op);
    h.symmetrize();
    return h;
  }
  static BlockHermitian zero(const WeightedBlockModel& m) {
    return trusted(BlockOperator<Scalar>::zero(m));
  }
  static BlockHermitian identity(const WeightedBlockModel& m) {
    return trusted(BlockOperator<Scalar>::identity(m));
  }
  static BlockHermitian diagonal(const WeightedBlockModel& m, const RealVec& diag) {
    if (diag.size() != m.dim()) throw StructuralError("BlockHermitian::diagonal: size mismatch");
    Mat<Scalar> d = Mat<Scalar>::Zero(m.dim(), m.dim());
    for (Eigen::Index i = 0; i < diag.size(); ++i) d(i, i) = Scalar(diag(i));
    return trusted(BlockOperator<Scalar>::from_dense(m, d));
  }

  const BlockOperator<Scalar>& op() const { return op_; }
  operator const BlockOperator<Scalar>&() const { return op_; }
  const WeightedBlockModel& model() const { return op_.model(); }
  const Mat<Scalar>& block(std::size_t b) const { return op_.block(b); }
  Mat<Scalar> dense() const { return op_.dense(); }
  double frobenius_norm() const { return op_.frobenius_norm(); }

  friend BlockHermitian operator+(const BlockHermitian& a, const BlockHermitian& b) {
    return trusted(a.op_ + b.op_);
  }
  friend BlockHermitian operator-(const BlockHermitian& a, const BlockHermitian& b) {
    return trusted(a.op_ - b.op_);
  }
  friend BlockHermitian operator*(double c, const BlockHermitian& a) {
    return trusted(Scalar(c) * a.op_);
  }

private:
  void symmetrize() {
    op_ = op_.map_blocks(
        [](const Mat<Scalar>& m) -> Mat<Scalar> { return (0.5 * (m + m.adjoint())).eval(); });
  }
  BlockOperator<Scalar> op_;
};

/// Weighted trace sum_b w_b Tr(op_b).
template <typename Scalar>
Scalar trace(const BlockOperator<Scalar>& op) {
  Scalar t(0);
  for (std::size_t b = 0; b < op.blocks().size(); ++b)
    t += Scalar(op.model().weight(b)) * op.block(b).trace();
  return t;
}
template <typename Scalar>
double trace(const BlockHermitian<Scalar>& op) {
  return std::real(trace(op.op()));
}

/// Interval on the real line with independently open or closed endpoints.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval closed(double a, double b) { return {a, b, true, true}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval negative() { return {-std::numeric_limits<double>::infinity(), 0.0, false, false}; }
  static Interval point(double a) { return {a, a, true, true}; }

  /// Membership with eigenvalue clustering: a point within `tol` of a finite
  /// endpoint is treated as sitting on it.
  bool contains(double x, double tol = 0.0) const {
    if (std::isfinite(lo) && std::abs(x - lo) <= tol) return lo_closed && (x <= hi + tol);
    if (std::isfinite(hi) && std::abs(x - hi) <= tol) return hi_closed;
    return x > lo && x < hi;
  }
  /// True if x is inside the cluster window of an endpoint without being on it.
  bool straddles(double x, double tol) const {
    auto near = [&](double e) { return std::isfinite(e) && x != e && std::abs(x - e) <= tol; };
    return near(lo) || near(hi);
  }
};

enum class EigenBackend { jacobi, eigen_selfadjoint };

/// Eigenvalues, eigenvectors and weights of a BlockHermitian, kept per block so
/// every eigenvector is supported in exactly one block.
template <typename Scalar>
class SpectralDecomposition {
public:
  static constexpr double kClusterTol = 1e-9;

  SpectralDecomposition(WeightedBlockModel model, std::vector<HermitianEigen<Scalar>> blocks)
      : model_(std::move(model)), blocks_(std::move(blocks)) {
    radius_ = 0.0;
    for (const auto& b : blocks_)
      if (b.values.size() > 0)
        radius_ = std::max({radius_, std::abs(b.values(0)), std::abs(b.values(b.values.size() - 1))});
  }

  const WeightedBlockModel& model() const { return model_; }
  const HermitianEigen<Scalar>& block(std::size_t b) const { return blocks_[b]; }
  std::size_t block_count() const { return blocks_.size(); }

  /// Largest |eigenvalue|, i.e. the operator norm.
  double spectral_radius() const { return radius_; }
  /// Eigenvalues within this distance form one cluster.
  double tolerance() const { return kClusterTol * (1.0 + radius_); }

  /// All eigenvalues in ascending order with their block weights.
  std::pair<RealVec, RealVec> eigenvalues_with_weights() const {
    std::vector<std::pair<double, double>> all;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (Eigen::Index k = 0; k < blocks_[b].values.size(); ++k)
        all.emplace_back(blocks_[b].values(k), model_.weight(b));
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    RealVec v(all.size()), w(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      v(i) = all[i].first;
      w(i) = all[i].second;
    }
    return {v, w};
  }
  RealVec eigenvalues() const { return eigenvalues_with_weights().first; }

  double min_abs_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_)
      for (Eigen::Index k = 0; k < b.values.size(); ++k) m = std::min(m, std::abs(b.values(k)));
    return m;
  }

  /// sum_k w_k f(lambda_k): the trace of f(op) without forming it.
  template <typename F>
  double trace_of(F&& f) const {
    double t = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < blocks_[b].values.size(); ++k) s += f(blocks_[b].values(k));
      t += model_.weight(b) * s;
    }
    return t;
  }

  /// Trace of the spectral projection onto `iv`, using the cluster tolerance.
  double count(const Interval& iv) const {
    const double tol = tolerance();
    return trace_of([&](double x) { return iv.contains(x, tol) ? 1.0 : 0.0; });
  }

private:
  WeightedBlockModel model_;
  std::vector<HermitianEigen<Scalar>> blocks_;
  double radius_ = 0.0;
};

template <typename Scalar>
HermitianEigen<Scalar> eigh_matrix(const Mat<Scalar>& m, EigenBackend backend) {
  if (backend == EigenBackend::jacobi) return jacobi_eigh<Scalar>(m);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(m);
  if (es.info() != Eigen::Success) throw NumericError("eigh: self-adjoint solver failed");
  HermitianEigen<Scalar> out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

/// Eigendecomposition of every block.
template <typename Scalar>
SpectralDecomposition<Scalar> eigh(const BlockHermitian<Scalar>& op,
                                   EigenBackend backend = EigenBackend::jacobi) {
  std::vector<HermitianEigen<Scalar>> blocks;
  blocks.reserve(op.model().block_count());
  for (std::size_t b = 0; b < op.model().block_count(); ++b)
    blocks.push_back(eigh_matrix<Scalar>(op.block(b), backend));
  return SpectralDecomposition<Scalar>(op.model(), std::move(blocks));
}

/// Validating overload for operators that are only claimed to be Hermitian.
template <typename Scalar>
SpectralDecomposition<Scalar> eigh(const BlockOperator<Scalar>& op,
                                   EigenBackend backend = EigenBackend::jacobi) {
  return eigh(BlockHermitian<Scalar>(op), backend);
}

/// V diag(f(lambda)) V^*.
template <typename Scalar, typename F>
BlockHermitian<Scalar> apply_function(const SpectralDecomposition<Scalar>& dec, F&& f) {
  std::vector<Mat<Scalar>> out;
  for (std::size_t b = 0; b < dec.block_count(); ++b) {
    const auto& e = dec.block(b);
    RealVec fv(e.values.size());
    for (Eigen::Index k = 0; k < fv.size(); ++k) {
      fv(k) = f(e.values(k));
      if (!std::isfinite(fv(k)))
        throw NumericError("apply_function: f is not finite at eigenvalue " +
                           std::to_string(e.values(k)));
    }
    out.push_back(e.vectors * fv.asDiagonal() * e.vectors.adjoint());
  }
  return BlockHermitian<Scalar>::trusted(BlockOperator<Scalar>(dec.model(), std::move(out)));
}

/// Orthogonal projection onto the eigenvectors whose eigenvalue lies in `iv`.
/// Eigenvalues in the cluster window of an endpoint count as on it; such
/// near-misses are reported through `warnings` when given.
template <typename Scalar>
BlockHermitian<Scalar> spectral_projection(const SpectralDecomposition<Scalar>& dec,
                                           const Interval& iv,
                                           std::vector<std::string>* warnings = nullptr) {
  if (dec.model().dim() == 0) throw StructuralError("spectral_projection: empty model");
  const double tol = dec.tolerance();
  if (warnings) {
    for (std::size_t b = 0; b < dec.block_count(); ++b)
      for (Eigen::Index k = 0; k < dec.block(b).values.size(); ++k)
        if (iv.straddles(dec.block(b).values(k), tol))
          warnings->push_back("spectral_projection: eigenvalue " +
                              std::to_string(dec.block(b).values(k)) +
                              " lies in the cluster window of an interval endpoint");
  }
  return apply_function(dec, [&](double x) { return iv.contains(x, tol) ? 1.0 : 0.0; });
}

/// Operator norm, via the spectrum.
template <typename Scalar>
double operator_norm(const BlockHermitian<Scalar>& op) {
  double r = 0.0;
  for (std::size_t b = 0; b < op.model().block_count(); ++b) {
    if (op.block(b).rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(op.block(b), Eigen::EigenvaluesOnly);
    r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return r;
}

template <typename Scalar>
Mat<Scalar> reconstruct(const SpectralDecomposition<Scalar>& dec) {
  return apply_function(dec, [](double x) { return x; }).dense();
}

}  // namespace sfcalc
