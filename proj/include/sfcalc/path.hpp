#pragma once

// One-parameter families u -> F_u, u in [0,1], of block Hermitian operators,
// stored as samples at strictly increasing nodes and interpolated entrywise.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "sfcalc/errors.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

enum class Interpolation { linear, cubic_hermite };

template <typename Scalar>
class OperatorPath {
public:
  using Sample = BlockHermitian<Scalar>;

  OperatorPath(std::vector<double> nodes, std::vector<Sample> samples,
               Interpolation interp = Interpolation::linear)
      : nodes_(std::move(nodes)), samples_(std::move(samples)), interp_(interp) {
    if (nodes_.size() < 2 || nodes_.size() != samples_.size())
      throw ValidationError("OperatorPath: need at least two nodes, one sample per node");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
      throw ValidationError("OperatorPath: nodes must start at 0 and end at 1");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      if (!(nodes_[i] > nodes_[i - 1]))
        throw ValidationError("OperatorPath: nodes must be strictly increasing");
    for (const auto& s : samples_)
      if (!(s.model() == samples_.front().model()))
        throw StructuralError("OperatorPath: samples live on different models");
    if (interp_ == Interpolation::cubic_hermite) build_slopes();
  }

  /// Sample `f` at n uniformly spaced nodes.
  static OperatorPath sampled(const std::function<Sample(double)>& f, int n,
                              Interpolation interp = Interpolation::linear) {
    if (n < 2) throw ValidationError("OperatorPath::sampled: need at least two nodes");
    std::vector<double> nodes(n);
    std::vector<Sample> samples;
    for (int i = 0; i < n; ++i) {
      nodes[i] = (i == n - 1) ? 1.0 : static_cast<double>(i) / (n - 1);
      samples.push_back(f(nodes[i]));
    }
    return OperatorPath(std::move(nodes), std::move(samples), interp);
  }

  /// Straight line from a to b.
  static OperatorPath linear(const Sample& a, const Sample& b) {
    return OperatorPath({0.0, 1.0}, {a, b});
  }
  static OperatorPath constant(const Sample& a) { return linear(a, a); }

  const WeightedBlockModel& model() const { return samples_.front().model(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<Sample>& samples() const { return samples_; }
  Interpolation interpolation() const { return interp_; }
  std::size_t size() const { return nodes_.size(); }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }

  /// Constant near both endpoints: first two and last two samples coincide.
  bool endpoint_flat() const {
    auto same = [](const Sample& x, const Sample& y) {
      return (x - y).frobenius_norm() <= 1e-14 * (1.0 + x.frobenius_norm());
    };
    if (nodes_.size() == 2) return same(samples_[0], samples_[1]);
    return same(samples_[0], samples_[1]) && same(samples_[size() - 1], samples_[size() - 2]);
  }

  /// Segment containing u: [nodes[i], nodes[i+1]), the last one closed.
  std::size_t segment(double u) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, nodes_.size() - 2);
  }

  Sample eval(double u) const {
    check_domain(u);
    const std::size_t i = segment(u);
    if (u == nodes_[i]) return samples_[i];
    if (u == nodes_[i + 1]) return samples_[i + 1];
    const double h = nodes_[i + 1] - nodes_[i];
    const double t = (u - nodes_[i]) / h;
    if (interp_ == Interpolation::linear) return (1.0 - t) * samples_[i] + t * samples_[i + 1];
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    return h00 * samples_[i] + (h10 * h) * slopes_[i] + h01 * samples_[i + 1] +
           (h11 * h) * slopes_[i + 1];
  }

  /// Derivative of the interpolant; right derivative at interior nodes.
  Sample derivative(double u) const {
    check_domain(u);
    const std::size_t i = segment(u);
    const double h = nodes_[i + 1] - nodes_[i];
    if (interp_ == Interpolation::linear) return (1.0 / h) * (samples_[i + 1] - samples_[i]);
    const double t = (u - nodes_[i]) / h;
    const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
    const double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
    return (d00 / h) * samples_[i] + d10 * slopes_[i] + (d01 / h) * samples_[i + 1] +
           d11 * slopes_[i + 1];
  }

private:
  static void check_domain(double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("OperatorPath: u outside [0,1]");
  }

  // Three-point (one-sided at the ends) derivative estimates; exact for quadratics.
  void build_slopes() {
    const std::size_t n = nodes_.size();
    slopes_.clear();
    if (n == 2) {
      const auto m = (1.0 / (nodes_[1] - nodes_[0])) * (samples_[1] - samples_[0]);
      slopes_ = {m, m};
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t a, b, c;
      if (i == 0)
        a = 0, b = 1, c = 2;
      else if (i == n - 1)
        a = n - 3, b = n - 2, c = n - 1;
      else
        a = i - 1, b = i, c = i + 1;
      const double x = nodes_[i], xa = nodes_[a], xb = nodes_[b], xc = nodes_[c];
      // derivative at x of the quadratic through (xa, xb, xc)
      const double la = ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc));
      const double lb = ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc));
      const double lc = ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
      slopes_.push_back(la * samples_[a] + lb * samples_[b] + lc * samples_[c]);
    }
  }

  std::vector<double> nodes_;
  std::vector<Sample> samples_;
  Interpolation interp_;
  std::vector<Sample> slopes_;
};

template <typename Scalar>
BlockHermitian<Scalar> eval(const OperatorPath<Scalar>& p, double u) {
  return p.eval(u);
}
template <typename Scalar>
BlockHermitian<Scalar> derivative(const OperatorPath<Scalar>& p, double u) {
  return p.derivative(u);
}

/// a on [0, 1/2] followed by b on [1/2, 1].
template <typename Scalar>
OperatorPath<Scalar> concatenate(const OperatorPath<Scalar>& a, const OperatorPath<Scalar>& b) {
  if (!(a.model() == b.model())) throw StructuralError("concatenate: paths on different models");
  if (a.interpolation() != b.interpolation())
    throw ValidationError("concatenate: paths use different interpolation");
  if ((a.back() - b.front()).frobenius_norm() > 1e-10)
    throw ValidationError("concatenate: end of the first path differs from start of the second");
  std::vector<double> nodes;
  std::vector<BlockHermitian<Scalar>> samples;
  for (std::size_t i = 0; i < a.size(); ++i) {
    nodes.push_back(0.5 * a.nodes()[i]);
    samples.push_back(a.samples()[i]);
  }
  for (std::size_t i = 1; i < b.size(); ++i) {
    nodes.push_back(i + 1 == b.size() ? 1.0 : 0.5 + 0.5 * b.nodes()[i]);
    samples.push_back(b.samples()[i]);
  }
  return OperatorPath<Scalar>(std::move(nodes), std::move(samples), a.interpolation());
}

/// u -> F_{1-u}.
template <typename Scalar>
OperatorPath<Scalar> reverse(const OperatorPath<Scalar>& p) {
  std::vector<double> nodes;
  std::vector<BlockHermitian<Scalar>> samples;
  for (std::size_t i = p.size(); i-- > 0;) {
    nodes.push_back(i == 0 ? 1.0 : (i + 1 == p.size() ? 0.0 : 1.0 - p.nodes()[i]));
    samples.push_back(p.samples()[i]);
  }
  return OperatorPath<Scalar>(std::move(nodes), std::move(samples), p.interpolation());
}

/// Resample u -> F_{phi(u)} at n uniform nodes; phi must fix 0 and 1.
template <typename Scalar>
OperatorPath<Scalar> reparametrize(const OperatorPath<Scalar>& p,
                                   const std::function<double(double)>& phi, int n) {
  if (std::abs(phi(0.0)) > 1e-14 || std::abs(phi(1.0) - 1.0) > 1e-14)
    throw ValidationError("reparametrize: phi must fix 0 and 1");
  return OperatorPath<Scalar>::sampled(
      [&](double u) { return p.eval(std::clamp(phi(u), 0.0, 1.0)); }, n, p.interpolation());
}

/// u -> U_u F_u U_u^*, evaluated at the sample nodes.
template <typename Scalar>
OperatorPath<Scalar> conjugate(const OperatorPath<Scalar>& p,
                               const std::function<BlockOperator<Scalar>(double)>& unitary) {
  std::vector<BlockHermitian<Scalar>> samples;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto u = unitary(p.nodes()[i]);
    const auto id = BlockOperator<Scalar>::identity(p.model());
    for (std::size_t b = 0; b < u.blocks().size(); ++b)
      if ((u.block(b).adjoint() * u.block(b) - id.block(b)).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("conjugate: sample is not unitary");
    samples.push_back(BlockHermitian<Scalar>::trusted(u * p.samples()[i].op() * u.adjoint()));
  }
  return OperatorPath<Scalar>(p.nodes(), std::move(samples), p.interpolation());
}

/// Block direct sum F^a_u (+) G^b_u on the concatenated model.
template <typename Scalar>
OperatorPath<Scalar> direct_sum(const OperatorPath<Scalar>& a, const OperatorPath<Scalar>& b) {
  std::vector<double> nodes = a.nodes();
  nodes.insert(nodes.end(), b.nodes().begin(), b.nodes().end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-14; }),
              nodes.end());
  nodes.back() = 1.0;
  const auto model = a.model().direct_sum(b.model());
  std::vector<BlockHermitian<Scalar>> samples;
  for (double u : nodes) {
    auto blocks = a.eval(u).op().blocks();
    const auto bu = b.eval(u);
    const auto& rest = bu.op().blocks();
    blocks.insert(blocks.end(), rest.begin(), rest.end());
    samples.push_back(BlockHermitian<Scalar>::trusted(BlockOperator<Scalar>(model, blocks)));
  }
  return OperatorPath<Scalar>(std::move(nodes), std::move(samples), a.interpolation());
}

template <typename Scalar, typename F>
OperatorPath<Scalar> map_samples(const OperatorPath<Scalar>& p, F&& f) {
  std::vector<BlockHermitian<Scalar>> samples;
  for (std::size_t i = 0; i < p.size(); ++i) samples.push_back(f(p.nodes()[i], p.samples()[i]));
  return OperatorPath<Scalar>(p.nodes(), std::move(samples), p.interpolation());
}

/// max_u ||F_u||. For linear interpolation the maximum is attained at a node.
template <typename Scalar>
double max_norm(const OperatorPath<Scalar>& p) {
  double m = 0.0;
  for (const auto& s : p.samples()) m = std::max(m, operator_norm(s));
  return m;
}

}  // namespace sfcalc
