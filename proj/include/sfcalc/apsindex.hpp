#pragma once

// Discretized suspension operator d/du + D_u with Atiyah-Patodi-Singer
// boundary conditions, its trace-weighted index, and the explicit inverse of
// the half-line operator.
//
// Grid functions live on the nodes x_0 < ... < x_K; the operator maps them to
// values on the K intervals. Row j reads
//     (f_{j+1} - f_j) + h_j Dbar_j (f_j + f_{j+1}) / 2,
// i.e. the difference equation multiplied by the local step h_j. The APS
// conditions P_0 f(x_0) = 0 and (1 - P_1) f(x_K) = 0 are imposed by restricting
// the node-0 unknowns to range(1 - P_0) and the node-K unknowns to range(P_1).
// The adjoint system is the matrix adjoint of A; its kernel is the cokernel of
// A and the complementary conditions appear as its boundary rows.

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sfcalc/bandsvd.hpp"
#include "sfcalc/engines.hpp"
#include "sfcalc/errors.hpp"
#include "sfcalc/path.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

enum class Scheme { forward_upwind, implicit_midpoint };
enum class ApsGeometry { interval_aps, cylinder };

inline std::string to_string(Scheme s) {
  return s == Scheme::forward_upwind ? "forward-upwind" : "implicit-midpoint";
}
inline std::string to_string(ApsGeometry g) {
  return g == ApsGeometry::interval_aps ? "interval-APS" : "cylinder";
}

template <typename Scalar>
struct SuspensionProblem {
  explicit SuspensionProblem(OperatorPath<Scalar> p) : path(std::move(p)) {}

  OperatorPath<Scalar> path;
  int grid = 200;  // M, intervals on [0, 1]
  Scheme scheme = Scheme::forward_upwind;
  ApsGeometry geometry = ApsGeometry::interval_aps;
  std::optional<double> extension;  // cylinder length L; default 4 / endpoint gap
  double theta = 1e-7;              // kernel threshold relative to sigma_max
  bool endpoint_regularize = false;
  bool require_flat = true;         // interval-APS: insist on an endpoint-flat path

  void validate() const {
    if (grid < 16) throw ValidationError("SuspensionProblem: grid size M must be at least 16");
    if (!(theta > 0.0 && theta < 1.0))
      throw ValidationError("SuspensionProblem: kernel threshold must lie in (0, 1)");
    if (geometry == ApsGeometry::interval_aps && require_flat && !path.endpoint_flat())
      throw ValidationError("SuspensionProblem: interval-APS needs a path constant near the endpoints");
    if (extension && !(*extension > 0.0))
      throw ValidationError("SuspensionProblem: cylinder extension must be positive");
  }
};

/// u -> D_u + phi(u) (1_[0,1](D_0) - 1_[-1,0)(D_0)) + (1 - phi(u)) (1_[0,1](D_1) - 1_[-1,0)(D_1))
/// with phi = 1 on [0, 1/4], 0 on [3/4, 1]. Endpoints become invertible and keep
/// their nonnegative spectral projections.
template <typename Scalar>
OperatorPath<Scalar> endpoint_regularize(const OperatorPath<Scalar>& p) {
  auto bump = [](const BlockHermitian<Scalar>& d) {
    const auto dec = eigh(d);
    return spectral_projection(dec, Interval{0.0, 1.0, true, true}) -
           spectral_projection(dec, Interval{-1.0, 0.0, true, false});
  };
  const auto r0 = bump(p.front()), r1 = bump(p.back());
  auto phi = [](double u) {
    if (u <= 0.25) return 1.0;
    if (u >= 0.75) return 0.0;
    const double t = (u - 0.25) / 0.5;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  };
  return map_samples(p, [&](double u, const BlockHermitian<Scalar>& f) {
    return f + phi(u) * r0 + (1.0 - phi(u)) * r1;
  });
}

template <typename Scalar>
struct BlockSystem {
  Mat<Scalar> A;
  Mat<Scalar> A_adj;
  Mat<Scalar> start_basis;  // columns spanning range(1 - P_0)
  Mat<Scalar> end_basis;    // columns spanning range(P_1)
};

template <typename Scalar>
struct DiscreteSuspension {
  WeightedBlockModel model;
  std::vector<double> nodes;  // u-coordinates, possibly extending beyond [0, 1]
  std::vector<BlockSystem<Scalar>> blocks;

  Mat<Scalar> A() const { return block_diag(false); }
  Mat<Scalar> A_adj() const { return block_diag(true); }

private:
  Mat<Scalar> block_diag(bool adj) const {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
      const auto& m = adj ? b.A_adj : b.A;
      r += m.rows();
      c += m.cols();
    }
    Mat<Scalar> out = Mat<Scalar>::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
      const auto& m = adj ? b.A_adj : b.A;
      out.block(r, c, m.rows(), m.cols()) = m;
      r += m.rows();
      c += m.cols();
    }
    return out;
  }
};

namespace detail {

template <typename Scalar>
Mat<Scalar> eigen_columns(const HermitianEigen<Scalar>& e, double tol, bool nonnegative) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (Interval::nonnegative().contains(e.values(k), tol) == nonnegative) keep.push_back(k);
  Mat<Scalar> out(e.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(i) = e.vectors.col(keep[i]);
  return out;
}

template <typename Scalar>
OperatorPath<Scalar> prepared_path(const SuspensionProblem<Scalar>& prob) {
  return prob.endpoint_regularize ? endpoint_regularize(prob.path) : prob.path;
}

}  // namespace detail

template <typename Scalar>
DiscreteSuspension<Scalar> assemble(const SuspensionProblem<Scalar>& prob) {
  prob.validate();
  const auto path = detail::prepared_path(prob);
  const auto d0 = eigh(path.front()), d1 = eigh(path.back());

  std::vector<double> nodes;
  const int M = prob.grid;
  if (prob.geometry == ApsGeometry::cylinder) {
    const double gap = std::min(d0.min_abs_eigenvalue(), d1.min_abs_eigenvalue());
    if (!(gap > 1e-8))
      throw ValidationError("SuspensionProblem: cylinder geometry needs invertible endpoints");
    const double L = prob.extension.value_or(4.0 / gap);
    const double radius = std::max(d0.spectral_radius(), d1.spectral_radius());
    const int ext = std::max(M, static_cast<int>(std::ceil(L * radius)));
    for (int j = 0; j < ext; ++j) nodes.push_back(-L + L * j / ext);
    for (int j = 0; j < M; ++j) nodes.push_back(static_cast<double>(j) / M);
    for (int j = 0; j <= ext; ++j) nodes.push_back(1.0 + L * j / ext);
  } else {
    for (int j = 0; j <= M; ++j) nodes.push_back(j == M ? 1.0 : static_cast<double>(j) / M);
  }
  const std::size_t K = nodes.size() - 1;

  auto at = [&](double u) { return path.eval(std::clamp(u, 0.0, 1.0)); };
  std::vector<BlockHermitian<Scalar>> dbar;
  dbar.reserve(K);
  if (prob.scheme == Scheme::forward_upwind) {
    for (std::size_t j = 0; j < K; ++j) dbar.push_back(at(0.5 * (nodes[j] + nodes[j + 1])));
  } else {
    auto prev = at(nodes[0]);
    for (std::size_t j = 0; j < K; ++j) {
      auto next = at(nodes[j + 1]);
      dbar.push_back(0.5 * (prev + next));
      prev = std::move(next);
    }
  }

  DiscreteSuspension<Scalar> out{path.model(), nodes, {}};
  for (std::size_t b = 0; b < path.model().block_count(); ++b) {
    const Eigen::Index n = path.model().block_dim(b);
    BlockSystem<Scalar> sys;
    sys.start_basis = detail::eigen_columns(d0.block(b), d0.tolerance(), false);
    sys.end_basis = detail::eigen_columns(d1.block(b), d1.tolerance(), true);
    const Eigen::Index k0 = sys.start_basis.cols(), k1 = sys.end_basis.cols();
    // column offset of node j
    auto col = [&](std::size_t j) -> Eigen::Index {
      return j == 0 ? 0 : k0 + static_cast<Eigen::Index>(j - 1) * n;
    };
    const Eigen::Index cols = k0 + static_cast<Eigen::Index>(K - 1) * n + k1;
    const Eigen::Index rows = static_cast<Eigen::Index>(K) * n;
    sys.A = Mat<Scalar>::Zero(rows, cols);
    const Mat<Scalar> id = Mat<Scalar>::Identity(n, n);
    for (std::size_t j = 0; j < K; ++j) {
      const double h = nodes[j + 1] - nodes[j];
      const Mat<Scalar> half = Scalar(0.5 * h) * dbar[j].block(b);
      const Mat<Scalar> left = -id + half, right = id + half;
      const Eigen::Index r = static_cast<Eigen::Index>(j) * n;
      if (j == 0)
        sys.A.block(r, col(0), n, k0) = left * sys.start_basis;
      else
        sys.A.block(r, col(j), n, n) = left;
      if (j + 1 == K)
        sys.A.block(r, col(K), n, k1) = right * sys.end_basis;
      else
        sys.A.block(r, col(j + 1), n, n) = right;
    }
    sys.A_adj = sys.A.adjoint();
    out.blocks.push_back(std::move(sys));
  }
  return out;
}

struct ApsIndexReport {
  double index = 0.0;
  std::vector<long> kernel_dims;    // per block, A
  std::vector<long> cokernel_dims;  // per block, kernel of A_adj
  double sigma_max = 0.0;
  double threshold = 0.0;
  double largest_below = 0.0;  // largest singular value classified as zero
  double smallest_above = 0.0; // smallest singular value classified as nonzero
  long rows = 0, cols = 0;
};

/// Trace-weighted dim ker A - dim ker A_adj. Singular values below
/// theta * sigma_max count as zero; any singular value within a factor 10 of
/// that threshold (no factor-100 gap) is an error asking for grid refinement.
template <typename Scalar>
ApsIndexReport aps_index_report(const SuspensionProblem<Scalar>& prob) {
  const auto sys = assemble(prob);
  std::vector<RealVec> sv;
  ApsIndexReport rep;
  for (const auto& b : sys.blocks) {
    if (b.A.size() == 0) {
      sv.emplace_back();
      continue;
    }
    if constexpr (std::is_same_v<Scalar, cd> || std::is_same_v<Scalar, double>)
      sv.push_back(singular_values(b.A));
    else
      sv.push_back(Eigen::BDCSVD<Mat<Scalar>>(b.A).singularValues());
    if (sv.back().size()) rep.sigma_max = std::max(rep.sigma_max, sv.back().maxCoeff());
  }
  rep.threshold = prob.theta * rep.sigma_max;
  rep.smallest_above = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    const auto& A = sys.blocks[b].A;
    long rank = 0;
    for (Eigen::Index k = 0; k < sv[b].size(); ++k) {
      const double s = sv[b](k);
      if (s > rep.threshold / 10.0 && s < rep.threshold * 10.0)
        throw NumericError("aps_index: singular value " + std::to_string(s) +
                           " too close to the kernel threshold; refine the grid");
      if (s > rep.threshold) {
        ++rank;
        rep.smallest_above = std::min(rep.smallest_above, s);
      } else {
        rep.largest_below = std::max(rep.largest_below, s);
      }
    }
    const long ker = static_cast<long>(A.cols()) - rank;
    const long coker = static_cast<long>(A.rows()) - rank;
    rep.kernel_dims.push_back(ker);
    rep.cokernel_dims.push_back(coker);
    rep.index += sys.model.weight(b) * static_cast<double>(ker - coker);
    rep.rows += A.rows();
    rep.cols += A.cols();
  }
  return rep;
}

template <typename Scalar>
double aps_index(const SuspensionProblem<Scalar>& prob) {
  return aps_index_report(prob).index;
}

namespace detail {

// Weights of the exact integral of e^{-a s} against the linear interpolant
// on one cell, normalized by the step: near end and far end.
inline void exp_cell_weights(double a, double& near_w, double& far_w) {
  if (a < 1e-3) {
    near_w = 0.5 - a / 6.0 + a * a / 24.0 - a * a * a / 120.0;
    far_w = 0.5 - a / 3.0 + a * a / 8.0 - a * a * a / 30.0;
    return;
  }
  const double e = std::exp(-a);
  near_w = (a - 1.0 + e) / (a * a);
  far_w = (1.0 - e * (1.0 + a)) / (a * a);
}

}  // namespace detail

/// g(x) = int_0^T G(x, y) f(y) dy with the inverse kernel of (d/dx + D_0) on the
/// half-line under the condition P_0 g(0) = 0:
///   G(x, y) = 1[x >= y] e^{-(x-y) D_0} P_0 - 1[y >= x] e^{-(x-y) D_0} (1 - P_0).
/// f is given on the K+1 uniform nodes of [0, T] (rows; columns index the
/// ambient space) and treated as piecewise linear; each eigencomponent is
/// integrated in closed form.
template <typename Scalar>
Mat<Scalar> halfline_aps_apply_inverse(const BlockHermitian<Scalar>& d0, const Mat<Scalar>& f,
                                       double T) {
  const auto& model = d0.model();
  if (f.cols() != model.dim()) throw StructuralError("halfline_aps_apply_inverse: f has wrong width");
  if (f.rows() < 2) throw ValidationError("halfline_aps_apply_inverse: grid needs two nodes");
  if (!(T > 0.0)) throw DomainError("halfline_aps_apply_inverse: T must be positive");
  if (f.row(f.rows() - 1).norm() != 0.0)
    throw PreconditionError("halfline_aps_apply_inverse: f must vanish at the far end");
  const auto dec = eigh(d0);
  if (!(dec.min_abs_eigenvalue() > dec.tolerance()))
    throw PreconditionError("halfline_aps_apply_inverse: D0 is not invertible");

  const Eigen::Index K = f.rows() - 1;
  const double h = T / static_cast<double>(K);
  Mat<Scalar> g = Mat<Scalar>::Zero(f.rows(), f.cols());
  for (std::size_t b = 0; b < model.block_count(); ++b) {
    const auto& e = dec.block(b);
    const Eigen::Index o = model.offset(b), n = model.block_dim(b);
    const Mat<Scalar> coeff = f.middleCols(o, n) * e.vectors.conjugate();  // c_k(x_j)
    Mat<Scalar> gc = Mat<Scalar>::Zero(K + 1, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double lam = e.values(k);
      const double a = std::abs(lam) * h, decay = std::exp(-a);
      double near_w, far_w;
      detail::exp_cell_weights(a, near_w, far_w);
      if (lam > 0) {
        for (Eigen::Index j = 0; j < K; ++j)
          gc(j + 1, k) = decay * gc(j, k) + h * (far_w * coeff(j, k) + near_w * coeff(j + 1, k));
      } else {
        for (Eigen::Index j = K; j-- > 0;)
          gc(j, k) = decay * gc(j + 1, k) - h * (near_w * coeff(j, k) + far_w * coeff(j + 1, k));
      }
    }
    g.middleCols(o, n) = gc * e.vectors.transpose();
  }
  return g;
}

/// ||(d/dx + D_0) g - f|| / ||f|| with the first-order forward difference
/// (g_{j+1} - g_j)/h + D_0 g_j - f_j on the K cells.
template <typename Scalar>
double halfline_residual(const BlockHermitian<Scalar>& d0, const Mat<Scalar>& g,
                         const Mat<Scalar>& f, double T) {
  const Eigen::Index K = f.rows() - 1;
  const double h = T / static_cast<double>(K);
  const Mat<Scalar> dense = d0.dense();
  const Mat<Scalar> r = (g.bottomRows(K) - g.topRows(K)) / Scalar(h) +
                        g.topRows(K) * dense.transpose() - f.topRows(K);
  const double fn = f.topRows(K).norm();
  return fn == 0.0 ? r.norm() : r.norm() / fn;
}

struct TruncationStep {
  double R = 0.0;
  double min_singular = 0.0;  // min over the u-grid of the smallest |eigenvalue|
  bool passing = false;
  std::optional<double> index;     // aps_index of D + P_R K_u P_R
  std::optional<double> crossing;  // sf_crossing of the same path
  bool agree = false;
  bool matches_full = false;       // crossing equals that of D + K_u
};

struct TruncationReport {
  std::vector<TruncationStep> steps;
  std::optional<double> minimal_R;
  double crossing_full = 0.0;  // sf_crossing of D + K_u
};

/// For each R of the sweep (default: doubling from 1 past ||D||): invertibility of D + (1-u) K_1 + u P_R K_1 P_R over
/// a u-grid (P_R = 1_[-R,R](D)), and for passing R the agreement of index and
/// crossing flow for the truncated path D + P_R K_u P_R. The index is taken
/// on interval-APS after an endpoint-flattening reparametrization.
template <typename Scalar>
TruncationReport perturbation_truncation_check(const BlockHermitian<Scalar>& D,
                                               const OperatorPath<Scalar>& K,
                                               std::vector<double> R_sweep, int u_points = 41,
                                               int grid = 64) {
  const auto dD = eigh(D);
  if (R_sweep.empty()) {
    for (double R = 1.0;; R *= 2.0) {
      R_sweep.push_back(R);
      if (R >= dD.spectral_radius()) break;
    }
  }
  const auto& K1 = K.back();
  auto shifted = map_samples(K, [&](double, const BlockHermitian<Scalar>& k) { return D + k; });

  TruncationReport rep;
  rep.crossing_full = sf_crossing(shifted).value;
  for (double R : R_sweep) {
    TruncationStep st;
    st.R = R;
    const auto PR = spectral_projection(dD, Interval::closed(-R, R));
    const auto compressed = BlockHermitian<Scalar>::trusted(PR.op() * K1.op() * PR.op());
    // E_u is affine in u, so between grid points its eigenvalues move by at
    // most half a grid step times ||K_1 - P_R K_1 P_R||_F.
    const double margin = 0.5 * (K1 - compressed).frobenius_norm() / (u_points - 1);
    st.min_singular = std::numeric_limits<double>::infinity();
    for (int i = 0; i < u_points; ++i) {
      const double u = static_cast<double>(i) / (u_points - 1);
      const auto E = D + (1.0 - u) * K1 + u * compressed;
      st.min_singular = std::min(st.min_singular, eigh(E).min_abs_eigenvalue());
    }
    st.passing = st.min_singular > margin + 1e-8;
    if (st.passing) {
      auto truncated = map_samples(K, [&](double, const BlockHermitian<Scalar>& k) {
        return D + BlockHermitian<Scalar>::trusted(PR.op() * k.op() * PR.op());
      });
      // Held constant near both ends so interval-APS applies.
      auto flat = reparametrize<Scalar>(
          truncated,
          [](double u) {
            const double t = std::clamp((u - 0.125) / 0.75, 0.0, 1.0);
            return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
          },
          33);
      SuspensionProblem<Scalar> prob{flat};
      prob.grid = grid;
      st.index = quantize(aps_index(prob), D.model());
      st.crossing = sf_crossing(truncated).value;
      st.agree = std::abs(*st.index - *st.crossing) < 1e-9;
      st.matches_full = std::abs(*st.crossing - rep.crossing_full) < 1e-9;
      if (!rep.minimal_R) rep.minimal_R = R;
    }
    rep.steps.push_back(st);
  }
  return rep;
}

}  // namespace sfcalc
