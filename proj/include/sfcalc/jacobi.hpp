#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <type_traits>
#include <vector>

#include "sfcalc/errors.hpp"

namespace sfcalc {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RealVec = Eigen::VectorXd;

template <typename Scalar>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

namespace detail {

template <typename Scalar>
double abs2(const Scalar& z) {
  if constexpr (is_complex<Scalar>::value)
    return std::norm(z);
  else
    return z * z;
}

template <typename Scalar>
Scalar conj(const Scalar& z) {
  if constexpr (is_complex<Scalar>::value)
    return std::conj(z);
  else
    return z;
}

/// Replace the columns of `vecs` spanning one eigenvalue cluster by a basis that
/// depends only on the spanned subspace: pivoted QR of the cluster projector
/// selects coordinate directions, Gram-Schmidt in pivot order orthonormalizes.
/// Singletons only get their phase fixed.
template <typename Scalar>
void canonicalize_subspace(Mat<Scalar>& vecs, Eigen::Index first, Eigen::Index count) {
  using std::abs;
  const Eigen::Index n = vecs.rows();
  Mat<Scalar> cols = vecs.middleCols(first, count);
  if (count > 1) {
    Mat<Scalar> proj = cols * cols.adjoint();
    Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(proj);
    const auto& perm = qr.colsPermutation().indices();
    Mat<Scalar> basis(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
      Vec<Scalar> v = proj.col(perm(k));
      for (Eigen::Index j = 0; j < k; ++j) v -= basis.col(j) * basis.col(j).dot(v);
      for (Eigen::Index j = 0; j < k; ++j) v -= basis.col(j) * basis.col(j).dot(v);
      basis.col(k) = v / v.norm();
    }
    cols = basis;
  }
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = abs(cols(i, k));
      if (a > best * (1.0 + 1e-10)) {
        best = a;
        arg = i;
      }
    }
    const Scalar pivot = cols(arg, k);
    if (abs(pivot) > 0) cols.col(k) *= conj(pivot) / Scalar(abs(pivot));
  }
  vecs.middleCols(first, count) = cols;
}

}  // namespace detail

template <typename Scalar>
struct HermitianEigen {
  RealVec values;      // ascending
  Mat<Scalar> vectors; // unitary, columns match `values`
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix with row-wise (p<q)
/// sweep order. Eigenvalues closer than `cluster_tol * (1 + ||A||)` are
/// treated as one cluster when canonicalizing eigenvectors.
template <typename Scalar>
HermitianEigen<Scalar> jacobi_eigh(const Mat<Scalar>& input, double cluster_tol = 1e-9,
                                   int max_sweeps = 100) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw StructuralError("jacobi_eigh: matrix is not square");

  Mat<Scalar> a = input;
  Mat<Scalar> v = Mat<Scalar>::Identity(n, n);
  const double fro = a.norm();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += detail::abs2(a(p, q));
    if (std::sqrt(off) <= 1e-15 * fro || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const double g = abs(apq);
        if (g <= 1e-300) continue;
        const Scalar ph = apq / Scalar(g);
        const double app = std::real(a(p, p));
        const double aqq = std::real(a(q, q));
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (abs(theta) + sqrt(1.0 + theta * theta));
        const double c = 1.0 / sqrt(1.0 + t * t);
        const double s = t * c;
        const Scalar cph = detail::conj(ph);
        // columns: A <- A J with J = [[c, s], [-s conj(ph), c conj(ph)]]
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * cph * akq;
          a(k, q) = s * akp + c * cph * akq;
        }
        // rows: A <- J^H A
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * ph * aqk;
          a(q, k) = s * apk + c * ph * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(std::real(a(p, p)));
        a(q, q) = Scalar(std::real(a(q, q)));
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * cph * vkq;
          v(k, q) = s * vkp + c * cph * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps)
    throw NumericError("jacobi_eigh: no convergence after max sweeps");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::real(a(i, i)) < std::real(a(j, j));
  });

  HermitianEigen<Scalar> out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = std::real(a(order[k], order[k]));
    out.vectors.col(k) = v.col(order[k]);
  }

  double scale = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) scale = std::max(scale, abs(out.values(k)));
  const double tol = cluster_tol * (1.0 + scale);
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k == n || out.values(k) - out.values(k - 1) > tol) {
      detail::canonicalize_subspace(out.vectors, start, k - start);
      start = k;
    }
  }
  return out;
}

}  // namespace sfcalc
