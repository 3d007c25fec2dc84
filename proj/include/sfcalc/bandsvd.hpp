#pragma once

#include <complex>

#include "sfcalc/jacobi.hpp"

namespace sfcalc {

/// Singular values of a, largest first. The nonzero band of a is reduced to
/// bidiagonal form directly when LAPACK is available; otherwise a dense
/// divide-and-conquer SVD is used.
RealVec singular_values(const Mat<std::complex<double>>& a);
RealVec singular_values(const Mat<double>& a);

/// Smallest (kl, ku) such that a(i, j) == 0 whenever i - j > kl or j - i > ku.
template <typename Scalar>
std::pair<Eigen::Index, Eigen::Index> bandwidths(const Mat<Scalar>& a) {
  Eigen::Index kl = 0, ku = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != Scalar(0)) {
        kl = std::max(kl, i - j);
        ku = std::max(ku, j - i);
      }
  return {kl, ku};
}

bool banded_svd_available();

}  // namespace sfcalc
