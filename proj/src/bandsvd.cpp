#include "sfcalc/bandsvd.hpp"

#include <Eigen/SVD>

#include <functional>
#include <string>

#ifdef SFCALC_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace sfcalc {

namespace {

#ifndef SFCALC_HAVE_LAPACKE

template <typename Scalar>
RealVec dense_singular_values(const Mat<Scalar>& a) {
  return Eigen::BDCSVD<Mat<Scalar>>(a).singularValues();
}

#else

template <typename Scalar>
Mat<Scalar> band_storage(const Mat<Scalar>& a, lapack_int kl, lapack_int ku) {
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  Mat<Scalar> ab = Mat<Scalar>::Zero(kl + ku + 1, n);
  for (lapack_int j = 0; j < n; ++j)
    for (lapack_int i = std::max<lapack_int>(0, j - ku); i <= std::min<lapack_int>(m - 1, j + kl); ++i)
      ab(ku + i - j, j) = a(i, j);
  return ab;
}

// d, e hold the bidiagonal from the reduction; upper iff rows >= cols.
RealVec bidiagonal_values(RealVec d, RealVec e, bool upper) {
  double none = 0.0;
  const lapack_int info = LAPACKE_dbdsqr(LAPACK_COL_MAJOR, upper ? 'U' : 'L',
                                         static_cast<lapack_int>(d.size()), 0, 0, 0, d.data(),
                                         e.data(), &none, 1, &none, 1, &none, 1);
  if (info != 0) throw NumericError("singular_values: bidiagonal QR failed, info " + std::to_string(info));
  std::sort(d.data(), d.data() + d.size(), std::greater<>());
  return d;
}

template <typename Scalar, typename Reduce>
RealVec banded(const Mat<Scalar>& a, Reduce&& reduce) {
  const auto [kl, ku] = bandwidths(a);
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  Mat<Scalar> ab = band_storage(a, static_cast<lapack_int>(kl), static_cast<lapack_int>(ku));
  const lapack_int k = std::min(m, n);
  RealVec d(k), e(std::max<lapack_int>(k - 1, 1));
  const lapack_int info = reduce(m, n, static_cast<lapack_int>(kl), static_cast<lapack_int>(ku), ab, d, e);
  if (info != 0) throw NumericError("singular_values: band reduction failed, info " + std::to_string(info));
  return bidiagonal_values(std::move(d), std::move(e), m >= n);
}

#endif

}  // namespace

bool banded_svd_available() {
#ifdef SFCALC_HAVE_LAPACKE
  return true;
#else
  return false;
#endif
}

RealVec singular_values(const Mat<std::complex<double>>& a) {
  if (a.size() == 0) return RealVec();
#ifdef SFCALC_HAVE_LAPACKE
  return banded(a, [](lapack_int m, lapack_int n, lapack_int kl, lapack_int ku,
                      Mat<std::complex<double>>& ab, RealVec& d, RealVec& e) {
    lapack_complex_double none{};
    return LAPACKE_zgbbrd(LAPACK_COL_MAJOR, 'N', m, n, 0, kl, ku,
                          reinterpret_cast<lapack_complex_double*>(ab.data()),
                          static_cast<lapack_int>(ab.rows()), d.data(), e.data(), &none, 1, &none, 1,
                          &none, 1);
  });
#else
  return dense_singular_values(a);
#endif
}

RealVec singular_values(const Mat<double>& a) {
  if (a.size() == 0) return RealVec();
#ifdef SFCALC_HAVE_LAPACKE
  return banded(a, [](lapack_int m, lapack_int n, lapack_int kl, lapack_int ku, Mat<double>& ab,
                      RealVec& d, RealVec& e) {
    double none = 0.0;
    return LAPACKE_dgbbrd(LAPACK_COL_MAJOR, 'N', m, n, 0, kl, ku, ab.data(),
                          static_cast<lapack_int>(ab.rows()), d.data(), e.data(), &none, 1, &none, 1,
                          &none, 1);
  });
#else
  return dense_singular_values(a);
#endif
}

}  // namespace sfcalc
