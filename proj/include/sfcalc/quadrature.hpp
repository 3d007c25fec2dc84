#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sfcalc {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_panels = 1 << 14;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Adaptive composite 15-point Gauss-Legendre on [a, b]. A panel is accepted
/// when it agrees with the sum over its two halves to within its share of
/// `abs_tol`; otherwise it is bisected. `breakpoints` inside (a, b) seed the
/// initial panel split so integrand discontinuities fall on panel edges.
/// Throws NumericError (with the partial sum) past `max_panels`.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {},
                           std::span<const double> breakpoints = {});

}  // namespace sfcalc
