#include "sfcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "sfcalc/errors.hpp"

namespace sfcalc {

GaussLegendreRule gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

namespace {

const GaussLegendreRule& rule15() {
  static const GaussLegendreRule r = gauss_legendre(15);
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const auto& r = rule15();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts, std::span<const double> breakpoints) {
  QuadratureResult res;
  if (a == b) return res;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> edges{a};
  std::vector<double> bp(breakpoints.begin(), breakpoints.end());
  std::sort(bp.begin(), bp.end());
  for (double x : bp)
    if (x > a && x < b && x > edges.back()) edges.push_back(x);
  edges.push_back(b);

  const double total = b - a;
  struct Pending {
    double a, b, whole;
  };
  std::vector<Pending> stack;
  for (std::size_t i = edges.size() - 1; i > 0; --i)
    stack.push_back({edges[i - 1], edges[i], panel(f, edges[i - 1], edges[i])});

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = panel(f, p.a, m), right = panel(f, m, p.b);
    const double err = std::abs(p.whole - (left + right));
    const double share = opts.abs_tol * (p.b - p.a) / total;
    if (err <= share || (p.b - p.a) < 1e-14 * total) {
      res.value += left + right;
      res.error_estimate += err;
      res.panels += 2;
      continue;
    }
    if (res.panels + static_cast<int>(stack.size()) + 2 > opts.max_panels)
      throw NumericError("integrate: adaptive quadrature exceeded " +
                             std::to_string(opts.max_panels) + " panels",
                         sign * (res.value + left + right));
    stack.push_back({m, p.b, right});
    stack.push_back({p.a, m, left});
  }
  res.value *= sign;
  return res;
}

}  // namespace sfcalc
