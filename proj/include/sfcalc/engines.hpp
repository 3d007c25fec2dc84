#pragma once

// Four independent spectral-flow engines and the auxiliary spectral invariants
// (truncated eta, Cheeger-Gromov type heat bounds).
//
// All engines use the convention that 0 belongs to the nonnegative side:
// P_u = 1_[0,inf)(F_u), with eigenvalues inside the cluster window around 0
// counted as 0.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "sfcalc/chi.hpp"
#include "sfcalc/errors.hpp"
#include "sfcalc/frequency.hpp"
#include "sfcalc/path.hpp"
#include "sfcalc/quadrature.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

enum class Method { crossing, phillips, integral, appendix };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::crossing: return "crossing";
    case Method::phillips: return "phillips";
    case Method::integral: return "integral";
    case Method::appendix: return "appendix";
  }
  return "unknown";
}

struct SpectralFlowResult {
  double value = 0.0;  // rounded to the model's weight step when close enough
  double raw = 0.0;    // unrounded engine output
  Method method = Method::crossing;
  std::map<std::string, double> diagnostics;

  double error_estimate() const {
    auto it = diagnostics.find("quadrature_error");
    return it == diagnostics.end() ? 0.0 : it->second;
  }
};

namespace detail {

inline SpectralFlowResult finish(double raw, Method m, const WeightedBlockModel* model,
                                 std::map<std::string, double> diag) {
  SpectralFlowResult r{raw, raw, m, std::move(diag)};
  if (model) {
    if (auto q = model->weight_step()) {
      const double k = std::round(raw / *q);
      if (std::abs(raw - k * *q) <= 0.25 * *q)
        r.value = k * *q;
      else
        r.diagnostics["quantization_failed"] = 1.0;
    }
  }
  return r;
}

template <typename Scalar>
double min_endpoint_gap(const SpectralDecomposition<Scalar>& a,
                        const SpectralDecomposition<Scalar>& b) {
  return std::min(a.min_abs_eigenvalue(), b.min_abs_eigenvalue());
}

// Upper bound for how far any eigenvalue moves on [u0, u1] (Weyl).
template <typename Scalar>
double motion_bound(const OperatorPath<Scalar>& p, double u0, double u1,
                    const BlockHermitian<Scalar>& f0, const BlockHermitian<Scalar>& f1) {
  double d = (f1 - f0).frobenius_norm();
  if (p.interpolation() == Interpolation::cubic_hermite)
    for (int k = 1; k < 4; ++k)
      d = std::max(d, (p.eval(u0 + (u1 - u0) * k / 4.0) - f0).frobenius_norm());
  return d;
}

// trace(A f(B)) from the decomposition of B.
template <typename Scalar, typename F>
double trace_with_function(const BlockHermitian<Scalar>& a, const SpectralDecomposition<Scalar>& dec,
                           F&& f) {
  double t = 0.0;
  for (std::size_t b = 0; b < dec.block_count(); ++b) {
    const auto& e = dec.block(b);
    const Mat<Scalar> rotated = e.vectors.adjoint() * a.block(b) * e.vectors;
    double s = 0.0;
    for (Eigen::Index k = 0; k < e.values.size(); ++k) s += std::real(rotated(k, k)) * f(e.values(k));
    t += dec.model().weight(b) * s;
  }
  return t;
}

// Integrate u -> g(u) over [0,1] segment by segment (the interpolant is smooth
// inside segments only).
template <typename Scalar>
QuadratureResult integrate_path(const OperatorPath<Scalar>& p, const std::function<double(double)>& g,
                                double abs_tol) {
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p.nodes()[i], b = p.nodes()[i + 1];
    const auto r = integrate(g, a, b, QuadratureOptions{abs_tol * (b - a), 1 << 14});
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.panels += r.panels;
  }
  return total;
}

}  // namespace detail

/// Net weighted flow of eigenvalues through 0 by window bookkeeping: on each
/// step, a level a in [window/4, 3 window/4] that no eigenvalue can cross is
/// chosen and the change of tr 1_[0,a) is accumulated. Steps whose eigenvalue
/// motion is too large for any such level are bisected (up to `max_depth`).
template <typename Scalar>
SpectralFlowResult sf_crossing(const OperatorPath<Scalar>& path, double window = 1.0,
                               int max_depth = 20) {
  if (!(window > 0.0)) throw DomainError("sf_crossing: window must be positive");
  double flow = 0.0;
  int deepest = 0, evaluations = 0;

  std::function<void(double, double, const BlockHermitian<Scalar>&, const BlockHermitian<Scalar>&,
                     const SpectralDecomposition<Scalar>&, const SpectralDecomposition<Scalar>&, int)>
      step = [&](double u0, double u1, const auto& f0, const auto& f1, const auto& d0,
                 const auto& d1, int depth) {
        deepest = std::max(deepest, depth);
        const double delta = detail::motion_bound(path, u0, u1, f0, f1);
        const RealVec ev = d0.eigenvalues();
        std::vector<double> candidates{0.25 * window, 0.5 * window, 0.75 * window};
        for (Eigen::Index k = 0; k + 1 < ev.size(); ++k) {
          const double m = 0.5 * (ev(k) + ev(k + 1));
          if (m > 0.25 * window && m < 0.75 * window) candidates.push_back(m);
        }
        double level = 0.0, clearance = -1.0;
        for (double c : candidates) {
          double dist = std::numeric_limits<double>::infinity();
          for (Eigen::Index k = 0; k < ev.size(); ++k) dist = std::min(dist, std::abs(ev(k) - c));
          if (dist > clearance) clearance = dist, level = c;
        }
        // eigenvalues within the cluster tolerance of the level would count ambiguously
        if (clearance > delta + 4.0 * std::max(d0.tolerance(), d1.tolerance())) {
          const Interval local{0.0, level, true, false};
          flow += d1.count(local) - d0.count(local);
          return;
        }
        if (depth >= max_depth)
          throw NumericError("sf_crossing: refinement exceeded max depth", flow);
        const double um = 0.5 * (u0 + u1);
        const auto fm = path.eval(um);
        const auto dm = eigh(fm);
        ++evaluations;
        step(u0, um, f0, fm, d0, dm, depth + 1);
        step(um, u1, fm, f1, dm, d1, depth + 1);
      };

  std::vector<SpectralDecomposition<Scalar>> decs;
  for (const auto& s : path.samples()) decs.push_back(eigh(s));
  evaluations += static_cast<int>(decs.size());
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    step(path.nodes()[i], path.nodes()[i + 1], path.samples()[i], path.samples()[i + 1], decs[i],
         decs[i + 1], 0);

  return detail::finish(flow, Method::crossing, &path.model(),
                        {{"refinement_depth", deepest},
                         {"evaluations", evaluations},
                         {"window", window},
                         {"min_endpoint_gap", detail::min_endpoint_gap(decs.front(), decs.back())}});
}

/// Phillips' definition: sum over a partition of ec(P_j, P_{j+1}) with
/// ec(P, Q) = tr(Q(1-P)) - tr(P(1-Q)), P_j the nonnegative spectral
/// projections. Steps are bisected until ||P_j - P_{j+1}|| <= 1/2 or until the
/// step is shorter than `jump_floor` in operator size, which localizes a
/// finite-trace jump of the projection.
template <typename Scalar>
SpectralFlowResult sf_phillips(const OperatorPath<Scalar>& path, int max_depth = 20,
                               double jump_floor = 1e-5) {
  double flow = 0.0;
  int deepest = 0, jumps = 0;
  const auto nonneg = Interval::nonnegative();

  auto ec = [](const BlockHermitian<Scalar>& p, const BlockHermitian<Scalar>& q) {
    const auto id = BlockOperator<Scalar>::identity(p.model());
    return std::real(trace(q.op() * (id - p.op())) - trace(p.op() * (id - q.op())));
  };

  std::function<void(double, double, const BlockHermitian<Scalar>&, const BlockHermitian<Scalar>&,
                     const BlockHermitian<Scalar>&, const BlockHermitian<Scalar>&, int)>
      step = [&](double u0, double u1, const auto& f0, const auto& f1, const auto& p0,
                 const auto& p1, int depth) {
        deepest = std::max(deepest, depth);
        const double dist = operator_norm(p0 - p1);
        const bool localized =
            detail::motion_bound(path, u0, u1, f0, f1) <= jump_floor * (1.0 + f0.frobenius_norm());
        if (dist <= 0.5 || localized) {
          if (dist > 0.5) ++jumps;
          flow += ec(p0, p1);
          return;
        }
        if (depth >= max_depth)
          throw NumericError("sf_phillips: partition refinement did not converge", flow);
        const double um = 0.5 * (u0 + u1);
        const auto fm = path.eval(um);
        const auto pm = spectral_projection(eigh(fm), nonneg);
        step(u0, um, f0, fm, p0, pm, depth + 1);
        step(um, u1, fm, f1, pm, p1, depth + 1);
      };

  std::vector<BlockHermitian<Scalar>> proj;
  for (const auto& s : path.samples()) proj.push_back(spectral_projection(eigh(s), nonneg));
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    step(path.nodes()[i], path.nodes()[i + 1], path.samples()[i], path.samples()[i + 1], proj[i],
         proj[i + 1], 0);
  return detail::finish(flow, Method::phillips, &path.model(),
                        {{"refinement_depth", deepest}, {"projection_jumps", jumps}});
}

/// Phillips engine on the frequency model; both traces of ec are evaluated by
/// quadrature against the density. An ec summand whose integrand does not
/// vanish at the cutoff is not trace class and raises ModelError.
SpectralFlowResult sf_phillips(const FrequencyPath& path);

/// eta_s = sum_k w_k sign(lambda_k) erfc(sqrt(s)|lambda_k|), sign(0) = 0.
template <typename Scalar>
double eta_truncated(const SpectralDecomposition<Scalar>& dec, double s) {
  if (!(s > 0.0)) throw DomainError("eta_truncated: s must be positive");
  const double tol = dec.tolerance(), rs = std::sqrt(s);
  return dec.trace_of([&](double x) {
    if (std::abs(x) <= tol) return 0.0;
    return (x > 0 ? 1.0 : -1.0) * std::erfc(rs * std::abs(x));
  });
}
template <typename Scalar>
double eta_truncated(const BlockHermitian<Scalar>& op, double s) {
  return eta_truncated(eigh(op), s);
}

/// Heat-kernel formula:
///   sqrt(s/pi) int_0^1 tr(F'_u e^{-s F_u^2}) du + eta_s(F_1)/2 - eta_s(F_0)/2
///   + tr P_ker(F_1)/2 - tr P_ker(F_0)/2.
/// The individual terms are reported in the diagnostics.
template <typename Scalar>
SpectralFlowResult sf_integral(const OperatorPath<Scalar>& path, double s, double abs_tol = 1e-8) {
  if (!(s > 0.0)) throw DomainError("sf_integral: s must be positive");
  auto integrand = [&](double u) {
    const auto f = path.eval(u);
    return detail::trace_with_function(path.derivative(u), eigh(f),
                                       [s](double x) { return std::exp(-s * x * x); });
  };
  QuadratureResult q;
  try {
    q = detail::integrate_path<Scalar>(path, integrand, abs_tol / std::sqrt(s / std::numbers::pi));
  } catch (const NumericError& e) {
    throw NumericError(std::string("sf_integral: ") + e.what(), e.partial());
  }
  const auto d0 = eigh(path.front()), d1 = eigh(path.back());
  const double integral = std::sqrt(s / std::numbers::pi) * q.value;
  const double eta1 = eta_truncated(d1, s), eta0 = eta_truncated(d0, s);
  const double ker1 = d1.count(Interval::point(0.0)), ker0 = d0.count(Interval::point(0.0));
  const double raw = integral + 0.5 * eta1 - 0.5 * eta0 + 0.5 * ker1 - 0.5 * ker0;
  return detail::finish(raw, Method::integral, &path.model(),
                        {{"s", s},
                         {"integral_term", integral},
                         {"eta_end", eta1},
                         {"eta_start", eta0},
                         {"kernel_end", ker1},
                         {"kernel_start", ker0},
                         {"quadrature_error", std::sqrt(s / std::numbers::pi) * q.error_estimate},
                         {"panels", q.panels}});
}

struct AppendixOptions {
  /// Divide the whole path by max_u ||F_u|| when it exceeds 1.
  bool rescale = false;
  /// Extend by F_0 + eps P_ker(F_0) -> F_0 and F_1 -> F_1 + eps P_ker(F_1), which
  /// leaves the flow unchanged and makes the endpoints invertible.
  bool regularize_endpoints = false;
  double abs_tol = 1e-9;
};

template <typename Scalar>
OperatorPath<Scalar> scale_path(const OperatorPath<Scalar>& p, double c) {
  return map_samples(p, [c](double, const BlockHermitian<Scalar>& f) { return c * f; });
}

/// Lift the kernel of both endpoints by +eps.
template <typename Scalar>
OperatorPath<Scalar> regularize_kernel_endpoints(const OperatorPath<Scalar>& p, double eps = 0.5) {
  auto lifted = [eps](const BlockHermitian<Scalar>& f) {
    return f + eps * spectral_projection(eigh(f), Interval::point(0.0));
  };
  const auto start = lifted(p.front()), end = lifted(p.back());
  auto first = OperatorPath<Scalar>({0.0, 1.0}, {start, p.front()}, p.interpolation());
  auto last = OperatorPath<Scalar>({0.0, 1.0}, {p.back(), end}, p.interpolation());
  return concatenate(concatenate(first, p), last);
}

/// Chi-formula:
///   1/2 int_0^1 tr(F'_u chi'(F_u)) du + 1/2 tr(2P_1 - 1 - chi(F_1))
///   - 1/2 tr(2P_0 - 1 - chi(F_0)),
/// valid for ||F_u|| <= 1 and invertible endpoints.
template <typename Scalar>
SpectralFlowResult sf_appendix(const OperatorPath<Scalar>& input, const ChiProfile& chi,
                               const AppendixOptions& opts = {}) {
  OperatorPath<Scalar> path = input;
  double scale = 1.0;
  double norm = max_norm(path);
  if (path.interpolation() == Interpolation::cubic_hermite)
    for (int k = 0; k <= 256; ++k) norm = std::max(norm, operator_norm(path.eval(k / 256.0)));
  if (norm > 1.0 + 1e-12) {  // chi is flat past 1, rounding is harmless
    if (!opts.rescale)
      throw PreconditionError("sf_appendix: path norm exceeds 1 (enable rescaling)");
    scale = 1.0 / norm;
    path = scale_path(path, scale);
  }
  if (opts.regularize_endpoints) path = regularize_kernel_endpoints(path);

  const auto d0 = eigh(path.front()), d1 = eigh(path.back());
  const double gap = detail::min_endpoint_gap(d0, d1);
  if (!(gap > 1e-8)) throw PreconditionError("sf_appendix: endpoints are not invertible");

  auto integrand = [&](double u) {
    return detail::trace_with_function(path.derivative(u), eigh(path.eval(u)), chi.dchi);
  };
  QuadratureResult q;
  try {
    q = detail::integrate_path<Scalar>(path, integrand, 2.0 * opts.abs_tol);
  } catch (const NumericError& e) {
    throw NumericError(std::string("sf_appendix: ") + e.what(), e.partial());
  }
  auto endpoint = [&](const SpectralDecomposition<Scalar>& d) {
    const double tol = d.tolerance();
    return 0.5 * d.trace_of([&](double x) {
      const double p = Interval::nonnegative().contains(x, tol) ? 1.0 : 0.0;
      return 2.0 * p - 1.0 - chi(x);
    });
  };
  const double integral = 0.5 * q.value;
  const double e1 = endpoint(d1), e0 = endpoint(d0);
  return detail::finish(integral + e1 - e0, Method::appendix, &path.model(),
                        {{"integral_term", integral},
                         {"endpoint_end", e1},
                         {"endpoint_start", e0},
                         {"scale", scale},
                         {"min_endpoint_gap", gap},
                         {"quadrature_error", 0.5 * q.error_estimate},
                         {"panels", q.panels}});
}

struct CgBound {
  double lhs = 0.0;
  double term_I = 0.0;
  double term_II = 0.0;
  bool holds = true;
};

/// lhs = sqrt(s) tr(|D| e^{-s D^2}) against the two-range bound with
/// mu = 1/sqrt(2(s-1)):  I = e^{-1/2}/sqrt(2) tr 1_(0,mu](D^2),
/// II = sqrt(s mu) e^{-(s-1) mu} tr e^{-D^2}. The kernel never contributes.
template <typename Scalar>
CgBound cg_bound(const SpectralDecomposition<Scalar>& dec, double s) {
  if (!(s > 1.0)) throw DomainError("cg_bound: s must exceed 1");
  const double tol = dec.tolerance();
  const double mu = 1.0 / std::sqrt(2.0 * (s - 1.0));
  CgBound r;
  r.lhs = std::sqrt(s) * dec.trace_of([&](double x) {
    return std::abs(x) <= tol ? 0.0 : std::abs(x) * std::exp(-s * x * x);
  });
  r.term_I = std::exp(-0.5) / std::sqrt(2.0) * dec.trace_of([&](double x) {
    return (std::abs(x) > tol && x * x <= mu) ? 1.0 : 0.0;
  });
  r.term_II = std::sqrt(s) * std::sqrt(mu) * std::exp(-(s - 1.0) * mu) *
              dec.trace_of([](double x) { return std::exp(-x * x); });
  r.holds = r.lhs <= r.term_I + r.term_II + 1e-12;
  return r;
}
template <typename Scalar>
CgBound cg_bound(const BlockHermitian<Scalar>& op, double s) {
  return cg_bound(eigh(op), s);
}

}  // namespace sfcalc
