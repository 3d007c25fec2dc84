#include "sfcalc/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace sfcalc {

namespace {

using std::numbers::pi;

double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

std::string key(const std::string& engine, const std::string& param, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s@%s=%g", engine.c_str(), param.c_str(), v);
  return buf;
}

// tr(X' e^{-s X^2}) for X self-adjoint in the Gram inner product g, with X'
// given densely and X = G^{-1/2} Xh G^{1/2}.
double gram_trace(const Mat<cd>& xdot, const Mat<cd>& xh, const RealVec& g, double s) {
  const RealVec r = g.cwiseSqrt();
  const Mat<cd> xdot_h = r.asDiagonal() * xdot * r.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat<cd>> es(xh);
  const RealVec f = (-s * es.eigenvalues().array().square()).exp().matrix();
  const Mat<cd> rot = es.eigenvectors().adjoint() * xdot_h * es.eigenvectors();
  double t = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) t += std::real(rot(k, k)) * f(k);
  return t;
}

Mat<cd> dense_hermitian(const Mat<cd>& x, const RealVec& g) {
  const RealVec r = g.cwiseSqrt();
  Mat<cd> out = r.asDiagonal() * x * r.cwiseInverse().asDiagonal();
  return (0.5 * (out + out.adjoint())).eval();
}

// Trivialized operator B_u = U_u D_u U_u^{-1} together with the metric-0 Gram diagonal.
Mat<cd> trivialized(const CircleMetricPath& metric, double u, RealVec* gram0) {
  const auto op = build_signature(metric, u);
  const RealVec U = trivialization(metric, u);
  if (gram0) *gram0 = build_signature(metric, 0.0).gram;
  return U.asDiagonal() * op.D * U.cwiseInverse().asDiagonal();
}

template <typename F>
Mat<cd> five_point(F&& f, double u) {
  const double h = 1e-3;
  auto at = [&](double x) { return f(std::clamp(x, 0.0, 1.0)); };
  return (at(u - 2 * h) - 8.0 * at(u - h) + 8.0 * at(u + h) - at(u + 2 * h)) / cd(12.0 * h);
}

}  // namespace

double FourierSeries::operator()(double x) const {
  double v = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
  for (std::size_t k = 1; k < cos_coeffs.size(); ++k) v += cos_coeffs[k] * std::cos(k * x);
  for (std::size_t k = 1; k < sin_coeffs.size(); ++k) v += sin_coeffs[k] * std::sin(k * x);
  return v;
}

int FourierSeries::degree() const {
  int d = 0;
  for (std::size_t k = 1; k < cos_coeffs.size(); ++k)
    if (cos_coeffs[k] != 0.0) d = static_cast<int>(k);
  for (std::size_t k = 1; k < sin_coeffs.size(); ++k)
    if (sin_coeffs[k] != 0.0) d = std::max(d, static_cast<int>(k));
  return d;
}

CircleMetricPath::CircleMetricPath(int n, Shape shape, int samples, double flat)
    : n_(n), shape_(std::move(shape)), samples_(samples), flat_(flat) {
  if (n_ < 2 || n_ % 2 != 0) throw ValidationError("CircleMetricPath: n must be a positive even integer");
  if (!shape_) throw ValidationError("CircleMetricPath: missing shape");
  if (samples_ < 3) throw ValidationError("CircleMetricPath: need at least three u-samples");
  if (!(flat_ > 0.0 && flat_ < 0.5)) throw ValidationError("CircleMetricPath: flat must lie in (0, 1/2)");
  if (!(flat_ * (samples_ - 1) >= 1.0))
    throw ValidationError("CircleMetricPath: u-sampling too coarse for the endpoint flattening");
  for (int i = 0; i <= 10; ++i)
    if (series(i / 10.0).degree() > n_ / 2)
      throw ValidationError("CircleMetricPath: metric has modes beyond n/2");
  if (!(h_min() > 1e-3)) throw ValidationError("CircleMetricPath: conformal factor is not positive");
}

CircleMetricPath CircleMetricPath::constant(int n, FourierSeries h, int samples) {
  return CircleMetricPath(n, [h](double) { return h; }, samples);
}

CircleMetricPath CircleMetricPath::named(const std::string& name, int n, int samples) {
  if (name == "flat") return constant(n, FourierSeries{}, samples);
  if (name == "breathing")
    return CircleMetricPath(
        n, [](double s) { return FourierSeries{{1.0}, {0.0, 0.3 * s * (1.0 - s)}}; }, samples);
  if (name == "tilt")
    return CircleMetricPath(n, [](double s) { return FourierSeries{{1.0}, {0.0, 0.3 * s}}; },
                            samples);
  if (name == "mixed")
    return CircleMetricPath(
        n,
        [](double s) {
          return FourierSeries{{1.0 + 0.5 * s, 0.4 * s}, {0.0, 0.0, 0.2 * s * s}};
        },
        samples);
  throw ValidationError("CircleMetricPath: unknown metric family '" + name + "'");
}

std::vector<std::string> CircleMetricPath::names() { return {"flat", "breathing", "tilt", "mixed"}; }

double CircleMetricPath::sigma(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("CircleMetricPath: u outside [0,1]");
  return smoothstep(std::clamp((u - flat_) / (1.0 - 2.0 * flat_), 0.0, 1.0));
}

FourierSeries CircleMetricPath::series(double u) const { return shape_(sigma(u)); }

RealVec CircleMetricPath::h(double u) const {
  const auto s = series(u);
  const int N = points();
  RealVec out(N);
  for (int j = 0; j < N; ++j) out(j) = s(2.0 * pi * j / N);
  return out;
}

double CircleMetricPath::h_min() const {
  double m = std::numeric_limits<double>::infinity();
  const int nx = 4 * points();
  for (int i = 0; i <= 100; ++i) {
    const auto s = series(i / 100.0);
    for (int j = 0; j < nx; ++j) m = std::min(m, s(2.0 * pi * j / nx));
  }
  return m;
}

WeightedBlockModel signature_model(int points) {
  return WeightedBlockModel({{points, 1.0}, {points, 1.0}});
}

Mat<double> spectral_derivative(int points) {
  if (points < 3 || points % 2 == 0) throw ValidationError("spectral_derivative: need an odd point count");
  const int half = (points - 1) / 2;
  Mat<double> d(points, points);
  for (int j = 0; j < points; ++j)
    for (int l = 0; l < points; ++l) {
      const double th = 2.0 * pi * (j - l) / points;
      double v = 0.0;
      for (int k = 1; k <= half; ++k) v -= k * std::sin(k * th);
      d(j, l) = 2.0 * v / points;
    }
  return d;
}

SignatureOperator build_signature(const CircleMetricPath& metric, double u) {
  const int N = metric.points();
  const RealVec h = metric.h(u);
  if (!(h.minCoeff() > 0.0)) throw ValidationError("build_signature: conformal factor not positive");
  const cd I(0.0, 1.0);
  const Mat<cd> dx = spectral_derivative(N).cast<cd>();

  SignatureOperator op;
  op.h = h;
  op.d = Mat<cd>::Zero(2 * N, 2 * N);
  op.d.block(N, 0, N, N) = dx;
  // tau = i^{1 + k(k+1)} * on k-forms: *1 = h dx, *(g dx) = g / h
  op.tau = Mat<cd>::Zero(2 * N, 2 * N);
  for (int j = 0; j < N; ++j) {
    op.tau(N + j, j) = I * h(j);
    op.tau(j, N + j) = -I / h(j);
  }
  op.D = op.tau * op.d + op.d * op.tau;
  op.gram.resize(2 * N);
  op.gram.head(N) = (2.0 * pi / N) * h;
  op.gram.tail(N) = (2.0 * pi / N) * h.cwiseInverse();

  const Mat<cd> id = Mat<cd>::Identity(2 * N, 2 * N);
  if ((op.tau * op.tau - id).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("build_signature: chirality is not an involution");
  const Mat<cd> gd = op.gram.asDiagonal() * op.D;
  if ((gd - gd.adjoint()).norm() > 1e-9 * (1.0 + gd.norm()))
    throw ValidationError("build_signature: operator is not self-adjoint for the metric");
  return op;
}

BlockHermitian<cd> SignatureOperator::hermitian() const {
  const Eigen::Index N = h.size();
  const Mat<cd> full = dense_hermitian(D, gram);
  return BlockHermitian<cd>(signature_model(static_cast<int>(N)),
                            {full.topLeftCorner(N, N), full.bottomRightCorner(N, N)});
}

RealVec trivialization(const CircleMetricPath& metric, double u) {
  const RealVec h0 = metric.h(0.0), hu = metric.h(u);
  const Eigen::Index N = h0.size();
  RealVec U(2 * N);
  U.head(N) = (hu.array() / h0.array()).sqrt();
  U.tail(N) = (h0.array() / hu.array()).sqrt();
  return U;
}

OperatorPath<cd> hermitian_signature_path(const CircleMetricPath& metric) {
  const RealVec g0 = build_signature(metric, 0.0).gram;
  const int N = metric.points();
  return OperatorPath<cd>::sampled(
      [&](double u) {
        const Mat<cd> b = dense_hermitian(trivialized(metric, u, nullptr), g0);
        return BlockHermitian<cd>(signature_model(N),
                                  {b.topLeftCorner(N, N), b.bottomRightCorner(N, N)});
      },
      metric.samples());
}

std::pair<double, double> conjugation_pair(const CircleMetricPath& metric, double u, double s) {
  const auto op = build_signature(metric, u);
  const Mat<cd> ddot = five_point([&](double x) { return build_signature(metric, x).D; }, u);
  const double tr_d = gram_trace(ddot, dense_hermitian(op.D, op.gram), op.gram, s);

  RealVec g0;
  const Mat<cd> b = trivialized(metric, u, &g0);
  const Mat<cd> bdot = five_point([&](double x) { return trivialized(metric, x, nullptr); }, u);
  const double tr_b = gram_trace(bdot, dense_hermitian(b, g0), g0, s);
  return {tr_d, tr_b};
}

SignatureFlowReport signature_flow_scenario(const CircleMetricPath& metric,
                                            const SignatureFlowOptions& opts) {
  SignatureFlowReport rep;
  const auto path = hermitian_signature_path(metric);

  rep.kernel_trace_min = std::numeric_limits<double>::infinity();
  rep.kernel_trace_max = -rep.kernel_trace_min;
  for (const auto& sample : path.samples()) {
    const auto dec = eigh(sample);
    const double k = dec.count(Interval::point(0.0));
    rep.kernel_trace_min = std::min(rep.kernel_trace_min, k);
    rep.kernel_trace_max = std::max(rep.kernel_trace_max, k);
    const RealVec ev = dec.eigenvalues();
    rep.symmetry_defect = std::max(rep.symmetry_defect, (ev + ev.reverse()).cwiseAbs().maxCoeff());
  }

  for (const auto& e : opts.engines) {
    if (e == "crossing") {
      rep.engines["crossing"] = sf_crossing(path).raw;
    } else if (e == "phillips") {
      rep.engines["phillips"] = sf_phillips(path).raw;
    } else if (e == "integral") {
      for (double s : opts.integral_s) rep.engines[key("integral", "s", s)] = sf_integral(path, s).raw;
    } else if (e == "appendix") {
      for (const auto& id : opts.chi_ids)
        rep.engines["appendix@chi=" + id] =
            sf_appendix(path, ChiProfile::by_id(id), AppendixOptions{true, true}).raw;
    } else {
      throw ValidationError("signature_flow_scenario: unknown engine '" + e + "'");
    }
  }

  SuspensionProblem<cd> prob{path};
  prob.grid = opts.aps_grid;
  rep.aps_index = aps_index(prob);

  rep.s_grid = opts.s_grid;
  for (double s : opts.s_grid) {
    for (int i = 0; i < opts.cg_points; ++i) {
      const double u = opts.cg_points == 1 ? 0.5 : static_cast<double>(i) / (opts.cg_points - 1);
      if (!cg_bound(path.eval(u), s).holds) rep.cg_holds = false;
      const auto [td, tb] = conjugation_pair(metric, u, s);
      rep.conjugation_residual = std::max(rep.conjugation_residual, std::abs(td - tb));
    }
    const double rs = std::sqrt(s);
    auto lhs = [&](double u) { return cg_bound(path.eval(u), s).lhs; };
    auto flow = [&](double u) {
      const auto f = path.eval(u);
      return rs * std::abs(detail::trace_with_function(
                      path.derivative(u), eigh(f), [s](double x) { return std::exp(-s * x * x); }));
    };
    rep.decay.push_back(detail::integrate_path<cd>(path, lhs, 1e-12).value);
    rep.flow_integrand.push_back(detail::integrate_path<cd>(path, flow, 1e-12).value);
  }
  return rep;
}

DiracFamilyReport dirac_family_scenario(double u_start, double u_end, const FrequencyModel& model,
                                        int steps) {
  DiracFamilyReport rep;
  const auto path = shifted_dirac_path(model, u_start, u_end, steps);
  const auto r = sf_phillips(path);
  rep.flow = r.raw;
  rep.quadrature_error = r.error_estimate();

  const double lo = -std::max(u_start, u_end), hi = -std::min(u_start, u_end);
  if (hi > lo) {
    const double sign = u_end > u_start ? 1.0 : -1.0;
    rep.window_trace =
        sign * freq_trace(model, [&](double xi) { return (xi > lo && xi <= hi) ? 1.0 : 0.0; },
                          Interval::closed(lo, hi), 1e-12)
                   .value;
  }
  for (int j = 0; j <= steps; ++j) {
    const double t = static_cast<double>(j) / steps;
    rep.max_kernel_trace =
        std::max(rep.max_kernel_trace, kernel_trace(model, path.at(t), path.zero_locus(t)));
  }
  return rep;
}

}  // namespace sfcalc
