#pragma once

// Odd signature operator on the circle under a path of conformal metrics
// h(u,x)^2 dx^2, discretized by Fourier collocation on N = n+1 equispaced
// points, and the frequency-model Dirac family.
//
// Forms are stored as nodal values: a 0-form f and a 1-form g dx, stacked as
// (f, g). The metric inner products are
//   <f, f'>_u = 2pi/N sum conj(f) f' h,   <g, g'>_u = 2pi/N sum conj(g) g' / h.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sfcalc/apsindex.hpp"
#include "sfcalc/chi.hpp"
#include "sfcalc/engines.hpp"
#include "sfcalc/frequency.hpp"
#include "sfcalc/path.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

/// Real trigonometric polynomial a_0 + sum_k a_k cos(kx) + b_k sin(kx);
/// cos_coeffs[0] is the constant term, sin_coeffs[0] is ignored.
struct FourierSeries {
  std::vector<double> cos_coeffs{1.0};
  std::vector<double> sin_coeffs;

  double operator()(double x) const;
  int degree() const;
};

/// u -> h(u, .), with the shape evaluated at a C^2 flattening sigma(u) that is
/// 0 on [0, flat] and 1 on [1 - flat, 1].
class CircleMetricPath {
public:
  using Shape = std::function<FourierSeries(double sigma)>;

  CircleMetricPath(int n, Shape shape, int samples = 41, double flat = 0.1);

  static CircleMetricPath constant(int n, FourierSeries h, int samples = 41);
  /// Named families: "breathing" 1 + 0.3 s(1-s) sin x, "tilt" 1 + 0.3 s sin x,
  /// "mixed" (1 + 0.5 s) + 0.4 s cos x + 0.2 s^2 sin 2x, "flat" 1.
  static CircleMetricPath named(const std::string& name, int n, int samples = 41);
  static std::vector<std::string> names();

  int n() const { return n_; }
  int points() const { return n_ + 1; }
  int samples() const { return samples_; }
  double sigma(double u) const;
  FourierSeries series(double u) const;
  /// h(u, x_j) at the collocation points.
  RealVec h(double u) const;
  /// Smallest h over a dense (u, x) grid.
  double h_min() const;

private:
  int n_;
  Shape shape_;
  int samples_;
  double flat_;
};

struct SignatureOperator {
  Mat<cd> D;     // tau d + d tau on (f, g)
  Mat<cd> tau;   // chirality involution
  Mat<cd> d;     // exterior derivative
  RealVec gram;  // diagonal of the metric Gram matrix
  RealVec h;

  /// G^{1/2} D G^{-1/2}, split into the 0-form and 1-form blocks.
  BlockHermitian<cd> hermitian() const;
};

/// Model of the discretized forms: two blocks of dimension N, weight 1.
WeightedBlockModel signature_model(int points);

/// Real spectral differentiation matrix on N equispaced points (N odd).
Mat<double> spectral_derivative(int points);

SignatureOperator build_signature(const CircleMetricPath& metric, double u);

/// U_u with U_u^* G_0 U_u = G_u: (h_u/h_0)^{1/2} on 0-forms, (h_0/h_u)^{1/2} on 1-forms.
RealVec trivialization(const CircleMetricPath& metric, double u);

/// u -> G_0^{1/2} U_u D_u U_u^{-1} G_0^{-1/2}, sampled at the metric's u-nodes.
OperatorPath<cd> hermitian_signature_path(const CircleMetricPath& metric);

struct SignatureFlowOptions {
  std::vector<std::string> engines{"crossing", "phillips", "integral", "appendix"};
  std::vector<double> integral_s{0.5, 2.0, 8.0};
  std::vector<std::string> chi_ids{"default"};
  std::vector<double> s_grid{2.0, 4.0, 16.0, 64.0, 256.0};
  int aps_grid = 64;
  int cg_points = 5;  // u values for the pointwise bound
};

struct SignatureFlowReport {
  std::map<std::string, double> engines;  // key e.g. "integral@s=2"
  double aps_index = 0.0;
  double kernel_trace_min = 0.0, kernel_trace_max = 0.0;
  double symmetry_defect = 0.0;           // max over u of spectrum vs its negation
  double conjugation_residual = 0.0;      // max over (u, s)
  bool cg_holds = true;                   // lhs <= I + II at every (u, s)
  std::vector<double> s_grid;
  std::vector<double> decay;              // int_0^1 sqrt(s) tr(|B| e^{-sB^2}) du per s
  std::vector<double> flow_integrand;     // int_0^1 sqrt(s) |tr(B' e^{-sB^2})| du per s
};

SignatureFlowReport signature_flow_scenario(const CircleMetricPath& metric,
                                            const SignatureFlowOptions& opts = {});

/// tr(X' e^{-s X^2}) for X = D_u (Gram self-adjoint) and X = B_u, derivatives
/// by central differences.
std::pair<double, double> conjugation_pair(const CircleMetricPath& metric, double u, double s);

struct DiracFamilyReport {
  double flow = 0.0;
  double window_trace = 0.0;    // rho-measure of the swept window
  double max_kernel_trace = 0.0;
  double quadrature_error = 0.0;
};

DiracFamilyReport dirac_family_scenario(double u_start, double u_end, const FrequencyModel& model,
                                        int steps = 16);

}  // namespace sfcalc
