#pragma once

// Commutative continuum model: operators are real multiplication symbols d(xi)
// on L^2(R) and the trace of f(d) is  integral f(d(xi)) rho(xi) dxi.

#include <functional>
#include <string>
#include <vector>

#include "sfcalc/quadrature.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

class FrequencyModel {
public:
  FrequencyModel(std::function<double(double)> density, double cutoff = 50.0,
                 std::string name = "custom");

  /// rho = 1/(2 pi): the Z-trace of translation-invariant operators on L^2(R).
  static FrequencyModel integer_lattice(double cutoff = 50.0);

  double density(double xi) const;
  double cutoff() const { return cutoff_; }
  const std::string& name() const { return name_; }

private:
  std::function<double(double)> density_;
  double cutoff_;
  std::string name_;
};

using Symbol = std::function<double(double)>;

/// integral over [-cutoff, cutoff] of symbol(xi) rho(xi). `breakpoints` must list
/// every discontinuity of the symbol (indicator edges).
QuadratureResult freq_trace(const FrequencyModel& model, const Symbol& symbol,
                            std::vector<double> breakpoints = {}, double abs_tol = 1e-10);
/// Convenience: the hint is an interval whose endpoints are the discontinuities.
QuadratureResult freq_trace(const FrequencyModel& model, const Symbol& symbol,
                            const Interval& support_hint, double abs_tol = 1e-10);

/// A path t in [0,1] -> d_t of real symbols, with the zero set of each d_t
/// declared so projection edges can be placed on panel boundaries.
struct FrequencyPath {
  FrequencyModel model;
  std::function<double(double t, double xi)> symbol;
  std::function<std::vector<double>(double t)> zero_locus;
  int steps = 16;

  Symbol at(double t) const {
    return [f = symbol, t](double xi) { return f(t, xi); };
  }
};

/// The family xi -> xi + u, u running linearly from u_start to u_end (Fourier
/// picture of i d/dx + u).
FrequencyPath shifted_dirac_path(const FrequencyModel& model, double u_start, double u_end,
                                 int steps = 16);

/// Truncated eta invariant of a symbol: integral sign(d) erfc(sqrt(s)|d|) rho.
double eta_truncated(const FrequencyModel& model, const Symbol& symbol, double s,
                     std::vector<double> breakpoints = {});

/// Trace of the kernel projection 1_{d = 0}: the rho-measure of the zero set,
/// evaluated on the declared locus (zero for isolated zeros).
double kernel_trace(const FrequencyModel& model, const Symbol& symbol,
                    std::vector<double> breakpoints = {});

}  // namespace sfcalc
