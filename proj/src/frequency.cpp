#include "sfcalc/frequency.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "sfcalc/errors.hpp"

namespace sfcalc {

FrequencyModel::FrequencyModel(std::function<double(double)> density, double cutoff,
                               std::string name)
    : density_(std::move(density)), cutoff_(cutoff), name_(std::move(name)) {
  if (!density_) throw ValidationError("FrequencyModel: missing density");
  if (!(cutoff_ > 0.0) || !std::isfinite(cutoff_))
    throw ValidationError("FrequencyModel: cutoff must be positive and finite");
}

FrequencyModel FrequencyModel::integer_lattice(double cutoff) {
  return FrequencyModel([](double) { return 1.0 / (2.0 * std::numbers::pi); }, cutoff,
                        "integer_lattice");
}

double FrequencyModel::density(double xi) const {
  const double r = density_(xi);
  if (!(r >= 0.0) || !std::isfinite(r))
    throw ValidationError("FrequencyModel: density must be finite and nonnegative");
  return r;
}

QuadratureResult freq_trace(const FrequencyModel& model, const Symbol& symbol,
                            std::vector<double> breakpoints, double abs_tol) {
  const double c = model.cutoff();
  return integrate([&](double xi) { return symbol(xi) * model.density(xi); }, -c, c,
                   QuadratureOptions{abs_tol, 1 << 14}, breakpoints);
}

QuadratureResult freq_trace(const FrequencyModel& model, const Symbol& symbol,
                            const Interval& support_hint, double abs_tol) {
  std::vector<double> bp;
  if (std::isfinite(support_hint.lo)) bp.push_back(support_hint.lo);
  if (std::isfinite(support_hint.hi)) bp.push_back(support_hint.hi);
  return freq_trace(model, symbol, std::move(bp), abs_tol);
}

FrequencyPath shifted_dirac_path(const FrequencyModel& model, double u_start, double u_end,
                                 int steps) {
  FrequencyPath p{model, nullptr, nullptr, steps};
  p.symbol = [=](double t, double xi) { return xi + u_start + t * (u_end - u_start); };
  p.zero_locus = [=](double t) { return std::vector<double>{-(u_start + t * (u_end - u_start))}; };
  return p;
}

double eta_truncated(const FrequencyModel& model, const Symbol& symbol, double s,
                     std::vector<double> breakpoints) {
  if (!(s > 0.0)) throw DomainError("eta_truncated: s must be positive");
  const double rs = std::sqrt(s);
  auto f = [&](double xi) {
    const double d = symbol(xi);
    if (d == 0.0) return 0.0;
    return (d > 0 ? 1.0 : -1.0) * std::erfc(rs * std::abs(d));
  };
  return freq_trace(model, f, std::move(breakpoints), 1e-12).value;
}

double kernel_trace(const FrequencyModel& model, const Symbol& symbol,
                    std::vector<double> breakpoints) {
  return freq_trace(model, [&](double xi) { return symbol(xi) == 0.0 ? 1.0 : 0.0; },
                    std::move(breakpoints))
      .value;
}

}  // namespace sfcalc
