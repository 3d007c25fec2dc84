#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sfcalc {

/// Odd C^2 cutoff with chi(1) = 1, chi'(0) > 0, nondecreasing on [-1, 1] and
/// supported in [-radius, radius].
struct ChiProfile {
  std::string id;
  double radius = 0.0;
  std::function<double(double)> chi;
  std::function<double(double)> dchi;

  double operator()(double x) const { return chi(x); }

  /// Sampled check of the admissibility conditions; throws ValidationError.
  void validate() const;

  /// sin(pi/2 * (3x - x^3)/2) on [-1, 1], flat to +-1 up to |x| = 1.5, then a
  /// quintic smoothstep tail down to 0 at |x| = 3.
  static ChiProfile sine_smoothstep();
  /// (15x - 10x^3 + 3x^5)/8 on [-1, 1], flat up to |x| = 1.25, tail to 0 at 2.
  static ChiProfile quintic();

  static ChiProfile by_id(const std::string& id);
  static std::vector<std::string> ids();
};

}  // namespace sfcalc
