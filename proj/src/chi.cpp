#include "sfcalc/chi.hpp"

#include <cmath>
#include <numbers>

#include "sfcalc/errors.hpp"

namespace sfcalc {

namespace {

double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double dsmoothstep(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

// Assemble an odd profile from its restriction to [0, inf).
ChiProfile make_odd(std::string id, double flat_end, double radius,
                    std::function<double(double)> core, std::function<double(double)> dcore) {
  const double tail = radius - flat_end;
  auto chi = [=](double x) {
    const double a = std::abs(x), sgn = x < 0 ? -1.0 : 1.0;
    if (a <= 1.0) return sgn * core(a);
    if (a <= flat_end) return sgn;
    if (a >= radius) return 0.0;
    return sgn * (1.0 - smoothstep((a - flat_end) / tail));
  };
  auto dchi = [=](double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return dcore(a);
    if (a <= flat_end || a >= radius) return 0.0;
    return -dsmoothstep((a - flat_end) / tail) / tail;
  };
  return ChiProfile{std::move(id), radius, chi, dchi};
}

}  // namespace

ChiProfile ChiProfile::sine_smoothstep() {
  using std::numbers::pi;
  return make_odd(
      "sine_smoothstep", 1.5, 3.0,
      [](double x) { return std::sin(0.5 * pi * 0.5 * (3.0 * x - x * x * x)); },
      [](double x) {
        const double q = 0.5 * (3.0 * x - x * x * x);
        return std::cos(0.5 * pi * q) * 0.5 * pi * 1.5 * (1.0 - x * x);
      });
}

ChiProfile ChiProfile::quintic() {
  return make_odd(
      "quintic", 1.25, 2.0,
      [](double x) { return (15.0 * x - 10.0 * x * x * x + 3.0 * std::pow(x, 5)) / 8.0; },
      [](double x) { return 15.0 * (1.0 - x * x) * (1.0 - x * x) / 8.0; });
}

ChiProfile ChiProfile::by_id(const std::string& id) {
  if (id == "sine_smoothstep" || id == "default") return sine_smoothstep();
  if (id == "quintic") return quintic();
  throw ValidationError("unknown chi profile '" + id + "'");
}

std::vector<std::string> ChiProfile::ids() { return {"sine_smoothstep", "quintic"}; }

void ChiProfile::validate() const {
  if (!chi || !dchi) throw ValidationError("ChiProfile: missing evaluator");
  if (!(radius > 0.0)) throw ValidationError("ChiProfile: radius must be positive");
  if (std::abs(chi(1.0) - 1.0) > 1e-12) throw ValidationError("ChiProfile: chi(1) != 1");
  if (!(dchi(0.0) > 0.0)) throw ValidationError("ChiProfile: chi'(0) must be positive");
  const int n = 2000;
  const double span = radius * 1.25;
  double prev = chi(-1.0);
  for (int i = 0; i <= n; ++i) {
    const double x = -span + 2.0 * span * i / n;
    if (std::abs(chi(-x) + chi(x)) > 1e-12) throw ValidationError("ChiProfile: chi is not odd");
    if (std::abs(x) > radius && chi(x) != 0.0)
      throw ValidationError("ChiProfile: chi not supported in [-radius, radius]");
    const double h = 1e-5;
    const double fd = (chi(x + h) - chi(x - h)) / (2.0 * h);
    if (std::abs(fd - dchi(x)) > 1e-6)
      throw ValidationError("ChiProfile: chi' disagrees with finite differences of chi");
    // one-sided second differences must match where chi'' is continuous
    const double right = (dchi(x + h) - dchi(x)) / h, left = (dchi(x) - dchi(x - h)) / h;
    if (std::abs(right - left) > 1e-2)
      throw ValidationError("ChiProfile: chi is not twice continuously differentiable");
  }
  for (int i = 1; i <= n; ++i) {
    const double x = -1.0 + 2.0 * i / n;
    if (chi(x) < prev - 1e-15) throw ValidationError("ChiProfile: chi decreases on [-1, 1]");
    prev = chi(x);
  }
}

}  // namespace sfcalc
