#include "sfcalc/engines.hpp"

#include <algorithm>

namespace sfcalc {

SpectralFlowResult sf_phillips(const FrequencyPath& path) {
  if (path.steps < 1) throw ValidationError("sf_phillips: frequency path needs at least one step");
  const auto& model = path.model;
  const double c = model.cutoff();
  double flow = 0.0, qerr = 0.0;

  for (int j = 0; j < path.steps; ++j) {
    const double t0 = static_cast<double>(j) / path.steps;
    const double t1 = (j + 1 == path.steps) ? 1.0 : static_cast<double>(j + 1) / path.steps;
    const auto d0 = path.at(t0), d1 = path.at(t1);
    auto bp = path.zero_locus(t0);
    const auto more = path.zero_locus(t1);
    bp.insert(bp.end(), more.begin(), more.end());

    // Q(1-P) and P(1-Q) for the multiplication projections P = 1[d0 >= 0], Q = 1[d1 >= 0]
    const Symbol gained = [&](double xi) { return (d1(xi) >= 0 && d0(xi) < 0) ? 1.0 : 0.0; };
    const Symbol lost = [&](double xi) { return (d0(xi) >= 0 && d1(xi) < 0) ? 1.0 : 0.0; };
    for (const auto* f : {&gained, &lost})
      if ((*f)(-c) != 0.0 || (*f)(c) != 0.0)
        throw ModelError("sf_phillips: projection difference is not trace class within the cutoff");

    const auto a = freq_trace(model, gained, bp, 1e-12);
    const auto b = freq_trace(model, lost, bp, 1e-12);
    flow += a.value - b.value;
    qerr += a.error_estimate + b.error_estimate;
  }
  return SpectralFlowResult{flow, flow, Method::phillips,
                            {{"steps", path.steps}, {"quadrature_error", qerr}}};
}

}  // namespace sfcalc
