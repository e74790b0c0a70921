#pragma once

// Composite Gauss-Legendre rules built from boost's fixed 20-point rule.

#include <boost/math/quadrature/gauss.hpp>
#include <vector>

namespace wp::detail {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

inline Rule composite_gl(double a, double b, int panels) {
  using G = boost::math::quadrature::gauss<double, 20>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < ab.size(); ++i) {
      r.x.push_back(mid - half * ab[i]);
      r.w.push_back(half * wt[i]);
      if (ab[i] != 0.0) {
        r.x.push_back(mid + half * ab[i]);
        r.w.push_back(half * wt[i]);
      }
    }
  }
  return r;
}

}  // namespace wp::detail
