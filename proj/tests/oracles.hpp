#pragma once

// Independent brute-force references shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

/// nu_gamma of {x <= 0, y >= g, (y - x)^(1+gamma) < c} by 2-D midpoint
/// quadrature on [-D, 0] x [g, g + D], D = reach - g. Cells entirely inside
/// the region take one midpoint; cells cut by the boundary y - x = reach use
/// `refine` midpoints in x. The density is smooth there since y - x >= g > 0.
inline double corner_midpoint(double g, double c, double gamma, int N, int refine = 64) {
  const double reach = std::pow(c, 1.0 / (1.0 + gamma));
  if (reach <= g) return 0.0;
  const double D = reach - g;
  const double h = D / N;
  const double s = h / refine;
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x0 = -D + i * h;
    double column = 0.0;
    for (int j = 0; j < N; ++j) {
      const double y0 = g + j * h;
      if (y0 - (x0 + h) >= reach) break;
      if ((y0 + h) - x0 <= reach) {
        column += std::pow(y0 - x0, gamma - 1.0) * h * h;
        continue;
      }
      // Sub-lattice midpoints line up with the diagonal boundary and bias the
      // count, so cut cells integrate y exactly at each midpoint x.
      double cell = 0.0;
      for (int a = 0; a < refine; ++a) {
        const double x = x0 + (a + 0.5) * s;
        const double top = std::min(y0 + h, x + reach);
        if (top > y0) cell += (std::pow(top - x, gamma) - std::pow(y0 - x, gamma)) / gamma;
      }
      column += cell * s;
    }
    total += column;
  }
  return total;
}

/// Dense scan of {y : |f(x) - f(y)| > lambda |x - y|^(1+gamma)} on a grid of
/// step h over [lo, hi]; returns the sampled points inside the set.
template <class F>
std::vector<double> scan_exceedance(const F& f, double x, double lambda, double gamma, double lo, double hi, int n) {
  std::vector<double> inside;
  const double fx = f(x);
  for (int i = 0; i <= n; ++i) {
    const double y = lo + (hi - lo) * i / n;
    if (std::abs(fx - f(y)) > lambda * std::pow(std::abs(x - y), 1.0 + gamma)) inside.push_back(y);
  }
  return inside;
}

}  // namespace oracle
