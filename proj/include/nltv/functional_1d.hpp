#pragma once

#include <cstddef>
#include <vector>

#include "nltv/bv_model.hpp"
#include "nltv/domain.hpp"

namespace nltv {

/// Maximal open intervals of {y in omega : |f(x) - f(y)| > lambda |x - y|^(1+gamma)},
/// sorted and disjoint; x itself is never inside one.
struct ExceedanceSlice {
  double x = 0.0;
  std::vector<Interval> intervals;
};

struct FunctionalValue {
  double value = 0.0;
  /// Absolute; covers quadrature error and any Cantor truncation band.
  double error_estimate = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  bool converged = true;
  std::size_t panels = 0;
  /// Cantor refinement level used for the approximant (0 when none).
  int cantor_depth = 0;
};

struct FunctionalOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_panels = std::size_t{1} << 20;
  /// Fixed Cantor refinement level; 0 picks the smallest level whose
  /// truncation band fits the tolerance.
  int cantor_depth = 0;
  /// Exact reduction of a single Cantor leaf to one cell in local coordinates.
  bool self_similar = true;
  std::size_t max_initial_panels = 4096;
  unsigned threads = 0;
};

/// Exceedance slice at x. Cantor parts are refined to `cantor_depth`
/// (0: their configured depth).
ExceedanceSlice exceedance_slice(const BVFunction1D& f, double x, double lambda, double gamma,
                                 const OpenDomain1D& omega, int cantor_depth = 0);

FunctionalValue evaluate_functional_1d(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma,
                                       const FunctionalOptions& options);

inline FunctionalValue evaluate_functional_1d(const BVFunction1D& f, const OpenDomain1D& omega, double lambda,
                                              double gamma, double tol = 1e-8) {
  FunctionalOptions options;
  options.rel_tol = tol;
  return evaluate_functional_1d(f, omega, lambda, gamma, options);
}

/// Brute-force product-cell estimate on an N x N grid over the hull of a
/// bounded omega; cells within two of the diagonal are split 4 x 4. The error
/// estimate is the change from the N/2 grid.
FunctionalValue grid_oracle(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma, int N);

/// Integral of t^(gamma-1) over (a, b), 0 <= a <= b.
double power_integral(double a, double b, double gamma);

}  // namespace nltv
