#pragma once

namespace nltv {

/// Weight |x - y|^(gamma - n) on pairs of points in R^n.
class GammaKernel {
 public:
  GammaKernel(double gamma, int dimension = 1);

  double gamma() const { return gamma_; }
  int dimension() const { return dimension_; }
  /// Exponent 1 + gamma of the exceedance threshold lambda * |x - y|^(1 + gamma).
  double threshold_exponent() const { return 1.0 + gamma_; }
  /// Density at distance r > 0.
  double density(double r) const;

 private:
  double gamma_;
  int dimension_;
};

/// F for a single jump h * 1_{[a, inf)} on R: 2h / (gamma + 1), for every
/// lambda and every a.
double step_functional_exact(double h, double gamma);

/// nu_gamma of {x <= 0, y >= g : (y - x)^(1 + gamma) < c}, the corner region
/// between two clusters of jumps separated by g. Zero when c^(1/(1+gamma)) <= g.
/// c = 0 is accepted and gives 0.
double nu_corner_threshold(double g, double c, double gamma);

/// A1 - A2 for the k-th increment of an M-step staircase whose first and
/// (k+1)-th jumps are g apart. Non-negative for all valid inputs.
double interaction_difference(int k, int M, double lambda, double gamma, double g);

/// lambda * nu_gamma of the square [L1 - r, L2 + r]^2, r = lambda^(-1/(1+gamma)).
/// Dominates F(f, R) for every increasing f rising by at most 1 inside [L1, L2].
double finiteness_upper_bound(double L1, double L2, double lambda, double gamma);

/// nu_gamma of [a, b]^2 in one dimension: 2 (b - a)^(gamma + 1) / (gamma (gamma + 1)).
double square_measure(double side, double gamma);

}  // namespace nltv
