#include "nltv/exact_kernels.hpp"

#include <cmath>
#include <string>

#include "nltv/errors.hpp"

namespace nltv {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("gamma must be a positive finite number, got " + std::to_string(gamma));
  }
}

// (1 + r)^a - 1 without cancellation for small r.
double pow1p_minus_one(double r, double a) { return std::expm1(a * std::log1p(r)); }

}  // namespace

GammaKernel::GammaKernel(double gamma, int dimension) : gamma_(gamma), dimension_(dimension) {
  require_gamma(gamma);
  if (dimension < 1) throw ParameterError("kernel dimension must be positive");
}

double GammaKernel::density(double r) const { return std::pow(r, gamma_ - dimension_); }

double step_functional_exact(double h, double gamma) {
  require_gamma(gamma);
  if (!(h > 0.0)) throw ParameterError("jump height must be positive");
  return 2.0 * h / (gamma + 1.0);
}

double nu_corner_threshold(double g, double c, double gamma) {
  require_gamma(gamma);
  if (!(g >= 0.0) || !(c >= 0.0)) throw ParameterError("nu_corner_threshold needs g >= 0 and c >= 0");
  if (c == 0.0) return 0.0;
  const double p = 1.0 + gamma;
  const double rho = std::pow(c, 1.0 / p);
  const double d = rho - g;
  if (d <= 1e-14 * std::max(1.0, g)) return 0.0;
  if (g == 0.0) return c / p;
  // Integral of (t - g) t^(gamma - 1) over t in [g, rho], written as
  // g^(gamma+1) * [((1+r)^(gamma+1) - 1)/(gamma+1) - ((1+r)^gamma - 1)/gamma],
  // r = d / g; algebraically equal to
  // c/(gamma+1) - (g/gamma) c^(gamma/(1+gamma)) + g^(gamma+1)/(gamma (gamma+1)).
  const double r = d / g;
  const double phi = pow1p_minus_one(r, p) / p - pow1p_minus_one(r, gamma) / gamma;
  return std::max(0.0, std::pow(g, p) * phi);
}

double interaction_difference(int k, int M, double lambda, double gamma, double g) {
  require_gamma(gamma);
  if (k < 1 || k >= M) {
    throw ParameterError("interaction_difference needs 1 <= k <= M - 1 (k = " + std::to_string(k) +
                         ", M = " + std::to_string(M) + ")");
  }
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (!(g >= 0.0)) throw ParameterError("gap must be non-negative");
  const double unit = 1.0 / (static_cast<double>(M) * lambda);
  const double upper = nu_corner_threshold(g, (k + 1) * unit, gamma);
  const double middle = nu_corner_threshold(g, k * unit, gamma);
  const double lower = nu_corner_threshold(g, (k - 1) * unit, gamma);
  return 2.0 * lambda * (upper - 2.0 * middle + lower);
}

double square_measure(double side, double gamma) {
  require_gamma(gamma);
  if (!(side >= 0.0)) throw ParameterError("square side must be non-negative");
  return 2.0 * std::pow(side, gamma + 1.0) / (gamma * (gamma + 1.0));
}

double finiteness_upper_bound(double L1, double L2, double lambda, double gamma) {
  require_gamma(gamma);
  if (!(L1 <= L2)) throw ParameterError("finiteness_upper_bound needs L1 <= L2");
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const double r = std::pow(lambda, -1.0 / (1.0 + gamma));
  return lambda * square_measure(L2 - L1 + 2.0 * r, gamma);
}

}  // namespace nltv
