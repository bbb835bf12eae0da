#include "nltv/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "nltv/exact_kernels.hpp"
#include "nltv/functional_1d.hpp"
#include "nltv/quadrature.hpp"
#include "nltv/slicing_nd.hpp"

namespace nltv {

namespace {

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

CheckResult step_exactness() {
  double worst = 0.0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double lambda : {0.01, 1.0, 1e4}) {
      const auto f = BVFunction1D(PiecewiseBV::step(0.0, 1.5));
      const auto v = evaluate_functional_1d(f, OpenDomain1D::real_line(), lambda, gamma);
      worst = std::max(worst, rel(v.value, step_functional_exact(1.5, gamma)));
    }
  }
  return {"step function equals 2h/(gamma+1)", worst <= 1e-6, fmt("max rel err %.3g%.0s", worst, 0)};
}

CheckResult identity_closed_form() {
  const auto f = BVFunction1D(PiecewiseBV({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0.0, 1.0, 0.0}));
  double worst = 0.0;
  for (double lambda : {1e2, 1e4}) {
    const auto v = evaluate_functional_1d(f, OpenDomain1D::interval(0.0, 1.0), lambda, 1.0);
    worst = std::max(worst, rel(v.value, 2.0 * (1.0 - 0.5 / lambda)));
  }
  return {"f(x) = x, gamma = 1 closed form", worst <= 1e-8, fmt("max rel err %.3g%.0s", worst, 0)};
}

CheckResult corner_radial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double gamma = 0.25 + 2.75 * u(rng);
    const double c = 0.5 + 2.0 * u(rng);
    const double reach = std::pow(c, 1.0 / (1.0 + gamma));
    const double g = reach * (0.05 + 0.9 * u(rng));
    // Pairs at separation d contribute (d - g) d^(gamma - 1).
    const auto q = integrate_adaptive([&](double d) { return (d - g) * std::pow(d, gamma - 1.0); },
                                      {{g, reach}}, AdaptiveOptions{1e-13, 0.0});
    worst = std::max(worst, rel(nu_corner_threshold(g, c, gamma), q.value));
  }
  return {"corner measure against separation integral", worst <= 1e-9, fmt("max rel err %.3g%.0s", worst, 0)};
}

CheckResult interaction_sign(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = kInf;
  for (int i = 0; i < 2000; ++i) {
    const int M = 2 + static_cast<int>(u(rng) * 29);
    const int k = 1 + static_cast<int>(u(rng) * (M - 1));
    const double lambda = std::pow(10.0, -2.0 + 6.0 * u(rng));
    const double gamma = 0.05 + 2.95 * u(rng);
    const double g = std::pow(10.0, -3.0 + 4.0 * u(rng));
    worst = std::min(worst, interaction_difference(k, M, lambda, gamma, g));
  }
  return {"interaction differences non-negative", worst >= -1e-12, fmt("min %.3g%.0s", worst, 0)};
}

CheckResult monotone_lower_bound(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = kInf;
  for (int i = 0; i < 40; ++i) {
    const int M = 1 + static_cast<int>(u(rng) * 10);
    std::vector<Node> nodes;
    double x = 0.0;
    double level = 0.0;
    for (int m = 0; m < M; ++m) {
      x += 0.01 + u(rng);
      const double next = level + 0.05 + u(rng);
      nodes.push_back({x, level, next});
      level = next;
    }
    const auto f = BVFunction1D(PiecewiseBV(nodes, std::vector<double>(nodes.size() + 1, 0.0)));
    const double lambda = std::pow(10.0, -2.0 + 6.0 * u(rng));
    const double gamma = 0.05 + 2.95 * u(rng);
    const auto v = evaluate_functional_1d(f, OpenDomain1D::real_line(), lambda, gamma);
    worst = std::min(worst, v.value - 2.0 * level / (gamma + 1.0));
  }
  return {"increasing steps dominate 2(b2-b1)/(gamma+1)", worst >= -1e-9, fmt("min margin %.3g%.0s", worst, 0)};
}

CheckResult sphere_constants() {
  double worst = 0.0;
  for (int n = 1; n <= 5; ++n) {
    worst = std::max(worst, std::abs(sphere_constant(n, SphereMethod::Quadrature) - sphere_constant(n)));
  }
  const bool exact1 = sphere_constant(1, SphereMethod::Quadrature) == 2.0;
  return {"sphere constants by quadrature", worst <= 1e-9 && exact1, fmt("max abs err %.3g%.0s", worst, 0)};
}

CheckResult scaling_laws(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double gamma = 0.25 + 2.0 * u(rng);
    const double lambda = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const auto pw = PiecewiseBV({{0.0, 0.0, 0.0}, {0.4, 0.3, 1.0}, {1.0, 1.5, 1.5}}, {0.0, 0.75, 0.8333333333333334, 0.0});
    const double c = 0.2 + 3.0 * u(rng);
    const double s = 0.3 + 2.0 * u(rng);
    const auto line = OpenDomain1D::real_line();
    const auto scaled = linear_combination({{c, &pw}});
    const double lhs = evaluate_functional_1d(BVFunction1D(scaled), line, lambda, gamma, 1e-12).value;
    const double rhs = c * evaluate_functional_1d(BVFunction1D(pw), line, lambda / c, gamma, 1e-12).value;
    worst = std::max(worst, rel(lhs, rhs));
    const auto stretched = reparameterize(pw, 0.0, s);
    const double a = evaluate_functional_1d(BVFunction1D(stretched), line, lambda, gamma, 1e-12).value;
    const double b = evaluate_functional_1d(BVFunction1D(pw), line, lambda * std::pow(s, -1.0 - gamma), gamma, 1e-12).value;
    worst = std::max(worst, rel(a, b));
  }
  return {"value and spatial scaling laws", worst <= 1e-9, fmt("max rel err %.3g%.0s", worst, 0)};
}

CheckResult grid_agreement() {
  const auto f = BVFunction1D(PiecewiseBV({{0.0, 0.0, 0.0}, {0.5, 0.5, 1.5}, {1.0, 2.0, 2.0}}, {0.0, 1.0, 1.0, 0.0}));
  const auto omega = OpenDomain1D::interval(-0.5, 1.5);
  const auto exact = evaluate_functional_1d(f, omega, 2.0, 0.5);
  const auto grid = grid_oracle(f, omega, 2.0, 0.5, 1024);
  const double diff = std::abs(exact.value - grid.value);
  return {"adaptive evaluation against grid oracle", diff <= 3.0 * grid.error_estimate + 1e-3,
          fmt("diff %.3g, grid err %.3g", diff, grid.error_estimate)};
}

CheckResult cantor_reduction() {
  const auto f = BVFunction1D::cantor(CantorSpec({0.05, 0.08, 0.03, 0.09}, 12));
  const auto omega = OpenDomain1D::interval(0.0, 1.0);
  FunctionalOptions direct;
  direct.self_similar = false;
  direct.rel_tol = 1e-10;
  FunctionalOptions reduced = direct;
  reduced.self_similar = true;
  const auto a = evaluate_functional_1d(f, omega, 40.0, 1.0, direct);
  const auto b = evaluate_functional_1d(f, omega, 40.0, 1.0, reduced);
  const double diff = std::abs(a.value - b.value);
  return {"Cantor self-similar reduction against direct refinement", diff <= a.error_estimate + b.error_estimate + 1e-9,
          fmt("diff %.3g, budget %.3g", diff, a.error_estimate + b.error_estimate)};
}

CheckResult slicing_half_plane() {
  const auto f = BVFunctionND(HalfSpace{VectorN::Unit(2, 0), 0.5, 1.0},
                              DomainND::box(VectorN::Zero(2), VectorN::Ones(2)));
  NDOptions opt;
  opt.directions = 256;
  opt.offsets = 16;
  const auto v = evaluate_functional_nd(f, 1e4, 1.0, opt);
  return {"half-plane slicing estimate near C_2/(gamma+1)", rel(v.value, 2.0) <= 0.1,
          fmt("value %.6g +- %.3g", v.value, v.error_estimate)};
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  out.push_back(guarded("step function equals 2h/(gamma+1)", step_exactness));
  out.push_back(guarded("f(x) = x, gamma = 1 closed form", identity_closed_form));
  out.push_back(guarded("corner measure against separation integral", [&] { return corner_radial(rng); }));
  out.push_back(guarded("interaction differences non-negative", [&] { return interaction_sign(rng); }));
  out.push_back(guarded("increasing steps dominate 2(b2-b1)/(gamma+1)", [&] { return monotone_lower_bound(rng); }));
  out.push_back(guarded("sphere constants by quadrature", sphere_constants));
  out.push_back(guarded("value and spatial scaling laws", [&] { return scaling_laws(rng); }));
  out.push_back(guarded("adaptive evaluation against grid oracle", grid_agreement));
  out.push_back(guarded("Cantor self-similar reduction against direct refinement", cantor_reduction));
  out.push_back(guarded("half-plane slicing estimate near C_2/(gamma+1)", slicing_half_plane));
  return out;
}

}  // namespace nltv
