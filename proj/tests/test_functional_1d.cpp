#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "nltv/errors.hpp"
#include "nltv/exact_kernels.hpp"
#include "nltv/functional_1d.hpp"
#include "oracles.hpp"

using namespace nltv;

namespace {

const OpenDomain1D kLine = OpenDomain1D::real_line();

bool inside(const std::vector<Interval>& ivs, double y) {
  for (const auto& iv : ivs) {
    if (iv.lo < y && y < iv.hi) return true;
  }
  return false;
}

double distance_to_boundary(const std::vector<Interval>& ivs, double y) {
  double d = kInf;
  for (const auto& iv : ivs) d = std::min({d, std::abs(y - iv.lo), std::abs(y - iv.hi)});
  return d;
}

// Random piecewise function with jumps and slopes on [0, 1], constant outside.
PiecewiseBV random_pw(std::mt19937_64& rng, int max_nodes = 8) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = 2 + static_cast<int>(u(rng) * (max_nodes - 1));
  std::vector<double> xs;
  for (int i = 0; i < m; ++i) xs.push_back(u(rng));
  std::sort(xs.begin(), xs.end());
  xs.front() = 0.0;
  xs.back() = 1.0;
  std::vector<Node> nodes;
  std::vector<double> slopes{0.0};
  double value = 0.0;
  for (int i = 0; i < m; ++i) {
    const double jump = u(rng) < 0.6 ? 2.0 * u(rng) - 1.0 : 0.0;
    nodes.push_back({xs[i], value, value + jump});
    value += jump;
    if (i + 1 < m) {
      const double slope = u(rng) < 0.7 ? 6.0 * u(rng) - 3.0 : 0.0;
      slopes.push_back(slope);
      value += slope * (xs[i + 1] - xs[i]);
    }
  }
  slopes.push_back(0.0);
  return PiecewiseBV(nodes, slopes);
}

}  // namespace

TEST_CASE("power integral") {
  CHECK(power_integral(0.0, 2.0, 1.0) == doctest::Approx(2.0));
  CHECK(power_integral(1.0, 4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(power_integral(1.0, 1.0 + 1e-12, 3.0) == doctest::Approx(1e-12).epsilon(1e-6));
  CHECK(power_integral(2.0, 2.0, 0.7) == 0.0);
}

TEST_CASE("exceedance slice examples") {
  const auto step = BVFunction1D(PiecewiseBV::step(0.0, 1.0));
  const auto s = exceedance_slice(step, -0.1, 1.0, 1.0, kLine);
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0].lo == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s.intervals[0].hi == doctest::Approx(0.9).epsilon(1e-13));

  CHECK(exceedance_slice(BVFunction1D(PiecewiseBV::constant(3.0)), 0.2, 1.0, 1.0, kLine).intervals.empty());

  const auto id = BVFunction1D(PiecewiseBV({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0.0, 1.0, 0.0}));
  const auto r = exceedance_slice(id, 0.5, 100.0, 1.0, OpenDomain1D::interval(0.0, 1.0));
  REQUIRE(r.intervals.size() == 2);
  CHECK(r.intervals[0].lo == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(r.intervals[0].hi == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.intervals[1].lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.intervals[1].hi == doctest::Approx(0.51).epsilon(1e-12));
}

TEST_CASE("exceedance slices agree with a dense scan") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto pw = random_pw(rng);
    const auto f = BVFunction1D(pw);
    const double lambda = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const double gamma = 0.2 + 2.5 * u(rng);
    const double x = -0.2 + 1.4 * u(rng);
    const auto slice = exceedance_slice(f, x, lambda, gamma, kLine);
    for (std::size_t i = 0; i < slice.intervals.size(); ++i) {
      CHECK(slice.intervals[i].lo < slice.intervals[i].hi);
      CHECK_FALSE((slice.intervals[i].lo < x && x < slice.intervals[i].hi));
      if (i > 0) CHECK(slice.intervals[i - 1].hi <= slice.intervals[i].lo);
    }
    const int n = 20000;
    const double lo = -3.0;
    const double hi = 4.0;
    const auto scanned = oracle::scan_exceedance([&](double y) { return pw(y); }, x, lambda, gamma, lo, hi, n);
    std::size_t matched = 0;
    for (double y : scanned) {
      if (inside(slice.intervals, y) || distance_to_boundary(slice.intervals, y) < 1e-9) ++matched;
    }
    CHECK(matched == scanned.size());
    // Conversely every interior grid point of the slice is in the scanned set.
    std::size_t expected = 0;
    for (int i = 0; i <= n; ++i) {
      const double y = lo + (hi - lo) * i / n;
      if (inside(slice.intervals, y) && distance_to_boundary(slice.intervals, y) > 1e-9) ++expected;
    }
    CHECK(expected <= scanned.size());
  }
}

TEST_CASE("closed-form values") {
  const auto step = BVFunction1D(PiecewiseBV::step(0.0, 1.0));
  CHECK(evaluate_functional_1d(step, kLine, 7.0, 1.0, 1e-8).value == doctest::Approx(1.0).epsilon(1e-8));
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double lambda : {0.01, 1.0, 1e4}) {
      const auto v = evaluate_functional_1d(BVFunction1D(PiecewiseBV::step(0.3, 0.7, -2.0)), kLine, lambda, gamma);
      CHECK(v.value == doctest::Approx(step_functional_exact(0.7, gamma)).epsilon(1e-8));
      CHECK(v.error_estimate >= 0.0);
      CHECK(v.converged);
    }
  }

  // f(x) = x on (0, 1): pairs closer than delta = lambda^(-1/gamma) exceed.
  const auto id = BVFunction1D(PiecewiseBV({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0.0, 1.0, 0.0}));
  const auto unit = OpenDomain1D::interval(0.0, 1.0);
  CHECK(evaluate_functional_1d(id, unit, 100.0, 1.0).value == doctest::Approx(1.99).epsilon(1e-10));
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double lambda : {2.0, 100.0, 1e4}) {
      const double delta = std::pow(lambda, -1.0 / gamma);
      if (delta >= 1.0) continue;
      const double expected = 2.0 / gamma * (1.0 - gamma * delta / (gamma + 1.0));
      CHECK(evaluate_functional_1d(id, unit, lambda, gamma).value == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  CHECK(evaluate_functional_1d(BVFunction1D(PiecewiseBV::constant(2.0)), kLine, 3.0, 0.5).value == 0.0);
}

TEST_CASE("invalid input") {
  const auto step = BVFunction1D(PiecewiseBV::step(0.0, 1.0, 0.0, OpenDomain1D::interval(-1.0, 1.0)));
  CHECK_THROWS_AS(evaluate_functional_1d(step, OpenDomain1D::interval(-1.0, 1.0), 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(evaluate_functional_1d(step, OpenDomain1D::interval(-1.0, 1.0), 1.0, -1.0), ParameterError);
  CHECK_THROWS_AS(evaluate_functional_1d(step, OpenDomain1D::interval(-2.0, 1.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(grid_oracle(step, OpenDomain1D::interval(-1.0, 1.0), 1.0, 1.0, 8), ParameterError);
  CHECK_THROWS_AS(grid_oracle(BVFunction1D(PiecewiseBV::step(0.0, 1.0)), kLine, 1.0, 1.0, 64), ParameterError);
}

TEST_CASE("panel budget exhaustion is flagged") {
  std::mt19937_64 rng(22);
  const auto f = BVFunction1D(random_pw(rng, 30));
  FunctionalOptions tight;
  tight.rel_tol = 1e-14;
  tight.max_panels = 8;
  tight.max_initial_panels = 4;
  const auto v = evaluate_functional_1d(f, kLine, 50.0, 0.7, tight);
  CHECK_FALSE(v.converged);
  CHECK(v.error_estimate > 0.0);
  const auto good = evaluate_functional_1d(f, kLine, 50.0, 0.7, 1e-10);
  CHECK(std::abs(v.value - good.value) <= v.error_estimate * 10.0 + 1e-12);
}

TEST_CASE("grid oracle") {
  CHECK(grid_oracle(BVFunction1D(PiecewiseBV::constant(1.0)), OpenDomain1D::interval(0.0, 1.0), 1.0, 1.0, 64).value == 0.0);
  const auto step = BVFunction1D(PiecewiseBV::step(0.0, 1.0));
  CHECK(grid_oracle(step, OpenDomain1D::interval(-2.0, 2.0), 1.0, 1.0, 4096).value == doctest::Approx(1.0).epsilon(0.01));
  const auto id = BVFunction1D(PiecewiseBV({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0.0, 1.0, 0.0}));
  const double delta = std::pow(2.0, -2.0);
  const double expected = 2.0 / 0.5 * (1.0 - 0.5 * delta / 1.5);
  CHECK(grid_oracle(id, OpenDomain1D::interval(0.0, 1.0), 2.0, 0.5, 4096).value == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("adaptive evaluation agrees with the grid oracle on 50 cases") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto omega = OpenDomain1D::interval(-0.5, 1.5);
  for (int i = 0; i < 50; ++i) {
    const auto f = BVFunction1D(random_pw(rng, 6));
    const double lambda = std::pow(10.0, -0.5 + 1.5 * u(rng));
    const double gamma = 0.5 + 1.5 * u(rng);
    const auto v = evaluate_functional_1d(f, omega, lambda, gamma);
    const auto g = grid_oracle(f, omega, lambda, gamma, 512);
    CHECK(std::abs(v.value - g.value) <= std::max(0.01 * std::abs(v.value), 3.0 * g.error_estimate) + 1e-12);
  }
}

TEST_CASE("scaling laws and invariances") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const auto pw = random_pw(rng);
    const double gamma = 0.2 + 2.5 * u(rng);
    const double lambda = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const double c = 0.1 + 5.0 * u(rng);
    const double s = 0.2 + 3.0 * u(rng);
    const double t = 4.0 * u(rng) - 2.0;
    const double base = evaluate_functional_1d(BVFunction1D(pw), kLine, lambda, gamma, 1e-12).value;

    const auto scaled = linear_combination({{c, &pw}});
    CHECK(evaluate_functional_1d(BVFunction1D(scaled), kLine, lambda, gamma, 1e-12).value ==
          doctest::Approx(c * evaluate_functional_1d(BVFunction1D(pw), kLine, lambda / c, gamma, 1e-12).value)
              .epsilon(1e-10));

    const auto stretched = reparameterize(pw, 0.0, s);
    CHECK(evaluate_functional_1d(BVFunction1D(stretched), kLine, lambda, gamma, 1e-12).value ==
          doctest::Approx(evaluate_functional_1d(BVFunction1D(pw), kLine, lambda * std::pow(s, -1.0 - gamma), gamma, 1e-12)
                              .value)
              .epsilon(1e-10));

    const auto shifted = reparameterize(pw, t, 1.0);
    CHECK(evaluate_functional_1d(BVFunction1D(shifted), kLine, lambda, gamma, 1e-12).value ==
          doctest::Approx(base).epsilon(1e-10));
    const auto lifted = BVFunction1D::combination({{1.0, BVFunction1D(pw)}, {1.0, BVFunction1D(PiecewiseBV::constant(3.5))}});
    CHECK(evaluate_functional_1d(lifted, kLine, lambda, gamma, 1e-12).value == doctest::Approx(base).epsilon(1e-10));
    const auto negated = linear_combination({{-1.0, &pw}});
    CHECK(evaluate_functional_1d(BVFunction1D(negated), kLine, lambda, gamma, 1e-12).value ==
          doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("superadditivity over disjoint opens and monotonicity in the region") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const auto f = BVFunction1D(random_pw(rng));
    const double gamma = 0.2 + 2.5 * u(rng);
    const double lambda = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const double cut = 0.1 + 0.8 * u(rng);
    const double gap = 0.2 * u(rng);
    const auto a = OpenDomain1D::interval(-1.0, cut);
    const auto b = OpenDomain1D::interval(cut + gap, 2.0);
    const OpenDomain1D both({{-1.0, cut}, {cut + gap, 2.0}});
    const double fa = evaluate_functional_1d(f, a, lambda, gamma, 1e-10).value;
    const double fb = evaluate_functional_1d(f, b, lambda, gamma, 1e-10).value;
    const double fab = evaluate_functional_1d(f, both, lambda, gamma, 1e-10).value;
    const double fall = evaluate_functional_1d(f, kLine, lambda, gamma, 1e-10).value;
    CHECK(fab >= (fa + fb) * (1.0 - 1e-9) - 1e-12);
    CHECK(fall >= fab * (1.0 - 1e-9) - 1e-12);
  }
}

TEST_CASE("increasing step functions dominate the jump coefficient") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 150; ++i) {
    const int M = 1 + static_cast<int>(u(rng) * 30);
    std::vector<Node> nodes;
    double x = 0.0;
    double level = u(rng);
    const double b1 = level;
    for (int m = 0; m < M; ++m) {
      x += std::pow(10.0, -3.0 + 3.0 * u(rng));
      const double next = level + std::pow(10.0, -2.0 + 2.0 * u(rng));
      nodes.push_back({x, level, next});
      level = next;
    }
    const auto f = BVFunction1D(PiecewiseBV(nodes, std::vector<double>(nodes.size() + 1, 0.0)));
    const double lambda = std::pow(10.0, -2.0 + 6.0 * u(rng));
    const double gamma = 3.0 * (1.0 - u(rng));
    const auto v = evaluate_functional_1d(f, kLine, lambda, gamma);
    CHECK(v.value >= 2.0 * (level - b1) / (gamma + 1.0) - 1e-9);
  }
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(27);
  const auto f = BVFunction1D(random_pw(rng, 20));
  FunctionalOptions one;
  one.threads = 1;
  FunctionalOptions many = one;
  many.threads = 4;
  const auto a = evaluate_functional_1d(f, kLine, 30.0, 0.8, one);
  const auto b = evaluate_functional_1d(f, kLine, 30.0, 0.8, many);
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("Cantor functions") {
  const auto unit = OpenDomain1D::interval(0.0, 1.0);
  const CantorSpec spec({0.05, 0.03, 0.08}, 24);
  const auto c = BVFunction1D::cantor(spec);

  FunctionalOptions direct;
  direct.self_similar = false;
  direct.rel_tol = 1e-10;
  FunctionalOptions reduced = direct;
  reduced.self_similar = true;
  for (double lambda : {2.0, 30.0, 500.0}) {
    const auto a = evaluate_functional_1d(c, unit, lambda, 1.0, direct);
    const auto b = evaluate_functional_1d(c, unit, lambda, 1.0, reduced);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-10);
    CHECK(a.cantor_depth > 0);
  }

  // A Cantor part placed by an affine map plus a jump inside one of its gaps,
  // through the general path.
  const auto placed = BVFunction1D::reparameterized(c, -0.5, 0.5);  // support [1, 3]
  const auto mixed = BVFunction1D::combination({{2.0, placed}, {1.0, BVFunction1D(PiecewiseBV::step(2.2, 0.5))}});
  const auto region = OpenDomain1D::interval(1.0, 3.0);
  const auto v = evaluate_functional_1d(mixed, region, 40.0, 1.0, 1e-8);
  const auto g = grid_oracle(mixed, region, 40.0, 1.0, 4096);
  CHECK(v.converged);
  CHECK(std::abs(v.value - g.value) <= std::max(0.01 * v.value, 3.0 * g.error_estimate));

  // Slices of a refinement against a dense scan of its pointwise values.
  const auto refined = cantor_refine(spec, 8);
  const auto slice = exceedance_slice(c, 0.3, 20.0, 1.0, unit, 8);
  const auto scanned = oracle::scan_exceedance([&](double y) { return refined(y); }, 0.3, 20.0, 1.0, 0.0, 1.0, 20000);
  for (double y : scanned) CHECK((inside(slice.intervals, y) || distance_to_boundary(slice.intervals, y) < 1e-6));
}
