#include <cmath>
#include <random>

#include <doctest.h>

#include "nltv/errors.hpp"
#include "nltv/exact_kernels.hpp"
#include "nltv/quadrature.hpp"
#include "nltv/slicing_nd.hpp"

using namespace nltv;

namespace {

constexpr double kPi = 3.14159265358979323846;

VectorN vec(std::initializer_list<double> v) {
  VectorN out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

DomainND unit_square() { return DomainND::box(VectorN::Zero(2), VectorN::Ones(2)); }

NDOptions small(std::uint64_t seed = 0) {
  NDOptions o;
  o.directions = 512;
  o.offsets = 32;
  o.seed = seed;
  return o;
}

bool within(const FunctionalValue& a, const FunctionalValue& b, double k = 3.0) {
  return std::abs(a.value - b.value) <= k * std::hypot(a.error_estimate, b.error_estimate);
}

}  // namespace

TEST_CASE("sphere constants") {
  CHECK(sphere_constant(1) == 2.0);
  CHECK(sphere_constant(1, SphereMethod::Quadrature) == 2.0);
  CHECK(sphere_constant(2) == 4.0);
  CHECK(sphere_constant(3) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  // One-dimensional quadratures written out directly.
  const auto c2 = integrate_adaptive([](double t) { return std::abs(std::cos(t)); }, {{0.0, kPi / 2}, {kPi / 2, 2 * kPi}},
                                     AdaptiveOptions{1e-13, 0.0});
  const auto c3 = integrate_adaptive([](double p) { return std::abs(std::cos(p)) * std::sin(p); },
                                     {{0.0, kPi / 2}, {kPi / 2, kPi}}, AdaptiveOptions{1e-13, 0.0});
  CHECK(c2.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(2 * kPi * c3.value == doctest::Approx(2 * kPi).epsilon(1e-12));
  for (int n = 2; n <= 6; ++n) {
    CHECK(std::abs(sphere_constant(n, SphereMethod::Quadrature) - sphere_constant(n)) <= 1e-9);
    // C_n = 2 |B^(n-1)|, the projection of the sphere onto a hyperplane counted twice.
    CHECK(sphere_constant(n) == doctest::Approx(2.0 * ball_volume(n - 1)).epsilon(1e-14));
  }
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
  CHECK(ball_volume(3) == doctest::Approx(4 * kPi / 3));
  CHECK_THROWS_AS(sphere_constant(0), ParameterError);
}

TEST_CASE("domains and traces") {
  const auto box = DomainND::box(vec({0, 0, 0}), vec({1, 2, 3}));
  CHECK(box.volume() == doctest::Approx(6.0));
  CHECK(box.diameter() == doctest::Approx(std::sqrt(14.0)));
  CHECK(box.contains(vec({0.5, 1, 1})));
  CHECK_FALSE(box.contains(vec({1.5, 1, 1})));
  const auto t = box.trace(vec({0.5, 1, 1}), vec({1, 0, 0}));
  REQUIRE(t.intervals().size() == 1);
  CHECK(t.intervals()[0].lo == doctest::Approx(-0.5));
  CHECK(t.intervals()[0].hi == doctest::Approx(0.5));
  CHECK(box.trace(vec({5, 5, 5}), vec({1, 0, 0})).empty());

  const auto ball = DomainND::ball(vec({1, 1}), 2.0);
  CHECK(ball.volume() == doctest::Approx(4 * kPi));
  const auto c = ball.trace(vec({1, 2}), vec({1, 0}));
  CHECK(c.intervals()[0].hi == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(DomainND::box(vec({0, 0}), vec({1, 0})), ParameterError);
  CHECK_THROWS_AS(DomainND::ball(vec({0, 0}), -1.0), ParameterError);

  // Sampled consistency of trace with contains.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 200; ++i) {
    VectorN sigma(3);
    for (int k = 0; k < 3; ++k) sigma[k] = n01(rng);
    sigma.normalize();
    VectorN z(3);
    for (int k = 0; k < 3; ++k) z[k] = n01(rng);
    const auto tr = box.trace(z, sigma);
    for (int s = -40; s <= 40; ++s) {
      const double tt = s * 0.1;
      const VectorN p = z + tt * sigma;
      if (box.contains(p)) CHECK(tr.contains_closure(tt));
      if (tr.contains(tt)) CHECK(box.contains(p));
    }
  }
}

TEST_CASE("orthogonal complement") {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n01;
  for (int n = 2; n <= 5; ++n) {
    VectorN s(n);
    for (int k = 0; k < n; ++k) s[k] = n01(rng);
    s.normalize();
    const auto Q = orthogonal_complement(s);
    CHECK(Q.cols() == n - 1);
    CHECK((Q.transpose() * s).norm() <= 1e-14);
    CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm() <= 1e-14);
  }
}

TEST_CASE("function construction and restriction") {
  CHECK_THROWS_AS(BVFunctionND(HalfSpace{vec({1, 1}), 0, 1}, unit_square()), ParameterError);
  CHECK_THROWS_AS(BVFunctionND(HalfSpace{vec({1, 0, 0}), 0, 1}, unit_square()), ParameterError);
  CHECK_NOTHROW(BVFunctionND(HalfSpace{vec({1, 1e-12}), 0, 1}, unit_square()));

  const auto half = BVFunctionND(HalfSpace{vec({1, 0}), 0.0, 1.0}, DomainND::box(vec({-1, -1}), vec({1, 1})));
  const auto r = restrict(half, vec({1, 0}), vec({0, 0}));
  CHECK(evaluate(r.f, 0.5) == 1.0);
  CHECK(evaluate(r.f, -0.5) == 0.0);
  CHECK(r.trace.hull() == Interval{-1.0, 1.0});

  const auto bump = BVFunctionND(RadialIndicator{1.0, 1.0}, DomainND::box(vec({-3, -3}), vec({3, 3})));
  const auto miss = restrict(bump, vec({1, 0}), vec({0, 2}));
  for (double t : {-2.0, 0.0, 2.0}) CHECK(evaluate(miss.f, t) == 0.0);

  const auto ridge = BVFunctionND(Ridge{vec({1, 0}), BVFunction1D::cantor(CantorSpec({0.05}, 20))},
                                  DomainND::box(vec({0, 0}), vec({1, 1})));
  const VectorN sigma = vec({std::cos(kPi / 3), std::sin(kPi / 3)});
  const VectorN z = vec({0.5, 0.5});
  const auto rr = restrict(ridge, sigma, z);
  for (const auto& iv : rr.trace.intervals()) {
    for (int i = 1; i < 50; ++i) {
      const double t = iv.lo + iv.length() * i / 50;
      CHECK(evaluate(rr.f, t) == doctest::Approx(ridge(z + t * sigma)).epsilon(1e-12));
    }
  }
  // Positions along the line are stretched by 1 / cos 60 = 2.
  CHECK(rr.trace.hull().length() <= 2.0 / std::sqrt(3.0) + 1e-12);
}

TEST_CASE("constant functions give zero") {
  const auto flat = BVFunctionND(Ridge{vec({0, 1}), BVFunction1D(PiecewiseBV::constant(2.0))}, unit_square());
  const auto v = evaluate_functional_nd(flat, 10.0, 1.0, small());
  CHECK(v.value == 0.0);
  CHECK(v.error_estimate == 0.0);
  CHECK(direct_mc_oracle(flat, 10.0, 1.0, 10000, 1).value == 0.0);
}

TEST_CASE("half-plane in the unit square") {
  const auto f = BVFunctionND(HalfSpace{vec({1, 0}), 0.5, 1.0}, unit_square());
  const auto v = evaluate_functional_nd(f, 1e4, 1.0, small());
  CHECK(v.value == doctest::Approx(2.0).epsilon(0.05));
  const auto lo = evaluate_functional_nd(f, 100.0, 1.0, small(1));
  const auto mc = direct_mc_oracle(f, 100.0, 1.0, 400000, 2);
  CHECK(within(lo, mc));
  // The same seed reproduces the estimate bit for bit, regardless of workers.
  auto one = small(5);
  one.threads = 1;
  auto many = small(5);
  many.threads = 3;
  CHECK(evaluate_functional_nd(f, 100.0, 1.0, one).value == evaluate_functional_nd(f, 100.0, 1.0, many).value);
  CHECK(direct_mc_oracle(f, 100.0, 1.0, 200000, 9, 1).value == direct_mc_oracle(f, 100.0, 1.0, 200000, 9, 3).value);
}

TEST_CASE("ridge with a single jump") {
  const auto f = BVFunctionND(Ridge{vec({0, 1}), BVFunction1D(PiecewiseBV::step(0.4, 0.8))},
                              DomainND::box(vec({0, 0}), vec({2, 1})));
  const auto v = evaluate_functional_nd(f, 1e4, 1.0, small());
  // C_2 / (gamma + 1) * h * (jump length 2).
  CHECK(v.value == doctest::Approx(2.0 * 0.8 * 2.0).epsilon(0.05));
}

TEST_CASE("slicing agrees with the direct oracle on a fixed suite") {
  struct Case {
    BVFunctionND f;
    double lambda;
    double gamma;
  };
  const auto sq = unit_square();
  const auto ball = DomainND::ball(vec({0, 0}), 1.0);
  const auto cube = DomainND::box(VectorN::Zero(3), VectorN::Ones(3));
  const VectorN diag = vec({1, 1}) / std::sqrt(2.0);
  const std::vector<Case> cases{
      {BVFunctionND(HalfSpace{vec({1, 0}), 0.5, 1.0}, sq), 10.0, 1.0},
      {BVFunctionND(HalfSpace{diag, 0.7, 2.0}, sq), 30.0, 0.5},
      {BVFunctionND(HalfSpace{vec({0, 1}), 0.2, 1.0}, ball), 50.0, 1.5},
      {BVFunctionND(RadialIndicator{0.5, 1.0}, DomainND::box(vec({-1, -1}), vec({1, 1}))), 20.0, 1.0},
      {BVFunctionND(RadialIndicator{0.3, 1.0}, ball), 5.0, 2.0},
      {BVFunctionND(Ridge{vec({1, 0}), BVFunction1D(PiecewiseBV({{0.2, 0, 0}, {0.8, 1.2, 1.2}}, {0, 2, 0}))}, sq), 10.0, 1.0},
      {BVFunctionND(Ridge{diag, BVFunction1D(PiecewiseBV::step(0.6, 1.0))}, sq), 100.0, 0.7},
      {BVFunctionND(HalfSpace{vec({0, 0, 1}), 0.5, 1.0}, cube), 20.0, 1.0},
      {BVFunctionND(RadialIndicator{0.4, 1.0}, DomainND::box(vec({-1, -1, -1}), vec({1, 1, 1}))), 10.0, 1.0},
      {BVFunctionND(Ridge{vec({1, 0}), BVFunction1D::cantor(CantorSpec({0.05}, 20))}, sq), 10.0, 1.0},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CAPTURE(i);
    const auto& c = cases[i];
    auto opt = small(i);
    if (i + 1 == cases.size()) {
      // Oblique lines through the Cantor ridge take the refinement path.
      opt.directions = 64;
      opt.offsets = 8;
      opt.line_tol = 1e-4;
    }
    const auto s = evaluate_functional_nd(c.f, c.lambda, c.gamma, opt);
    const auto mc = direct_mc_oracle(c.f, c.lambda, c.gamma, 400000, 100 + i);
    CHECK(within(s, mc, 3.5));
  }
}

TEST_CASE("rotation invariance") {
  const double angle = 0.6;
  const auto ball = DomainND::ball(vec({0, 0}), 1.0);
  const auto a = BVFunctionND(HalfSpace{vec({1, 0}), 0.3, 1.0}, ball);
  const auto b = BVFunctionND(HalfSpace{vec({std::cos(angle), std::sin(angle)}), 0.3, 1.0}, ball);
  const auto va = evaluate_functional_nd(a, 30.0, 1.0, small(3));
  const auto vb = evaluate_functional_nd(b, 30.0, 1.0, small(4));
  CHECK(within(va, vb));
}

TEST_CASE("closed-form decompositions") {
  const auto h = decompose_nd(BVFunctionND(HalfSpace{vec({1, 0}), 0.5, 2.0}, unit_square()));
  CHECK(h.jump == doctest::Approx(2.0));
  const VectorN diag = vec({1, 1}) / std::sqrt(2.0);
  CHECK(decompose_nd(BVFunctionND(HalfSpace{diag, std::sqrt(0.5), 1.0}, unit_square())).jump ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(decompose_nd(BVFunctionND(HalfSpace{vec({0, 1}), 0.0, 1.0}, DomainND::ball(vec({0, 0}), 1.0))).jump ==
        doctest::Approx(2.0));
  CHECK(decompose_nd(BVFunctionND(RadialIndicator{0.5, 1.0}, DomainND::box(vec({-1, -1}), vec({1, 1})))).jump ==
        doctest::Approx(kPi));
  const auto r = decompose_nd(BVFunctionND(Ridge{vec({1, 0}), BVFunction1D(PiecewiseBV({{0.2, 0, 0}, {0.8, 1.2, 1.7}}, {0, 2, 0}))},
                                           DomainND::box(vec({0, 0}), vec({1, 3}))));
  CHECK(r.abs_cont == doctest::Approx(3.6));
  CHECK(r.jump == doctest::Approx(1.5));
  CHECK_THROWS_AS(decompose_nd(BVFunctionND(RadialIndicator{0.9, 1.0}, unit_square())), DomainError);
}
