#include "nltv/slicing_nd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "nltv/errors.hpp"
#include "nltv/parallel.hpp"
#include "nltv/quadrature.hpp"
#include "nltv/random.hpp"

namespace nltv {

namespace {

constexpr double kPi = std::numbers::pi;

VectorN normalized(const VectorN& e, const char* what) {
  const double norm = e.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    throw ParameterError(std::string(what) + " must be a unit vector (norm " + std::to_string(norm) + ")");
  }
  return e / norm;
}

void require_dimension(const VectorN& v, int n, const char* what) {
  if (v.size() != n) {
    throw ParameterError(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                         std::to_string(n));
  }
}

// Range of x . e over the closure of the domain.
Interval projection(const DomainND& d, const VectorN& e) {
  if (d.kind() == DomainND::Kind::Ball) {
    const double c = d.center().dot(e);
    return {c - d.radius(), c + d.radius()};
  }
  double lo = 0.0;
  double hi = 0.0;
  for (int i = 0; i < d.dimension(); ++i) {
    const double a = d.lo()[i] * e[i];
    const double b = d.hi()[i] * e[i];
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  return {lo, hi};
}

VectorN gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  VectorN v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
  } while (v.norm() == 0.0);
  return v;
}

VectorN uniform_direction(int n, std::mt19937_64& rng) {
  VectorN v = gaussian_vector(n, rng);
  return v / v.norm();
}

// Uniform point of the k-dimensional ball of radius r.
VectorN uniform_in_ball(int k, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (k == 1) return VectorN::Constant(1, r * (2.0 * unif(rng) - 1.0));
  return uniform_direction(k, rng) * (r * std::pow(unif(rng), 1.0 / k));
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double out = 0.0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

// Haar-distributed orthogonal matrix.
Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

// Low-discrepancy directions: Halton points pushed through the normal quantile
// and rotated at random.
std::vector<VectorN> sphere_directions(int n, int count, std::uint64_t seed) {
  static constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::mt19937_64 rng(stream_seed(seed, ~std::uint64_t{0}));
  std::vector<VectorN> dirs;
  dirs.reserve(count);
  if (n == 2) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (int i = 0; i < count; ++i) {
      const double theta = 2.0 * kPi * (i + u) / count;
      VectorN v(2);
      v << std::cos(theta), std::sin(theta);
      dirs.push_back(v);
    }
    return dirs;
  }
  if (n > static_cast<int>(std::size(kPrimes))) throw ParameterError("dimension too large for the direction sequence");
  const Eigen::MatrixXd rot = random_rotation(n, rng);
  for (int i = 0; i < count; ++i) {
    VectorN v(n);
    for (int k = 0; k < n; ++k) {
      const double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[k]);
      v[k] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
    }
    if (v.norm() == 0.0) v[0] = 1.0;
    dirs.push_back(rot * (v / v.norm()));
  }
  return dirs;
}

}  // namespace

// ---------------------------------------------------------------------------
// DomainND

DomainND DomainND::box(VectorN lo, VectorN hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) throw ParameterError("box corners must share a positive dimension");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
      throw ParameterError("box needs finite lo < hi in every coordinate");
    }
  }
  VectorN center = 0.5 * (lo + hi);
  return DomainND(Kind::Box, std::move(lo), std::move(hi), std::move(center), 0.0);
}

DomainND DomainND::ball(VectorN center, double radius) {
  if (center.size() < 1) throw ParameterError("ball centre needs a positive dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("ball radius must be positive");
  VectorN a = center;
  VectorN b = center;
  return DomainND(Kind::Ball, std::move(a), std::move(b), std::move(center), radius);
}

bool DomainND::contains(const VectorN& x) const {
  if (kind_ == Kind::Ball) return (x - center_).squaredNorm() < radius_ * radius_;
  for (int i = 0; i < dimension(); ++i) {
    if (!(a_[i] < x[i] && x[i] < b_[i])) return false;
  }
  return true;
}

double DomainND::volume() const {
  if (kind_ == Kind::Ball) return ball_volume(dimension()) * std::pow(radius_, dimension());
  return (b_ - a_).prod();
}

double DomainND::diameter() const { return kind_ == Kind::Ball ? 2.0 * radius_ : (b_ - a_).norm(); }

double DomainND::circumradius() const { return kind_ == Kind::Ball ? radius_ : 0.5 * (b_ - a_).norm(); }

OpenDomain1D DomainND::trace(const VectorN& z, const VectorN& sigma) const {
  if (kind_ == Kind::Ball) {
    const VectorN w = z - center_;
    const double s2 = sigma.squaredNorm();
    const double t0 = -w.dot(sigma) / s2;
    const double d2 = (w + t0 * sigma).squaredNorm();
    const double half2 = (radius_ * radius_ - d2) / s2;
    if (!(half2 > 0.0)) return {};
    const double half = std::sqrt(half2);
    return OpenDomain1D::interval(t0 - half, t0 + half);
  }
  double lo = -kInf;
  double hi = kInf;
  for (int i = 0; i < dimension(); ++i) {
    if (sigma[i] == 0.0) {
      if (!(a_[i] < z[i] && z[i] < b_[i])) return {};
      continue;
    }
    double u = (a_[i] - z[i]) / sigma[i];
    double v = (b_[i] - z[i]) / sigma[i];
    if (u > v) std::swap(u, v);
    lo = std::max(lo, u);
    hi = std::min(hi, v);
  }
  if (!(lo < hi)) return {};
  return OpenDomain1D::interval(lo, hi);
}

// ---------------------------------------------------------------------------
// BVFunctionND

BVFunctionND::BVFunctionND(Shape shape, DomainND domain) : shape_(std::move(shape)), domain_(std::move(domain)) {
  const int n = domain_.dimension();
  if (n < 2) throw ParameterError("BVFunctionND needs dimension n >= 2");
  if (auto* r = std::get_if<Ridge>(&shape_)) {
    require_dimension(r->e, n, "ridge direction");
    r->e = normalized(r->e, "ridge direction");
    const Interval proj = projection(domain_, r->e);
    if (!OpenDomain1D::interval(proj.lo, proj.hi).is_subset_of(r->profile.domain())) {
      throw DomainError("ridge profile domain does not cover the projection of the region");
    }
  } else if (auto* hs = std::get_if<HalfSpace>(&shape_)) {
    require_dimension(hs->e, n, "half-space normal");
    hs->e = normalized(hs->e, "half-space normal");
    if (!std::isfinite(hs->c) || !std::isfinite(hs->h)) throw ParameterError("half-space offset and height must be finite");
  } else {
    const auto& rad = std::get<RadialIndicator>(shape_);
    if (!(rad.R > 0.0) || !std::isfinite(rad.R)) throw ParameterError("radial indicator needs R > 0");
    if (!std::isfinite(rad.h)) throw ParameterError("radial indicator height must be finite");
  }
}

double BVFunctionND::operator()(const VectorN& x) const {
  if (const auto* r = std::get_if<Ridge>(&shape_)) return evaluate(r->profile, x.dot(r->e));
  if (const auto* hs = std::get_if<HalfSpace>(&shape_)) return x.dot(hs->e) > hs->c ? hs->h : 0.0;
  const auto& rad = std::get<RadialIndicator>(shape_);
  return x.squaredNorm() < rad.R * rad.R ? rad.h : 0.0;
}

double BVFunctionND::oscillation() const {
  if (const auto* r = std::get_if<Ridge>(&shape_)) {
    const Interval proj = projection(domain_, r->e);
    return variation(r->profile, OpenDomain1D::interval(proj.lo, proj.hi));
  }
  if (const auto* hs = std::get_if<HalfSpace>(&shape_)) return std::abs(hs->h);
  return std::abs(std::get<RadialIndicator>(shape_).h);
}

// ---------------------------------------------------------------------------
// Constants

double sphere_area(int n) {
  if (n < 1) throw ParameterError("sphere dimension must be positive");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) {
  if (n < 0) throw ParameterError("ball dimension must be non-negative");
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_constant(int n, SphereMethod method) {
  if (n < 1) throw ParameterError("sphere_constant needs n >= 1");
  if (n == 1) return 2.0;
  if (method == SphereMethod::ClosedForm) {
    // 2 pi^((n-1)/2) / Gamma((n+1)/2) through C_{n+2} = C_n * 2 pi / (n + 1),
    // which keeps C_2 = 4 and C_3 = 2 pi exact in floating point.
    double c = n % 2 == 1 ? 2.0 : 4.0;
    for (int m = 2 - n % 2; m + 2 <= n; m += 2) c *= 2.0 * kPi / (m + 1);
    return c;
  }

  // Polar angle phi from the x_1 axis: dH = A_{n-2} sin^(n-2)(phi) dphi,
  // with A_k the area of S^k built up by the same recursion.
  AdaptiveOptions opt;
  opt.rel_tol = 1e-13;
  opt.threads = 1;
  const std::vector<Interval> halves{{0.0, kPi / 2}, {kPi / 2, kPi}};
  double area = 2.0;  // S^0
  for (int k = 1; k <= n - 2; ++k) {
    area *= integrate_adaptive([k](double phi) { return std::pow(std::sin(phi), k - 1); }, halves, opt).value;
  }
  const auto moment =
      integrate_adaptive([n](double phi) { return std::abs(std::cos(phi)) * std::pow(std::sin(phi), n - 2); }, halves,
                         opt);
  return area * moment.value;
}

// ---------------------------------------------------------------------------
// Restriction

Eigen::MatrixXd orthogonal_complement(const VectorN& sigma) {
  const int n = static_cast<int>(sigma.size());
  const Eigen::MatrixXd column = sigma;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(column);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - 1);
}

Restriction restrict(const BVFunctionND& f, const VectorN& sigma, const VectorN& z) {
  const int n = f.dimension();
  require_dimension(sigma, n, "direction");
  require_dimension(z, n, "offset");
  OpenDomain1D trace = f.domain().trace(z, sigma);
  const auto& shape = f.shape();
  if (const auto* r = std::get_if<Ridge>(&shape)) {
    const double shift = z.dot(r->e);
    const double scale = sigma.dot(r->e);
    if (scale == 0.0) return {PiecewiseBV::constant(evaluate(r->profile, shift)), std::move(trace)};
    auto line = BVFunction1D::reparameterized(r->profile, shift, scale);
    // Guards against rounding in the two endpoint computations.
    trace = trace.intersect(line.domain());
    return {std::move(line), std::move(trace)};
  }
  if (const auto* hs = std::get_if<HalfSpace>(&shape)) {
    const double base = z.dot(hs->e);
    const double rate = sigma.dot(hs->e);
    if (rate == 0.0) return {PiecewiseBV::constant(base > hs->c ? hs->h : 0.0), std::move(trace)};
    const double at = (hs->c - base) / rate;
    if (rate > 0.0) return {PiecewiseBV::step(at, hs->h), std::move(trace)};
    return {PiecewiseBV::step(at, -hs->h, hs->h), std::move(trace)};
  }
  const auto& rad = std::get<RadialIndicator>(shape);
  const double s2 = sigma.squaredNorm();
  const double t0 = -z.dot(sigma) / s2;
  const double d2 = (z + t0 * sigma).squaredNorm();
  const double half2 = (rad.R * rad.R - d2) / s2;
  if (!(half2 > 0.0)) return {PiecewiseBV::constant(0.0), std::move(trace)};
  const double half = std::sqrt(half2);
  PiecewiseBV chord({{t0 - half, 0.0, rad.h}, {t0 + half, rad.h, 0.0}}, {0.0, 0.0, 0.0});
  return {std::move(chord), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Estimators

FunctionalValue evaluate_functional_nd(const BVFunctionND& f, double lambda, double gamma, const NDOptions& options) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (options.directions < 1 || options.offsets < 1) throw ParameterError("direction and offset budgets must be >= 1");
  const int n = f.dimension();
  const auto& dom = f.domain();
  const double r = dom.circumradius();
  const double disk = ball_volume(n - 1) * std::pow(r, n - 1);
  const auto dirs = sphere_directions(n, options.directions, options.seed);

  std::vector<double> means(dirs.size());
  std::vector<double> errs(dirs.size());
  std::vector<char> converged(dirs.size(), 1);
  FunctionalOptions line_opt;
  line_opt.rel_tol = options.line_tol;
  line_opt.threads = 1;
  parallel_for(
      dirs.size(),
      [&](std::size_t i) {
        std::mt19937_64 rng(stream_seed(options.seed, i));
        const VectorN& sigma = dirs[i];
        const Eigen::MatrixXd basis = orthogonal_complement(sigma);
        const VectorN center = dom.center() - dom.center().dot(sigma) * sigma;
        NeumaierSum sum;
        NeumaierSum err;
        for (int j = 0; j < options.offsets; ++j) {
          const VectorN z = center + basis * uniform_in_ball(n - 1, r, rng);
          const auto line = restrict(f, sigma, z);
          if (line.trace.empty()) continue;
          const auto v = evaluate_functional_1d(line.f, line.trace, lambda, gamma, line_opt);
          sum.add(v.value);
          err.add(v.error_estimate);
          if (!v.converged) converged[i] = 0;
        }
        means[i] = disk * sum.value() / options.offsets;
        errs[i] = disk * err.value() / options.offsets;
      },
      options.threads);

  const double scale = 0.5 * sphere_area(n);
  NeumaierSum total;
  NeumaierSum err_total;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    total.add(means[i]);
    err_total.add(errs[i]);
  }
  const double d = static_cast<double>(dirs.size());
  const double mean = total.value() / d;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  const double se = dirs.size() > 1 ? std::sqrt(var / (d - 1.0) / d) : 0.0;

  FunctionalValue out;
  out.lambda = lambda;
  out.gamma = gamma;
  out.value = scale * mean;
  out.error_estimate = scale * (se + err_total.value() / d);
  out.converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; });
  out.panels = dirs.size() * static_cast<std::size_t>(options.offsets);
  return out;
}

FunctionalValue direct_mc_oracle(const BVFunctionND& f, double lambda, double gamma, std::uint64_t samples,
                                 std::uint64_t seed, unsigned threads) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (samples < 1000) throw ParameterError("direct_mc_oracle needs at least 1000 samples");
  const int n = f.dimension();
  const auto& dom = f.domain();
  const double osc = f.oscillation();
  FunctionalValue out;
  out.lambda = lambda;
  out.gamma = gamma;
  out.panels = samples;
  if (osc == 0.0) return out;
  // No pair farther apart than this can exceed the threshold.
  const double r_max = std::min(dom.diameter(), std::pow(osc / lambda, 1.0 / (1.0 + gamma)));
  const double weight = lambda * dom.volume() * sphere_area(n) * std::pow(r_max, gamma) / gamma;

  constexpr std::uint64_t kBlock = 1 << 16;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        std::mt19937_64 rng(stream_seed(seed, b));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::uint64_t count = std::min<std::uint64_t>(kBlock, samples - b * kBlock);
        std::uint64_t h = 0;
        VectorN x(n);
        for (std::uint64_t s = 0; s < count; ++s) {
          if (dom.kind() == DomainND::Kind::Box) {
            for (int i = 0; i < n; ++i) x[i] = dom.lo()[i] + (dom.hi()[i] - dom.lo()[i]) * unif(rng);
          } else {
            x = dom.center() + uniform_in_ball(n, dom.radius(), rng);
          }
          const double r = r_max * std::pow(unif(rng), 1.0 / gamma);
          const VectorN y = x + r * uniform_direction(n, rng);
          if (!dom.contains(y) || !dom.contains(x)) continue;
          if (std::abs(f(x) - f(y)) > lambda * std::pow(r, 1.0 + gamma)) ++h;
        }
        hits[b] = h;
      },
      threads);
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  out.value = weight * p;
  out.error_estimate = weight * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form decompositions

namespace {

int axis_of(const VectorN& e) {
  for (int i = 0; i < e.size(); ++i) {
    if (std::abs(std::abs(e[i]) - 1.0) <= 1e-12) return i;
  }
  return -1;
}

double box_face_area(const DomainND& d, int axis) {
  double a = 1.0;
  for (int i = 0; i < d.dimension(); ++i) {
    if (i != axis) a *= d.hi()[i] - d.lo()[i];
  }
  return a;
}

// H^{n-1} of the hyperplane {x . e = c} inside the domain, when closed form.
double hyperplane_area(const DomainND& d, const VectorN& e, double c) {
  const int n = d.dimension();
  if (d.kind() == DomainND::Kind::Ball) {
    const double dist = std::abs(c - e.dot(d.center()));
    if (dist >= d.radius()) return 0.0;
    return ball_volume(n - 1) * std::pow(d.radius() * d.radius() - dist * dist, 0.5 * (n - 1));
  }
  if (n == 2) {
    VectorN dir(2);
    dir << -e[1], e[0];
    return d.trace(c * e, dir).length();
  }
  const int axis = axis_of(e);
  if (axis < 0) throw DomainError("hyperplane area in a box is only closed-form for axis-aligned normals when n >= 3");
  const double level = c * e[axis];
  if (!(d.lo()[axis] < level && level < d.hi()[axis])) return 0.0;
  return box_face_area(d, axis);
}

}  // namespace

BVDecomposition decompose_nd(const BVFunctionND& f) {
  const auto& d = f.domain();
  const int n = f.dimension();
  const auto& shape = f.shape();
  BVDecomposition out;
  if (const auto* hs = std::get_if<HalfSpace>(&shape)) {
    out.jump = std::abs(hs->h) * hyperplane_area(d, hs->e, hs->c);
    return out;
  }
  if (const auto* rad = std::get_if<RadialIndicator>(&shape)) {
    const double R = rad->R;
    bool inside = false;
    bool disjoint = false;
    if (d.kind() == DomainND::Kind::Ball) {
      const double c = d.center().norm();
      inside = c + R < d.radius();
      disjoint = c - d.radius() > R || c + d.radius() < R;
    } else {
      inside = (d.lo().array() < -R).all() && (d.hi().array() > R).all();
      const VectorN nearest = VectorN::Zero(n).cwiseMax(d.lo()).cwiseMin(d.hi());
      VectorN farthest(n);
      for (int i = 0; i < n; ++i) farthest[i] = std::max(std::abs(d.lo()[i]), std::abs(d.hi()[i]));
      disjoint = nearest.norm() > R || farthest.norm() < R;
    }
    if (inside) {
      out.jump = std::abs(rad->h) * sphere_area(n) * std::pow(R, n - 1);
      return out;
    }
    if (disjoint) return out;
    throw DomainError("sphere crosses the domain boundary; no closed-form jump area");
  }
  const auto& ridge = std::get<Ridge>(shape);
  const int axis = axis_of(ridge.e);
  if (d.kind() != DomainND::Kind::Box || axis < 0) {
    throw DomainError("ridge decomposition is only closed-form for axis-aligned directions in a box");
  }
  const double s = ridge.e[axis] > 0 ? 1.0 : -1.0;
  const auto line = BVFunction1D::reparameterized(ridge.profile, 0.0, s);
  const auto parts = decompose(line, OpenDomain1D::interval(d.lo()[axis], d.hi()[axis]));
  const double area = box_face_area(d, axis);
  out.abs_cont = parts.abs_cont * area;
  out.jump = parts.jump * area;
  out.cantor = parts.cantor * area;
  return out;
}

}  // namespace nltv
