#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

#include "nltv/bv_model.hpp"
#include "nltv/domain.hpp"
#include "nltv/functional_1d.hpp"

namespace nltv {

using VectorN = Eigen::VectorXd;

/// Bounded open region in R^n: an axis-aligned box or a ball.
class DomainND {
 public:
  enum class Kind { Box, Ball };

  static DomainND box(VectorN lo, VectorN hi);
  static DomainND ball(VectorN center, double radius);

  Kind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(a_.size()); }
  /// Box: lower corner; ball: centre.
  const VectorN& lo() const { return a_; }
  /// Box: upper corner.
  const VectorN& hi() const { return b_; }
  const VectorN& center() const { return center_; }
  double radius() const { return radius_; }

  bool contains(const VectorN& x) const;
  double volume() const;
  double diameter() const;
  /// Radius of the smallest ball about center() containing the region.
  double circumradius() const;
  /// {t : z + sigma t in the region}, exact.
  OpenDomain1D trace(const VectorN& z, const VectorN& sigma) const;

 private:
  DomainND(Kind kind, VectorN a, VectorN b, VectorN center, double radius)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)), center_(std::move(center)), radius_(radius) {}

  Kind kind_;
  VectorN a_;
  VectorN b_;
  VectorN center_;
  double radius_;
};

/// x -> profile(x . e)
struct Ridge {
  VectorN e;
  BVFunction1D profile;
};

/// x -> h * 1{x . e > c}
struct HalfSpace {
  VectorN e;
  double c = 0.0;
  double h = 1.0;
};

/// x -> h * 1{|x| < R}
struct RadialIndicator {
  double R = 1.0;
  double h = 1.0;
};

class BVFunctionND {
 public:
  using Shape = std::variant<Ridge, HalfSpace, RadialIndicator>;

  /// Directions are normalized; throws ParameterError when they are far from
  /// unit length or the dimensions disagree.
  BVFunctionND(Shape shape, DomainND domain);

  const Shape& shape() const { return shape_; }
  const DomainND& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }

  double operator()(const VectorN& x) const;
  /// Upper bound on sup f - inf f over the domain.
  double oscillation() const;

 private:
  Shape shape_;
  DomainND domain_;
};

struct DirectionLine {
  VectorN sigma;
  VectorN z;
  OpenDomain1D trace;
};

enum class SphereMethod { ClosedForm, Quadrature };

/// C_n, the integral of |x_1| over the unit sphere S^(n-1).
double sphere_constant(int n, SphereMethod method = SphereMethod::ClosedForm);

/// Surface measure of S^(n-1).
double sphere_area(int n);

/// Volume of the unit ball in R^n.
double ball_volume(int n);

struct Restriction {
  BVFunction1D f;
  OpenDomain1D trace;
};

/// t -> f(z + sigma t) on the line's trace through the domain.
Restriction restrict(const BVFunctionND& f, const VectorN& sigma, const VectorN& z);

struct NDOptions {
  int directions = 4096;
  int offsets = 64;
  std::uint64_t seed = 0;
  /// Relative tolerance of each line evaluation.
  double line_tol = 1e-6;
  unsigned threads = 0;
};

/// Directional slicing estimate. The error estimate is the standard error of
/// the direction means plus the mean line quadrature error.
FunctionalValue evaluate_functional_nd(const BVFunctionND& f, double lambda, double gamma, const NDOptions& options);

/// Direct importance-sampling estimate of lambda nu_gamma(E) with a radial
/// density proportional to r^(gamma-1); error estimate is the standard error.
FunctionalValue direct_mc_oracle(const BVFunctionND& f, double lambda, double gamma, std::uint64_t samples,
                                 std::uint64_t seed, unsigned threads = 0);

/// Derivative masses inside the domain for geometries with closed forms:
/// half-spaces in 2-D boxes, axis-aligned half-spaces and ridges in boxes,
/// half-spaces in balls, spheres contained in or disjoint from the domain.
/// Throws DomainError otherwise.
BVDecomposition decompose_nd(const BVFunctionND& f);

/// Orthonormal basis of the complement of a unit vector, as columns.
Eigen::MatrixXd orthogonal_complement(const VectorN& sigma);

}  // namespace nltv
