#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "nltv/domain.hpp"

namespace nltv {

/// Breakpoint of a piecewise function: position and the one-sided limits.
struct Node {
  double x = 0.0;
  double left = 0.0;
  double right = 0.0;

  double jump() const { return right - left; }
};

/// Piecewise affine function with jump atoms.
///
/// Segment 0 is the left tail (-inf, x_0), segment k (1 <= k < m) is
/// (x_{k-1}, x_k) and segment m is the right tail (x_{m-1}, inf). Both tails
/// are constant. At a node the function takes its right limit.
class PiecewiseBV {
 public:
  PiecewiseBV(std::vector<Node> nodes, std::vector<double> slopes,
              OpenDomain1D domain = OpenDomain1D::real_line());

  static PiecewiseBV constant(double value, OpenDomain1D domain = OpenDomain1D::real_line());
  /// height * 1_{[at, inf)} + base
  static PiecewiseBV step(double at, double height, double base = 0.0,
                          OpenDomain1D domain = OpenDomain1D::real_line());

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<double>& slopes() const { return slopes_; }
  const OpenDomain1D& domain() const { return domain_; }
  std::size_t segment_count() const { return slopes_.size(); }

  /// Index of the segment containing x (number of nodes <= x).
  std::size_t segment_of(double x) const;
  /// Closure of segment k; tails extend to +-inf.
  Interval segment_span(std::size_t k) const;
  /// Affine extension of segment k evaluated at y.
  double value_on_segment(std::size_t k, double y) const;

  double operator()(double x) const;
  double left_limit(double x) const;
  double right_limit(double x) const { return (*this)(x); }

  double min_value() const;
  double max_value() const;

  PiecewiseBV with_domain(OpenDomain1D domain) const;

 private:
  std::vector<Node> nodes_;
  std::vector<double> slopes_;
  OpenDomain1D domain_;
};

/// Parameters of the generalized Cantor construction on [0, 1].
///
/// Level j splits every closed interval of level j-1 into two closed pieces of
/// relative length alpha(j) around a centred open gap. Levels beyond the listed
/// alphas reuse the last one; `depth` bounds the finite refinements.
class CantorSpec {
 public:
  CantorSpec(std::vector<double> alphas, int depth);

  const std::vector<double>& alphas() const { return alphas_; }
  int depth() const { return depth_; }
  double alpha(int level) const;
  /// Common length of every level-j closed interval.
  double level_length(int j) const;

 private:
  std::vector<double> alphas_;
  int depth_;
};

struct BVDecomposition {
  double abs_cont = 0.0;
  double jump = 0.0;
  double cantor = 0.0;

  double total() const { return abs_cont + jump + cantor; }
};

class BVFunction1D;
struct CombinationTerm;
struct Reparameterized;

namespace detail {
struct BVRep;
}

/// Immutable handle to a function in the representable BV class.
class BVFunction1D {
 public:
  enum class Kind { Piecewise, CantorLimit, Combination, Reparameterized };

  BVFunction1D(PiecewiseBV pw);  // NOLINT(google-explicit-constructor)

  static BVFunction1D piecewise(PiecewiseBV pw) { return BVFunction1D(std::move(pw)); }
  static BVFunction1D cantor(CantorSpec spec);
  /// Sum of c_i * f_i. Jump points of distinct summands must differ and Cantor
  /// supports must not overlap; violations throw ParameterError.
  static BVFunction1D combination(std::vector<CombinationTerm> terms);
  /// t -> inner(shift + scale * t), scale != 0.
  static BVFunction1D reparameterized(BVFunction1D inner, double shift, double scale);

  Kind kind() const;
  const OpenDomain1D& domain() const;

  const PiecewiseBV* as_piecewise() const;
  const CantorSpec* as_cantor() const;
  const std::vector<CombinationTerm>* as_combination() const;
  const Reparameterized* as_reparameterized() const;

 private:
  explicit BVFunction1D(std::shared_ptr<const detail::BVRep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const detail::BVRep> rep_;
};

struct CombinationTerm {
  double coef = 1.0;
  BVFunction1D f;
};

struct Reparameterized {
  BVFunction1D inner;
  double shift = 0.0;
  double scale = 1.0;
};

namespace detail {
struct BVRep {
  std::variant<PiecewiseBV, CantorSpec, std::vector<CombinationTerm>, Reparameterized> data;
  OpenDomain1D domain;
};
}  // namespace detail

/// Closed intervals I^j_k and open gaps J^j_k of one construction level.
struct CantorLevel {
  std::vector<Interval> closed;
  std::vector<Interval> gaps;
};

/// Pointwise value; the Cantor limit is resolved by descending the interval
/// tree to machine precision. Throws DomainError outside the closed domain.
double evaluate(const BVFunction1D& f, double x);

/// Level-j intervals, left to right. Requires 1 <= j <= spec.depth().
CantorLevel cantor_intervals(const CantorSpec& spec, int j);

/// Increasing approximant f_j: dyadic constants on the gaps of level <= j,
/// affine on each level-j closed interval. Domain (0, 1).
PiecewiseBV cantor_refine(const CantorSpec& spec, int j);

double variation(const BVFunction1D& f, const OpenDomain1D& omega);
BVDecomposition decompose(const BVFunction1D& f, const OpenDomain1D& omega);

/// t -> pw(shift + scale * t).
PiecewiseBV reparameterize(const PiecewiseBV& pw, double shift, double scale);

/// Sum of coef * pw over a shared node set; domain is the intersection.
PiecewiseBV linear_combination(const std::vector<std::pair<double, const PiecewiseBV*>>& terms);

/// Finite piecewise form of an arbitrary representable function.
struct PiecewiseApproximation {
  PiecewiseBV pw;
  /// Measure of the set where `pw` may differ from the represented function.
  double uncertain_length = 0.0;
  /// Bound on |f - pw| everywhere.
  double sup_error = 0.0;
  /// Deepest Cantor refinement level actually used (0 when none).
  int cantor_level = 0;
};

/// Cantor parts are replaced by cantor_refine at min(level, spec.depth()).
PiecewiseApproximation to_piecewise(const BVFunction1D& f, int cantor_level);

/// f(t) = sum of coef * f(shift + scale * t) over the leaves; every leaf is a
/// Piecewise or CantorLimit function owned by `f`.
struct AffineLeaf {
  double coef;
  double shift;
  double scale;
  const BVFunction1D* f;
};

std::vector<AffineLeaf> affine_leaves(const BVFunction1D& f);

/// Largest Cantor depth among the leaves, or 0 when f has no Cantor part.
int max_cantor_depth(const BVFunction1D& f);

}  // namespace nltv
