#pragma once

#include <limits>
#include <vector>

namespace nltv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval with endpoints `lo < hi`; either end may be infinite. Whether it is
/// open or closed depends on where it is used.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Open subset of the real line given as a finite union of disjoint open
/// intervals, kept sorted.
class OpenDomain1D {
 public:
  /// The empty set.
  OpenDomain1D() = default;

  /// Throws DomainError unless the intervals are sorted, pairwise disjoint
  /// and each has lo < hi.
  explicit OpenDomain1D(std::vector<Interval> intervals);

  static OpenDomain1D real_line() { return OpenDomain1D({{-kInf, kInf}}); }
  static OpenDomain1D interval(double a, double b) { return OpenDomain1D({{a, b}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool bounded() const;

  bool contains(double x) const;
  bool contains_closure(double x) const;
  bool is_subset_of(const OpenDomain1D& other) const;

  OpenDomain1D intersect(const OpenDomain1D& other) const;

  /// Smallest interval containing the set; requires a non-empty domain.
  Interval hull() const;

  /// Lebesgue measure (may be infinite).
  double length() const;

  /// {t : shift + scale * t in this}. `scale` must be non-zero.
  OpenDomain1D affine_preimage(double shift, double scale) const;

  /// {shift + scale * t : t in this}. `scale` must be non-zero.
  OpenDomain1D affine_image(double shift, double scale) const;

  /// Intersect a sorted list of disjoint intervals with this domain and append
  /// the pieces to `out`.
  void clip(const std::vector<Interval>& pieces, std::vector<Interval>& out) const;

  friend bool operator==(const OpenDomain1D&, const OpenDomain1D&) = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace nltv
