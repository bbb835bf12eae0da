#include "nltv/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nltv/errors.hpp"

namespace nltv {

OpenDomain1D::OpenDomain1D(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
      throw DomainError("domain interval " + std::to_string(i) + " must satisfy lo < hi");
    }
    if (i > 0 && intervals_[i - 1].hi > iv.lo) {
      throw DomainError("domain intervals must be sorted and pairwise disjoint");
    }
  }
}

bool OpenDomain1D::bounded() const {
  return !intervals_.empty() && std::isfinite(intervals_.front().lo) &&
         std::isfinite(intervals_.back().hi);
}

bool OpenDomain1D::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.hi; });
  return it != intervals_.end() && it->lo < x && x < it->hi;
}

bool OpenDomain1D::contains_closure(double x) const {
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  return it != intervals_.end() && it->lo <= x && x <= it->hi;
}

bool OpenDomain1D::is_subset_of(const OpenDomain1D& other) const {
  for (const auto& iv : intervals_) {
    bool covered = false;
    for (const auto& ov : other.intervals_) {
      if (ov.lo <= iv.lo && iv.hi <= ov.hi) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

OpenDomain1D OpenDomain1D::intersect(const OpenDomain1D& other) const {
  std::vector<Interval> out;
  clip(other.intervals_, out);
  return OpenDomain1D(std::move(out));
}

Interval OpenDomain1D::hull() const {
  if (intervals_.empty()) throw DomainError("hull of an empty domain");
  return {intervals_.front().lo, intervals_.back().hi};
}

double OpenDomain1D::length() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

OpenDomain1D OpenDomain1D::affine_preimage(double shift, double scale) const {
  if (scale == 0.0) throw ParameterError("affine_preimage: zero scale");
  return affine_image(-shift / scale, 1.0 / scale);
}

OpenDomain1D OpenDomain1D::affine_image(double shift, double scale) const {
  if (scale == 0.0) throw ParameterError("affine_image: zero scale");
  std::vector<Interval> out;
  out.reserve(intervals_.size());
  for (const auto& iv : intervals_) {
    double a = shift + scale * iv.lo;
    double b = shift + scale * iv.hi;
    if (std::isinf(iv.lo)) a = scale > 0 ? -kInf : kInf;
    if (std::isinf(iv.hi)) b = scale > 0 ? kInf : -kInf;
    if (a > b) std::swap(a, b);
    out.push_back({a, b});
  }
  if (scale < 0) std::reverse(out.begin(), out.end());
  return OpenDomain1D(std::move(out));
}

void OpenDomain1D::clip(const std::vector<Interval>& pieces, std::vector<Interval>& out) const {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pieces.size() && j < intervals_.size()) {
    const double lo = std::max(pieces[i].lo, intervals_[j].lo);
    const double hi = std::min(pieces[i].hi, intervals_[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (pieces[i].hi < intervals_[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
}

}  // namespace nltv
