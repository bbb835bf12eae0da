#include "nltv/functional_1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "nltv/errors.hpp"
#include "nltv/quadrature.hpp"

namespace nltv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be a positive finite number");
}

// One maximal interval in t where a concave piece of the exceedance test is
// positive.
struct TRange {
  double lo;
  double hi;
};

// Solves phi(t) = 0 between neg (phi < 0) and pos (phi > 0) for concave phi.
// Newton iterates started on the negative side stay there and increase
// monotonically toward the root; bisection takes over if they stall.
template <class Phi, class DPhi>
double concave_root(const Phi& phi, const DPhi& dphi, double neg, double pos, std::size_t segment) {
  const double scale = std::max(std::abs(neg), std::abs(pos));
  double t = neg;
  for (int it = 0; it < 80; ++it) {
    const double v = phi(t);
    const double d = dphi(t);
    if (!std::isfinite(v) || !std::isfinite(d)) break;
    if (v >= 0.0) return t;
    const double next = t - v / d;
    if (!(next > std::min(t, pos) && next < std::max(t, pos))) break;
    if (std::abs(next - t) <= 4.0 * kEps * std::abs(next)) return next;
    t = next;
  }
  double lo = t;
  double hi = pos;
  for (int it = 0; it < 400; ++it) {
    if (std::abs(hi - lo) <= 1e-13 * scale) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    const double v = phi(mid);
    if (std::isnan(v)) break;
    (v > 0.0 ? hi : lo) = mid;
  }
  throw NumericalError("exceedance root did not converge on segment " + std::to_string(segment) + " between t = " +
                       std::to_string(neg) + " and t = " + std::to_string(pos));
}

// Exceedance of one signed branch sigma * d(t) > lambda t^p on [a, b], where
// d(t) = d0 + m (t - a) and 0 <= a < b < inf.
std::optional<TRange> branch_range(double sigma, double d0, double m, double a, double b, double lambda,
                                   double gamma, std::size_t segment) {
  const double p = 1.0 + gamma;
  const double sm = sigma * m;
  auto phi = [&](double t) { return sigma * (d0 + m * (t - a)) - lambda * std::pow(t, p); };
  auto dphi = [&](double t) { return sm - lambda * p * std::pow(t, gamma); };

  if (a == 0.0 && d0 == 0.0) {
    // Own segment: sigma m t > lambda t^p  <=>  t < (sigma m / lambda)^(1/gamma).
    if (!(sm > 0.0)) return std::nullopt;
    const double root = std::pow(sm / lambda, 1.0 / gamma);
    return TRange{0.0, std::min(root, b)};
  }
  if (m == 0.0) {
    const double level = sigma * d0;
    if (!(level > 0.0)) return std::nullopt;
    const double root = std::pow(level / lambda, 1.0 / p);
    if (root <= a) return std::nullopt;
    return TRange{a, std::min(root, b)};
  }
  if (sm < 0.0) {
    // Strictly decreasing.
    const double fa = phi(a);
    if (!(fa > 0.0)) return std::nullopt;
    const double fb = phi(b);
    if (fb > 0.0) return TRange{a, b};
    return TRange{a, concave_root(phi, dphi, b, a, segment)};
  }
  const double tm = std::clamp(std::pow(sm / (lambda * p), 1.0 / gamma), a, b);
  const double fm = phi(tm);
  if (!(fm > 0.0)) return std::nullopt;
  const double fa = phi(a);
  const double fb = phi(b);
  const double lo = fa >= 0.0 ? a : concave_root(phi, dphi, a, tm, segment);
  const double hi = fb >= 0.0 ? b : concave_root(phi, dphi, b, tm, segment);
  if (!(lo < hi)) return std::nullopt;
  return TRange{lo, hi};
}

// Slices of the exceedance set of a piecewise function.
class SliceEngine {
 public:
  SliceEngine(const PiecewiseBV& pw, const OpenDomain1D& omega, double lambda, double gamma)
      : pw_(pw), omega_(omega), lambda_(lambda), gamma_(gamma) {
    const double osc = pw.max_value() - pw.min_value();
    reach_ = osc > 0.0 ? std::pow(osc / lambda, 1.0 / (1.0 + gamma)) : 0.0;
    build_blocks();
  }

  double reach() const { return reach_; }

  // Sum over both sides of the integral of t^(gamma-1) over exceedance
  // intervals; optionally collects the intervals in y coordinates.
  double inner(double x, std::vector<Interval>* out = nullptr) const {
    if (reach_ == 0.0) return 0.0;
    const double fx = pw_(x);
    const std::size_t k0 = pw_.segment_of(x);
    double total = 0.0;
    std::vector<TRange> allowed;
    std::vector<TRange> found;

    // y > x
    allowed.clear();
    for (const auto& iv : omega_.intervals()) {
      if (iv.hi > x) allowed.push_back({std::max(iv.lo - x, 0.0), iv.hi - x});
    }
    found.clear();
    const std::size_t m = pw_.nodes().size();
    for (std::size_t k = k0; k <= m && !allowed.empty(); ++k) {
      const Interval span = pw_.segment_span(k);
      const double a = k == k0 ? 0.0 : span.lo - x;
      if (a >= reach_ || a >= allowed.back().hi) break;
      if (k != k0) {
        if (const std::size_t skip = block_forward(k, x, fx, a, allowed, found)) {
          k += skip - 1;
          continue;
        }
      }
      const double b = std::min(span.hi - x, reach_);
      if (!(a < b)) continue;
      const double d0 = k == k0 ? 0.0 : pw_.nodes()[k - 1].right - fx;
      collect(d0, pw_.slopes()[k], a, b, k, allowed, found);
    }
    total += accumulate(found);
    if (out) {
      for (const auto& r : found) out->push_back({x + r.lo, x + r.hi});
    }

    // y < x
    allowed.clear();
    for (auto it = omega_.intervals().rbegin(); it != omega_.intervals().rend(); ++it) {
      if (it->lo < x) allowed.push_back({std::max(x - it->hi, 0.0), x - it->lo});
    }
    found.clear();
    for (std::size_t k = k0 + 1; k-- > 0 && !allowed.empty();) {
      const Interval span = pw_.segment_span(k);
      const double a = k == k0 ? 0.0 : x - span.hi;
      if (a >= reach_ || a >= allowed.back().hi) break;
      if (k != k0) {
        if (const std::size_t skip = block_backward(k, x, fx, a, allowed, found)) {
          k -= skip - 1;
          continue;
        }
      }
      const double b = std::min(x - span.lo, reach_);
      if (!(a < b)) continue;
      const double d0 = k == k0 ? 0.0 : pw_.nodes()[k].left - fx;
      collect(d0, -pw_.slopes()[k], a, b, k, allowed, found);
    }
    total += accumulate(found);
    if (out) {
      for (const auto& r : found) out->push_back({x - r.hi, x - r.lo});
    }
    return total;
  }

 private:
  struct Range {
    double lo;
    double hi;
  };
  static constexpr std::size_t kFanout = 16;

  // Value ranges of f over aligned blocks of kFanout^(l+1) segments.
  void build_blocks() {
    const auto& nodes = pw_.nodes();
    const std::size_t segments = nodes.size() + 1;
    std::vector<Range> cur(segments);
    for (std::size_t k = 0; k < segments; ++k) {
      const double v0 = k == 0 ? nodes.front().left : nodes[k - 1].right;
      const double v1 = k == segments - 1 ? nodes.back().right : nodes[k].left;
      cur[k] = {std::min(v0, v1), std::max(v0, v1)};
    }
    for (std::size_t size = kFanout; size <= segments; size *= kFanout) {
      std::vector<Range> next((cur.size() + kFanout - 1) / kFanout, Range{kInf, -kInf});
      for (std::size_t i = 0; i < cur.size(); ++i) {
        auto& r = next[i / kFanout];
        r.lo = std::min(r.lo, cur[i].lo);
        r.hi = std::max(r.hi, cur[i].hi);
      }
      block_size_.push_back(size);
      blocks_.push_back(next);
      cur = std::move(next);
    }
  }

  // A whole block is settled at once when f stays within lambda a^p of fx
  // (nothing exceeds) or clears lambda b^p at its far end b (everything does).
  // Returns the number of segments consumed, 0 when the block must be walked.
  std::size_t settle(const Range& r, double fx, double a, double b, const std::vector<TRange>& allowed,
                     std::vector<TRange>& found) const {
    const double p = 1.0 + gamma_;
    if (std::max(std::abs(r.hi - fx), std::abs(r.lo - fx)) <= lambda_ * std::pow(a, p)) return 1;
    if (b <= reach_ && (r.lo - fx > lambda_ * std::pow(b, p) || fx - r.hi > lambda_ * std::pow(b, p))) {
      for (const auto& al : allowed) {
        const double lo = std::max(a, al.lo);
        const double hi = std::min(b, al.hi);
        if (lo < hi) found.push_back({lo, hi});
      }
      return 1;
    }
    return 0;
  }

  // Tails are never inside a block: forward blocks end before segment m,
  // backward blocks start after segment 0.
  std::size_t block_forward(std::size_t k, double x, double fx, double a, const std::vector<TRange>& allowed,
                            std::vector<TRange>& found) const {
    const std::size_t m = pw_.nodes().size();
    for (std::size_t l = block_size_.size(); l-- > 0;) {
      const std::size_t size = block_size_[l];
      if (k % size != 0 || k + size > m) continue;
      const double b = pw_.segment_span(k + size - 1).hi - x;
      if (settle(blocks_[l][k / size], fx, a, b, allowed, found)) return size;
    }
    return 0;
  }

  std::size_t block_backward(std::size_t k, double x, double fx, double a, const std::vector<TRange>& allowed,
                             std::vector<TRange>& found) const {
    for (std::size_t l = block_size_.size(); l-- > 0;) {
      const std::size_t size = block_size_[l];
      if ((k + 1) % size != 0 || k + 1 < size + 1) continue;
      const double b = x - pw_.segment_span(k + 1 - size).lo;
      if (settle(blocks_[l][(k + 1) / size - 1], fx, a, b, allowed, found)) return size;
    }
    return 0;
  }

  void collect(double d0, double m, double a, double b, std::size_t k, const std::vector<TRange>& allowed,
               std::vector<TRange>& found) const {
    // Quick rejection: |d| on [a, b] is at most the larger endpoint value.
    const double dmax = std::max(std::abs(d0), std::abs(d0 + m * (b - a)));
    if (dmax <= lambda_ * std::pow(a, 1.0 + gamma_)) return;
    for (double sigma : {1.0, -1.0}) {
      const auto r = branch_range(sigma, d0, m, a, b, lambda_, gamma_, k);
      if (!r) continue;
      for (const auto& al : allowed) {
        const double lo = std::max(r->lo, al.lo);
        const double hi = std::min(r->hi, al.hi);
        if (lo < hi) found.push_back({lo, hi});
      }
    }
  }

  double accumulate(std::vector<TRange>& found) const {
    std::sort(found.begin(), found.end(), [](const TRange& l, const TRange& r) { return l.lo < r.lo; });
    // Merge touching pieces so the reported slice intervals are maximal.
    std::size_t w = 0;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (w > 0 && found[i].lo <= found[w - 1].hi) {
        found[w - 1].hi = std::max(found[w - 1].hi, found[i].hi);
      } else {
        found[w++] = found[i];
      }
    }
    found.resize(w);
    double s = 0.0;
    for (const auto& r : found) s += power_integral(r.lo, r.hi, gamma_);
    return s;
  }

  const PiecewiseBV& pw_;
  const OpenDomain1D& omega_;
  double lambda_;
  double gamma_;
  double reach_ = 0.0;
  std::vector<std::size_t> block_size_;
  std::vector<std::vector<Range>> blocks_;
};

// Outer x-panels: the reach-neighbourhood of the variation support, split at
// nodes and at the points where slice topology changes.
std::vector<Interval> initial_panels(const PiecewiseBV& pw, const OpenDomain1D& omega, double lambda, double gamma,
                                     double reach, std::size_t budget) {
  const auto& nodes = pw.nodes();
  const auto& slopes = pw.slopes();
  const double p = 1.0 + gamma;
  std::vector<Interval> active;
  std::vector<double> keep;
  std::vector<double> optional;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    const double s_right = slopes[k + 1];
    if (n.jump() != 0.0) {
      active.push_back({n.x - reach, n.x + reach});
      const double r = std::pow(std::abs(n.jump()) / lambda, 1.0 / p);
      keep.push_back(n.x);
      optional.push_back(n.x - r);
      optional.push_back(n.x + r);
    } else if (slopes[k] != 0.0 || s_right != 0.0) {
      optional.push_back(n.x);
    }
    if (s_right != 0.0 && k + 1 < nodes.size()) {
      const double lo = n.x;
      const double hi = nodes[k + 1].x;
      active.push_back({lo - reach, hi + reach});
      const double r = std::pow(std::abs(s_right) / lambda, 1.0 / gamma);
      if (r < hi - lo) {
        optional.push_back(lo + r);
        optional.push_back(hi - r);
      }
    }
  }
  std::sort(active.begin(), active.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : active) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  std::vector<Interval> regions;
  omega.clip(merged, regions);
  if (regions.empty()) return {};

  if (keep.size() + optional.size() > budget) {
    std::sort(optional.begin(), optional.end());
    const std::size_t room = budget > keep.size() ? budget - keep.size() : 0;
    std::vector<double> thinned;
    if (room > 0) {
      const double stride = static_cast<double>(optional.size()) / static_cast<double>(room);
      for (std::size_t i = 0; i < room; ++i) thinned.push_back(optional[static_cast<std::size_t>(i * stride)]);
    }
    optional = std::move(thinned);
  }
  std::vector<double> cuts = std::move(keep);
  cuts.insert(cuts.end(), optional.begin(), optional.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Interval> panels;
  for (const auto& reg : regions) {
    double lo = reg.lo;
    auto it = std::upper_bound(cuts.begin(), cuts.end(), lo);
    for (; it != cuts.end() && *it < reg.hi; ++it) {
      panels.push_back({lo, *it});
      lo = *it;
    }
    panels.push_back({lo, reg.hi});
  }
  return panels;
}

// lambda * integral over omega of the slice sums, plus quadrature error.
FunctionalValue integrate_piecewise(const PiecewiseBV& pw, const OpenDomain1D& omega, double lambda, double gamma,
                                    const FunctionalOptions& opt) {
  FunctionalValue out;
  out.lambda = lambda;
  out.gamma = gamma;
  const SliceEngine engine(pw, omega, lambda, gamma);
  if (engine.reach() == 0.0) return out;
  const auto panels = initial_panels(pw, omega, lambda, gamma, engine.reach(), opt.max_initial_panels);
  if (panels.empty()) return out;
  AdaptiveOptions aopt;
  aopt.rel_tol = opt.rel_tol;
  aopt.abs_tol = opt.abs_tol / lambda;
  aopt.max_panels = std::max(opt.max_panels, panels.size());
  aopt.threads = opt.threads;
  const auto q = integrate_adaptive([&](double x) { return engine.inner(x); }, panels, aopt);
  out.value = std::max(0.0, lambda * q.value);
  out.error_estimate = lambda * q.error;
  out.converged = q.converged;
  out.panels = q.panels;
  return out;
}

// ---------------------------------------------------------------------------
// Cantor truncation

struct CantorPlan {
  int level = 0;
  double band = 0.0;
};

// Pairs whose membership can change when the Cantor leaves are replaced by
// level-L approximants have a point in the level-L closed intervals U and are
// closer than R = ((osc + 2 sup_err) / lambda)^(1/(1+gamma)); their
// lambda-weighted mass is at most lambda |U| 4 R^gamma / gamma.
double band_bound(double uncertain, double osc, double lambda, double gamma) {
  if (uncertain == 0.0) return 0.0;
  const double r = std::pow(osc / lambda, 1.0 / (1.0 + gamma));
  return lambda * uncertain * 4.0 * std::pow(r, gamma) / gamma;
}

struct LeafSummary {
  double osc = 0.0;
  double cantor_osc = 0.0;
  bool has_cantor = false;
};

LeafSummary summarize(const std::vector<AffineLeaf>& leaves) {
  LeafSummary s;
  for (const auto& leaf : leaves) {
    if (const auto* pw = leaf.f->as_piecewise()) {
      s.osc += std::abs(leaf.coef) * (pw->max_value() - pw->min_value());
    } else {
      s.osc += std::abs(leaf.coef);
      s.cantor_osc += std::abs(leaf.coef);
      s.has_cantor = true;
    }
  }
  return s;
}

double cantor_uncertain(const std::vector<AffineLeaf>& leaves, int level) {
  double u = 0.0;
  for (const auto& leaf : leaves) {
    if (const auto* spec = leaf.f->as_cantor()) {
      const int l = std::min(level, spec->depth());
      u += std::ldexp(spec->level_length(l), l) / std::abs(leaf.scale);
    }
  }
  return u;
}

// Deepest level at which every Cantor leaf's intervals are still resolved in
// double precision at their position.
int representable_level(const std::vector<AffineLeaf>& leaves) {
  int cap = std::numeric_limits<int>::max();
  for (const auto& leaf : leaves) {
    const auto* spec = leaf.f->as_cantor();
    if (!spec) continue;
    const double t0 = (0.0 - leaf.shift) / leaf.scale;
    const double t1 = (1.0 - leaf.shift) / leaf.scale;
    const double mag = std::max({std::abs(t0), std::abs(t1), 1.0 / std::abs(leaf.scale)});
    int l = 0;
    while (l < spec->depth() && spec->level_length(l + 1) / std::abs(leaf.scale) >= 1e-11 * mag) ++l;
    cap = std::min(cap, std::max(l, 1));
  }
  return cap;
}

CantorPlan plan_cantor(const std::vector<AffineLeaf>& leaves, double lambda, double gamma,
                       const FunctionalOptions& opt) {
  const auto s = summarize(leaves);
  CantorPlan plan;
  if (!s.has_cantor) return plan;
  int depth_cap = std::numeric_limits<int>::max();
  for (const auto& leaf : leaves) {
    if (const auto* spec = leaf.f->as_cantor()) depth_cap = std::min(depth_cap, spec->depth());
  }
  auto band_at = [&](int level) {
    const double sup = s.cantor_osc * std::ldexp(1.0, -level);
    return band_bound(cantor_uncertain(leaves, level), s.osc + 2.0 * sup, lambda, gamma);
  };
  if (opt.cantor_depth > 0) {
    plan.level = std::min(opt.cantor_depth, depth_cap);
    plan.band = band_at(plan.level);
    return plan;
  }
  const int cap = std::min(depth_cap, representable_level(leaves));
  const double target = 0.25 * opt.rel_tol * 2.0 * s.osc / (1.0 + gamma) + 0.25 * opt.abs_tol;
  plan.level = cap;
  for (int level = 1; level <= cap; ++level) {
    if (band_at(level) <= target) {
      plan.level = level;
      break;
    }
  }
  plan.band = band_at(plan.level);
  return plan;
}

FunctionalValue evaluate_general(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma,
                                 const FunctionalOptions& opt) {
  const auto leaves = affine_leaves(f);
  const auto plan = plan_cantor(leaves, lambda, gamma, opt);
  const auto approx = to_piecewise(f, plan.level);
  auto out = integrate_piecewise(approx.pw, omega, lambda, gamma, opt);
  out.error_estimate += plan.band;
  out.cantor_depth = approx.cantor_level;
  return out;
}

// ---------------------------------------------------------------------------
// Self-similar reduction for c * cantor(shift + scale * t) + const on one interval.
//
// If lambda gap_k^(1+gamma) >= 2^(1-k) for every level k <= K (gap_k the
// length of a level-k gap), no exceeding pair straddles a full gap of level
// <= K. Every exceeding pair then lies in one level-K interval together with
// its two adjacent gaps, where the function is an affine copy of the Cantor
// function of the shifted alpha sequence, extended by constants. All 2^K cells
// are translates; only the two outer ones see the domain boundary.

std::optional<FunctionalValue> evaluate_self_similar(const BVFunction1D& f, const OpenDomain1D& omega, double lambda,
                                                     double gamma, const FunctionalOptions& opt) {
  if (omega.intervals().size() != 1) return std::nullopt;
  const auto leaves = affine_leaves(f);
  const AffineLeaf* cantor_leaf = nullptr;
  for (const auto& leaf : leaves) {
    if (leaf.coef == 0.0) continue;
    if (leaf.f->as_cantor()) {
      if (cantor_leaf) return std::nullopt;
      cantor_leaf = &leaf;
    } else {
      const auto* pw = leaf.f->as_piecewise();
      if (pw->max_value() != pw->min_value()) return std::nullopt;
    }
  }
  if (!cantor_leaf) return std::nullopt;

  const auto& spec = *cantor_leaf->f->as_cantor();
  const double p = 1.0 + gamma;
  const double c = std::abs(cantor_leaf->coef);
  const double mu0 = lambda / c * std::pow(std::abs(cantor_leaf->scale), -p);
  const auto local_omega = omega.affine_image(cantor_leaf->shift, cantor_leaf->scale);
  Interval span = local_omega.intervals().front();
  // Regions that miss [0, 1] only by rounding of the affine map are widened;
  // the added sliver is covered by its band bound.
  constexpr double kSnap = 1e-12;
  double sliver = 0.0;
  if (span.lo > 0.0 && span.lo <= kSnap) {
    sliver += span.lo;
    span.lo = 0.0;
  }
  if (span.hi < 1.0 && span.hi >= 1.0 - kSnap) {
    sliver += 1.0 - span.hi;
    span.hi = 1.0;
  }
  if (!(span.lo <= 0.0 && span.hi >= 1.0)) return std::nullopt;

  int K = 0;
  double len = 1.0;
  for (int k = 1; k < spec.depth(); ++k) {
    const double gap = (1.0 - 2.0 * spec.alpha(k)) * len;
    if (mu0 * std::pow(gap, p) < std::ldexp(2.0, -k)) break;
    K = k;
    len *= spec.alpha(k);
  }
  if (K == 0) return std::nullopt;

  std::vector<double> alphas;
  for (int k = K + 1; k <= std::max<int>(K + 1, static_cast<int>(spec.alphas().size())); ++k) {
    alphas.push_back(spec.alpha(k));
  }
  const CantorSpec local(alphas, spec.depth() - K);
  const double mu = mu0 * std::ldexp(std::pow(len, p), K);
  const auto g = BVFunction1D::cantor(local);
  const auto local_leaves = affine_leaves(g);
  const auto plan = plan_cantor(local_leaves, mu, gamma, opt);
  const auto pw = cantor_refine(local, plan.level).with_domain(OpenDomain1D::real_line());

  FunctionalOptions inner = opt;
  inner.abs_tol = opt.abs_tol / c;
  auto cell = [&](double lo, double hi) { return integrate_piecewise(pw, OpenDomain1D({{lo, hi}}), mu, gamma, inner); };
  const auto left = cell(span.lo / len, kInf);
  const auto right = cell(-kInf, 1.0 + (span.hi - 1.0) / len);
  const double w_inner = 1.0 - std::ldexp(1.0, 1 - K);
  const double w_outer = std::ldexp(1.0, -K);
  FunctionalValue out;
  out.lambda = lambda;
  out.gamma = gamma;
  out.value = c * w_outer * (left.value + right.value);
  out.error_estimate = c * w_outer * (left.error_estimate + right.error_estimate + 2.0 * plan.band);
  out.converged = left.converged && right.converged;
  out.panels = left.panels + right.panels;
  if (w_inner > 0.0) {
    const auto mid = cell(-kInf, kInf);
    out.value += c * w_inner * mid.value;
    out.error_estimate += c * w_inner * (mid.error_estimate + plan.band);
    out.converged = out.converged && mid.converged;
    out.panels += mid.panels;
  }
  out.error_estimate += band_bound(sliver / std::abs(cantor_leaf->scale), c, lambda, gamma);
  out.cantor_depth = K + plan.level;
  return out;
}

void check_inputs(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma) {
  require_positive(lambda, "lambda");
  require_positive(gamma, "gamma");
  if (!omega.is_subset_of(f.domain())) throw DomainError("evaluation region is not contained in the function's domain");
}

}  // namespace

double power_integral(double a, double b, double gamma) {
  if (!(b > a)) return 0.0;
  const double top = std::pow(b, gamma);
  if (a == 0.0) return top / gamma;
  return -top * std::expm1(gamma * std::log(a / b)) / gamma;
}

ExceedanceSlice exceedance_slice(const BVFunction1D& f, double x, double lambda, double gamma,
                                 const OpenDomain1D& omega, int cantor_depth) {
  check_inputs(f, omega, lambda, gamma);
  if (!omega.contains(x)) throw DomainError("exceedance_slice: x = " + std::to_string(x) + " is not in the domain");
  const auto leaves = affine_leaves(f);
  int level = cantor_depth;
  if (level <= 0) level = std::min(max_cantor_depth(f), representable_level(leaves));
  const auto approx = to_piecewise(f, level);
  const SliceEngine engine(approx.pw, omega, lambda, gamma);
  ExceedanceSlice out;
  out.x = x;
  engine.inner(x, &out.intervals);
  std::sort(out.intervals.begin(), out.intervals.end(),
            [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
  return out;
}

FunctionalValue evaluate_functional_1d(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma,
                                       const FunctionalOptions& options) {
  check_inputs(f, omega, lambda, gamma);
  require_positive(options.rel_tol, "tol");
  if (omega.empty()) return {0.0, 0.0, lambda, gamma, true, 0, 0};
  if (options.self_similar) {
    if (auto v = evaluate_self_similar(f, omega, lambda, gamma, options)) return *v;
  }
  return evaluate_general(f, omega, lambda, gamma, options);
}

// ---------------------------------------------------------------------------
// Grid oracle

namespace {

// Integral of |x - y|^(gamma-1) over two cells of width h whose indices differ by k.
double cell_pair_weight(int k, double h, double gamma) {
  const double p = 1.0 + gamma;
  auto q = [p](int v) { return v == 0 ? 0.0 : std::pow(static_cast<double>(std::abs(v)), p); };
  return std::pow(h, p) * (q(k + 1) - 2.0 * q(k) + q(k - 1)) / (gamma * p);
}

double grid_estimate(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma, int N) {
  const Interval hull = omega.hull();
  const double p = 1.0 + gamma;
  const double eta = hull.length() / N;
  const double h = eta / 4.0;
  constexpr int kSub = 4;
  constexpr int kNear = 2;

  std::vector<double> xm(N);
  std::vector<double> fm(N);
  std::vector<char> inside(N);
  for (int i = 0; i < N; ++i) {
    xm[i] = hull.lo + (i + 0.5) * eta;
    inside[i] = omega.contains(xm[i]);
    fm[i] = inside[i] ? evaluate(f, xm[i]) : 0.0;
  }
  const int M = N * kSub;
  std::vector<double> xs(M);
  std::vector<double> fs(M);
  std::vector<double> fq1(M);
  std::vector<double> fq3(M);
  std::vector<char> sub_inside(M);
  for (int i = 0; i < M; ++i) {
    const double lo = hull.lo + i * h;
    xs[i] = lo + 0.5 * h;
    sub_inside[i] = omega.contains(xs[i]);
    if (!sub_inside[i]) continue;
    fs[i] = evaluate(f, xs[i]);
    fq1[i] = evaluate(f, std::clamp(lo + 0.25 * h, hull.lo, hull.hi));
    fq3[i] = evaluate(f, std::clamp(lo + 0.75 * h, hull.lo, hull.hi));
  }

  double osc = 0.0;
  {
    double lo = kInf;
    double hi = -kInf;
    for (int i = 0; i < M; ++i) {
      if (!sub_inside[i]) continue;
      lo = std::min({lo, fs[i], fq1[i], fq3[i]});
      hi = std::max({hi, fs[i], fq1[i], fq3[i]});
    }
    if (hi > lo) osc = hi - lo;
  }
  if (osc == 0.0) return 0.0;
  const int reach = static_cast<int>(std::ceil(std::pow(osc / lambda, 1.0 / p) / eta)) + 1;

  std::vector<double> w(static_cast<std::size_t>(std::min(reach, N) + 2));
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = cell_pair_weight(static_cast<int>(k), eta, gamma);
  std::vector<double> thr(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) thr[k] = lambda * std::pow(static_cast<double>(k) * eta, p);
  std::vector<double> ws(kSub * (kNear + 1) + kSub);
  std::vector<double> thr_s(ws.size());
  for (std::size_t k = 0; k < ws.size(); ++k) {
    ws[k] = cell_pair_weight(static_cast<int>(k), h, gamma);
    thr_s[k] = lambda * std::pow(static_cast<double>(k) * h, p);
  }

  NeumaierSum total;
  for (int i = 0; i < N; ++i) {
    double row = 0.0;
    const int jlo = std::max(0, i - reach);
    const int jhi = std::min(N - 1, i + reach);
    for (int j = jlo; j <= jhi; ++j) {
      const int k = std::abs(i - j);
      if (k > kNear) {
        if (!inside[i] || !inside[j]) continue;
        if (std::abs(fm[i] - fm[j]) > thr[k]) row += w[k];
        continue;
      }
      for (int a = 0; a < kSub; ++a) {
        const int si = i * kSub + a;
        if (!sub_inside[si]) continue;
        for (int b = 0; b < kSub; ++b) {
          const int sj = j * kSub + b;
          if (!sub_inside[sj]) continue;
          const int ks = std::abs(si - sj);
          if (ks == 0) {
            if (std::abs(fq1[si] - fq3[si]) > lambda * std::pow(0.5 * h, p)) row += ws[0];
          } else if (std::abs(fs[si] - fs[sj]) > thr_s[ks]) {
            row += ws[ks];
          }
        }
      }
    }
    total.add(row);
  }
  return lambda * total.value();
}

}  // namespace

FunctionalValue grid_oracle(const BVFunction1D& f, const OpenDomain1D& omega, double lambda, double gamma, int N) {
  check_inputs(f, omega, lambda, gamma);
  if (!omega.bounded()) throw ParameterError("grid_oracle needs a bounded domain");
  if (N < 16) throw ParameterError("grid_oracle needs N >= 16");
  FunctionalValue out;
  out.lambda = lambda;
  out.gamma = gamma;
  out.value = grid_estimate(f, omega, lambda, gamma, N);
  out.error_estimate = std::abs(out.value - grid_estimate(f, omega, lambda, gamma, N / 2));
  out.panels = static_cast<std::size_t>(N);
  return out;
}

}  // namespace nltv
