#include "nltv/bv_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nltv/errors.hpp"

namespace nltv {

namespace {

constexpr double kConsistencyTol = 1e-9;

using Leaf = AffineLeaf;

void flatten(const BVFunction1D& f, double coef, double shift, double scale, std::vector<Leaf>& out) {
  switch (f.kind()) {
    case BVFunction1D::Kind::Piecewise:
    case BVFunction1D::Kind::CantorLimit:
      out.push_back({coef, shift, scale, &f});
      return;
    case BVFunction1D::Kind::Combination:
      for (const auto& term : *f.as_combination()) flatten(term.f, coef * term.coef, shift, scale, out);
      return;
    case BVFunction1D::Kind::Reparameterized: {
      const auto& r = *f.as_reparameterized();
      flatten(r.inner, coef, r.shift + r.scale * shift, r.scale * scale, out);
      return;
    }
  }
}

double cantor_value(const CantorSpec& spec, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = 0.0;
  double len = 1.0;
  double base = 0.0;
  double w = 1.0;
  for (int level = 1; level <= 64; ++level) {
    const double piece = spec.alpha(level) * len;
    if (x <= a + piece) {
      // left closed interval
    } else if (x < a + len - piece) {
      return base + 0.5 * w;
    } else {
      base += 0.5 * w;
      a = a + len - piece;
    }
    w *= 0.5;
    len = piece;
  }
  return base + 0.5 * w;
}

// Cantor mass on (lo, hi) for the limit function; continuous, so endpoint
// values suffice.
double cantor_mass(const CantorSpec& spec, const OpenDomain1D& omega) {
  double mass = 0.0;
  for (const auto& iv : omega.intervals()) {
    const double lo = std::clamp(iv.lo, 0.0, 1.0);
    const double hi = std::clamp(iv.hi, 0.0, 1.0);
    if (lo < hi) mass += cantor_value(spec, hi) - cantor_value(spec, lo);
  }
  return mass;
}

BVDecomposition piecewise_masses(const PiecewiseBV& pw, const OpenDomain1D& omega) {
  BVDecomposition d;
  const std::size_t m = pw.nodes().size();
  for (std::size_t k = 0; k <= m; ++k) {
    const double s = pw.slopes()[k];
    if (s == 0.0) continue;
    std::vector<Interval> clipped;
    omega.clip({pw.segment_span(k)}, clipped);
    for (const auto& iv : clipped) d.abs_cont += std::abs(s) * iv.length();
  }
  for (const auto& n : pw.nodes()) {
    if (omega.contains(n.x)) d.jump += std::abs(n.jump());
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseBV

PiecewiseBV::PiecewiseBV(std::vector<Node> nodes, std::vector<double> slopes, OpenDomain1D domain)
    : nodes_(std::move(nodes)), slopes_(std::move(slopes)), domain_(std::move(domain)) {
  if (nodes_.empty()) throw ParameterError("piecewise function needs at least one node");
  if (slopes_.size() != nodes_.size() + 1) {
    throw ParameterError("piecewise function needs " + std::to_string(nodes_.size() + 1) +
                         " slopes (one per gap plus two tails), got " + std::to_string(slopes_.size()));
  }
  if (slopes_.front() != 0.0 || slopes_.back() != 0.0) {
    throw ParameterError("tail slopes must be zero so the variation is finite");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.left) || !std::isfinite(n.right)) {
      throw ParameterError("node " + std::to_string(i) + " is not finite");
    }
    if (!std::isfinite(slopes_[i + 1])) throw ParameterError("slope " + std::to_string(i + 1) + " is not finite");
    if (i == 0) continue;
    const auto& prev = nodes_[i - 1];
    if (!(prev.x < n.x)) throw ParameterError("node positions must be strictly increasing");
    const double predicted = prev.right + slopes_[i] * (n.x - prev.x);
    const double scale = 1.0 + std::abs(prev.right) + std::abs(n.left) + std::abs(slopes_[i] * (n.x - prev.x));
    if (std::abs(predicted - n.left) > kConsistencyTol * scale) {
      throw ParameterError("node " + std::to_string(i) + ": left limit " + std::to_string(n.left) +
                           " disagrees with the affine segment value " + std::to_string(predicted));
    }
  }
}

PiecewiseBV PiecewiseBV::constant(double value, OpenDomain1D domain) {
  return PiecewiseBV({{0.0, value, value}}, {0.0, 0.0}, std::move(domain));
}

PiecewiseBV PiecewiseBV::step(double at, double height, double base, OpenDomain1D domain) {
  return PiecewiseBV({{at, base, base + height}}, {0.0, 0.0}, std::move(domain));
}

std::size_t PiecewiseBV::segment_of(double x) const {
  return static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                                   [](double v, const Node& n) { return v < n.x; }) -
                                  nodes_.begin());
}

Interval PiecewiseBV::segment_span(std::size_t k) const {
  const double lo = k == 0 ? -kInf : nodes_[k - 1].x;
  const double hi = k == nodes_.size() ? kInf : nodes_[k].x;
  return {lo, hi};
}

double PiecewiseBV::value_on_segment(std::size_t k, double y) const {
  if (k == 0) return nodes_.front().left;
  const auto& n = nodes_[k - 1];
  const double s = slopes_[k];
  return s == 0.0 ? n.right : n.right + s * (y - n.x);
}

double PiecewiseBV::operator()(double x) const { return value_on_segment(segment_of(x), x); }

double PiecewiseBV::left_limit(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x, [](const Node& n, double v) { return n.x < v; });
  if (it != nodes_.end() && it->x == x) return it->left;
  return (*this)(x);
}

double PiecewiseBV::min_value() const {
  double v = nodes_.front().left;
  for (const auto& n : nodes_) v = std::min({v, n.left, n.right});
  return v;
}

double PiecewiseBV::max_value() const {
  double v = nodes_.front().left;
  for (const auto& n : nodes_) v = std::max({v, n.left, n.right});
  return v;
}

PiecewiseBV PiecewiseBV::with_domain(OpenDomain1D domain) const {
  PiecewiseBV out = *this;
  out.domain_ = std::move(domain);
  return out;
}

// ---------------------------------------------------------------------------
// CantorSpec

CantorSpec::CantorSpec(std::vector<double> alphas, int depth) : alphas_(std::move(alphas)), depth_(depth) {
  if (alphas_.empty()) throw ParameterError("Cantor spec needs at least one alpha");
  if (depth_ < 1) throw ParameterError("Cantor depth must be a positive integer");
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!(alphas_[i] > 0.0 && alphas_[i] < 0.1)) {
      throw ParameterError("alpha_" + std::to_string(i + 1) + " = " + std::to_string(alphas_[i]) +
                           " must lie in (0, 1/10)");
    }
  }
}

double CantorSpec::alpha(int level) const {
  const auto idx = static_cast<std::size_t>(std::max(level, 1)) - 1;
  return idx < alphas_.size() ? alphas_[idx] : alphas_.back();
}

double CantorSpec::level_length(int j) const {
  double len = 1.0;
  for (int i = 1; i <= j; ++i) len *= alpha(i);
  return len;
}

// ---------------------------------------------------------------------------
// BVFunction1D

BVFunction1D::BVFunction1D(PiecewiseBV pw) {
  OpenDomain1D domain = pw.domain();
  rep_ = std::make_shared<detail::BVRep>(detail::BVRep{std::move(pw), std::move(domain)});
}

BVFunction1D BVFunction1D::cantor(CantorSpec spec) {
  return BVFunction1D(std::make_shared<detail::BVRep>(detail::BVRep{std::move(spec), OpenDomain1D::interval(0.0, 1.0)}));
}

BVFunction1D BVFunction1D::combination(std::vector<CombinationTerm> terms) {
  if (terms.empty()) throw ParameterError("combination needs at least one term");
  OpenDomain1D domain = terms.front().f.domain();
  for (std::size_t i = 1; i < terms.size(); ++i) domain = domain.intersect(terms[i].f.domain());
  if (domain.empty()) throw ParameterError("combination terms have disjoint domains");
  for (const auto& t : terms) {
    if (!std::isfinite(t.coef)) throw ParameterError("combination coefficient is not finite");
  }

  std::vector<Leaf> leaves;
  for (const auto& t : terms) flatten(t.f, t.coef, 0.0, 1.0, leaves);

  std::vector<std::pair<double, std::size_t>> jumps;
  std::vector<std::pair<Interval, std::size_t>> supports;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto& leaf = leaves[i];
    if (leaf.coef == 0.0) continue;
    if (const auto* pw = leaf.f->as_piecewise()) {
      for (const auto& n : pw->nodes()) {
        if (n.jump() != 0.0) jumps.emplace_back((n.x - leaf.shift) / leaf.scale, i);
      }
    } else {
      double a = (0.0 - leaf.shift) / leaf.scale;
      double b = (1.0 - leaf.shift) / leaf.scale;
      if (a > b) std::swap(a, b);
      supports.push_back({{a, b}, i});
    }
  }
  std::sort(jumps.begin(), jumps.end());
  for (std::size_t i = 1; i < jumps.size(); ++i) {
    const double gap = jumps[i].first - jumps[i - 1].first;
    if (jumps[i].second != jumps[i - 1].second && gap <= 1e-12 * (1.0 + std::abs(jumps[i].first))) {
      throw ParameterError("combination summands share a jump point at " + std::to_string(jumps[i].first));
    }
  }
  std::sort(supports.begin(), supports.end(),
            [](const auto& l, const auto& r) { return l.first.lo < r.first.lo; });
  for (std::size_t i = 1; i < supports.size(); ++i) {
    if (supports[i].first.lo < supports[i - 1].first.hi) {
      throw ParameterError("combination summands have overlapping Cantor supports");
    }
  }

  return BVFunction1D(std::make_shared<detail::BVRep>(detail::BVRep{std::move(terms), std::move(domain)}));
}

BVFunction1D BVFunction1D::reparameterized(BVFunction1D inner, double shift, double scale) {
  if (!(scale != 0.0) || !std::isfinite(scale) || !std::isfinite(shift)) {
    throw ParameterError("reparameterization needs a finite non-zero scale");
  }
  OpenDomain1D domain = inner.domain().affine_preimage(shift, scale);
  return BVFunction1D(std::make_shared<detail::BVRep>(
      detail::BVRep{Reparameterized{std::move(inner), shift, scale}, std::move(domain)}));
}

BVFunction1D::Kind BVFunction1D::kind() const { return static_cast<Kind>(rep_->data.index()); }
const OpenDomain1D& BVFunction1D::domain() const { return rep_->domain; }
const PiecewiseBV* BVFunction1D::as_piecewise() const { return std::get_if<PiecewiseBV>(&rep_->data); }
const CantorSpec* BVFunction1D::as_cantor() const { return std::get_if<CantorSpec>(&rep_->data); }
const std::vector<CombinationTerm>* BVFunction1D::as_combination() const {
  return std::get_if<std::vector<CombinationTerm>>(&rep_->data);
}
const Reparameterized* BVFunction1D::as_reparameterized() const { return std::get_if<Reparameterized>(&rep_->data); }

// ---------------------------------------------------------------------------
// Operations

double evaluate(const BVFunction1D& f, double x) {
  if (!f.domain().contains_closure(x)) throw DomainError("evaluate: x = " + std::to_string(x) + " outside the domain");
  switch (f.kind()) {
    case BVFunction1D::Kind::Piecewise:
      return (*f.as_piecewise())(x);
    case BVFunction1D::Kind::CantorLimit:
      return cantor_value(*f.as_cantor(), x);
    case BVFunction1D::Kind::Combination: {
      double v = 0.0;
      for (const auto& t : *f.as_combination()) v += t.coef * evaluate(t.f, x);
      return v;
    }
    case BVFunction1D::Kind::Reparameterized: {
      const auto& r = *f.as_reparameterized();
      return evaluate(r.inner, r.shift + r.scale * x);
    }
  }
  return 0.0;
}

CantorLevel cantor_intervals(const CantorSpec& spec, int j) {
  if (j < 1 || j > spec.depth()) {
    throw ParameterError("cantor_intervals: level " + std::to_string(j) + " outside [1, " +
                         std::to_string(spec.depth()) + "]");
  }
  std::vector<Interval> closed{{0.0, 1.0}};
  std::vector<Interval> gaps;
  double len = 1.0;
  for (int level = 1; level <= j; ++level) {
    const double piece = spec.alpha(level) * len;
    std::vector<Interval> next;
    next.reserve(closed.size() * 2);
    gaps.clear();
    gaps.reserve(closed.size());
    for (const auto& iv : closed) {
      next.push_back({iv.lo, iv.lo + piece});
      gaps.push_back({iv.lo + piece, iv.hi - piece});
      next.push_back({iv.hi - piece, iv.hi});
    }
    closed = std::move(next);
    len = piece;
  }
  return {std::move(closed), std::move(gaps)};
}

PiecewiseBV cantor_refine(const CantorSpec& spec, int j) {
  if (j < 0 || j > spec.depth()) {
    throw ParameterError("cantor_refine: level " + std::to_string(j) + " outside [0, " +
                         std::to_string(spec.depth()) + "]");
  }
  const auto unit = OpenDomain1D::interval(0.0, 1.0);
  if (j == 0) return PiecewiseBV({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0.0, 1.0, 0.0}, unit);

  const auto closed = cantor_intervals(spec, j).closed;
  const double rise = std::ldexp(1.0, -j);
  std::vector<Node> nodes;
  std::vector<double> slopes;
  nodes.reserve(closed.size() * 2);
  slopes.reserve(closed.size() * 2 + 1);
  slopes.push_back(0.0);
  for (std::size_t k = 0; k < closed.size(); ++k) {
    if (!(closed[k].lo < closed[k].hi) || (k > 0 && !(closed[k - 1].hi < closed[k].lo))) {
      throw NumericalError("cantor_refine: level " + std::to_string(j) + " intervals are below double resolution");
    }
    const double lo_val = static_cast<double>(k) * rise;
    const double hi_val = static_cast<double>(k + 1) * rise;
    nodes.push_back({closed[k].lo, lo_val, lo_val});
    // Rounded endpoints, not the nominal length, keep each piece continuous.
    slopes.push_back(rise / (closed[k].hi - closed[k].lo));
    nodes.push_back({closed[k].hi, hi_val, hi_val});
    slopes.push_back(0.0);
  }
  return PiecewiseBV(std::move(nodes), std::move(slopes), unit);
}

double variation(const BVFunction1D& f, const OpenDomain1D& omega) { return decompose(f, omega).total(); }

BVDecomposition decompose(const BVFunction1D& f, const OpenDomain1D& omega) {
  if (!omega.is_subset_of(f.domain())) throw DomainError("decompose: region is not contained in the domain");
  switch (f.kind()) {
    case BVFunction1D::Kind::Piecewise:
      return piecewise_masses(*f.as_piecewise(), omega);
    case BVFunction1D::Kind::CantorLimit:
      return {0.0, 0.0, cantor_mass(*f.as_cantor(), omega)};
    case BVFunction1D::Kind::Reparameterized: {
      const auto& r = *f.as_reparameterized();
      return decompose(r.inner, omega.affine_image(r.shift, r.scale));
    }
    case BVFunction1D::Kind::Combination:
      break;
  }

  std::vector<Leaf> leaves;
  flatten(f, 1.0, 0.0, 1.0, leaves);
  std::vector<PiecewiseBV> pieces;
  std::vector<double> coefs;
  BVDecomposition d;
  for (const auto& leaf : leaves) {
    if (const auto* pw = leaf.f->as_piecewise()) {
      pieces.push_back(reparameterize(*pw, leaf.shift, leaf.scale));
      coefs.push_back(leaf.coef);
    } else {
      d.cantor += std::abs(leaf.coef) * cantor_mass(*leaf.f->as_cantor(), omega.affine_image(leaf.shift, leaf.scale));
    }
  }
  if (!pieces.empty()) {
    std::vector<std::pair<double, const PiecewiseBV*>> terms;
    for (std::size_t i = 0; i < pieces.size(); ++i) terms.emplace_back(coefs[i], &pieces[i]);
    const auto merged = linear_combination(terms);
    const auto m = piecewise_masses(merged, omega);
    d.abs_cont = m.abs_cont;
    d.jump = m.jump;
  }
  return d;
}

PiecewiseBV reparameterize(const PiecewiseBV& pw, double shift, double scale) {
  if (!(scale != 0.0)) throw ParameterError("reparameterize: zero scale");
  const auto& src = pw.nodes();
  const auto& sl = pw.slopes();
  std::vector<Node> nodes;
  std::vector<double> slopes;
  nodes.reserve(src.size());
  slopes.reserve(sl.size());
  if (scale > 0) {
    for (const auto& n : src) nodes.push_back({(n.x - shift) / scale, n.left, n.right});
    for (double s : sl) slopes.push_back(s * scale);
  } else {
    for (auto it = src.rbegin(); it != src.rend(); ++it) nodes.push_back({(it->x - shift) / scale, it->right, it->left});
    for (auto it = sl.rbegin(); it != sl.rend(); ++it) slopes.push_back(*it * scale);
    // -0.0 tails would still compare equal to zero; normalise anyway.
    slopes.front() = 0.0;
    slopes.back() = 0.0;
  }
  // Interior slopes follow from the mapped endpoints so rounding of the new
  // positions cannot break continuity of steep pieces.
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double dx = nodes[k].x - nodes[k - 1].x;
    if (!(dx > 0.0)) throw NumericalError("reparameterize: mapped nodes collide below double resolution");
    if (slopes[k] != 0.0) slopes[k] = (nodes[k].left - nodes[k - 1].right) / dx;
  }
  return PiecewiseBV(std::move(nodes), std::move(slopes), pw.domain().affine_preimage(shift, scale));
}

PiecewiseBV linear_combination(const std::vector<std::pair<double, const PiecewiseBV*>>& terms) {
  if (terms.empty()) throw ParameterError("linear_combination: no terms");
  std::vector<double> xs;
  OpenDomain1D domain = terms.front().second->domain();
  for (const auto& [c, pw] : terms) {
    for (const auto& n : pw->nodes()) xs.push_back(n.x);
    domain = domain.intersect(pw->domain());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Node> nodes(xs.size());
  std::vector<double> slopes(xs.size() + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) nodes[i] = {xs[i], 0.0, 0.0};
  for (const auto& [c, pw] : terms) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      nodes[i].left += c * pw->left_limit(xs[i]);
      nodes[i].right += c * (*pw)(xs[i]);
    }
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double mid = 0.5 * (xs[k - 1] + xs[k]);
      slopes[k] += c * pw->slopes()[pw->segment_of(mid)];
    }
  }
  return PiecewiseBV(std::move(nodes), std::move(slopes), std::move(domain));
}

PiecewiseApproximation to_piecewise(const BVFunction1D& f, int cantor_level) {
  if (const auto* pw = f.as_piecewise()) return {*pw, 0.0, 0.0, 0};

  std::vector<Leaf> leaves;
  flatten(f, 1.0, 0.0, 1.0, leaves);
  std::vector<PiecewiseBV> pieces;
  pieces.reserve(leaves.size());
  PiecewiseApproximation out{PiecewiseBV::constant(0.0), 0.0, 0.0, 0};
  for (const auto& leaf : leaves) {
    if (const auto* pw = leaf.f->as_piecewise()) {
      pieces.push_back(reparameterize(*pw, leaf.shift, leaf.scale));
    } else {
      const auto& spec = *leaf.f->as_cantor();
      const int level = std::clamp(cantor_level, 0, spec.depth());
      pieces.push_back(reparameterize(cantor_refine(spec, level), leaf.shift, leaf.scale));
      out.uncertain_length += std::ldexp(spec.level_length(level), level) / std::abs(leaf.scale);
      out.sup_error += std::abs(leaf.coef) * std::ldexp(1.0, -level);
      out.cantor_level = std::max(out.cantor_level, level);
    }
  }
  std::vector<std::pair<double, const PiecewiseBV*>> terms;
  for (std::size_t i = 0; i < pieces.size(); ++i) terms.emplace_back(leaves[i].coef, &pieces[i]);
  out.pw = linear_combination(terms).with_domain(f.domain());
  return out;
}

std::vector<AffineLeaf> affine_leaves(const BVFunction1D& f) {
  std::vector<AffineLeaf> leaves;
  flatten(f, 1.0, 0.0, 1.0, leaves);
  return leaves;
}

int max_cantor_depth(const BVFunction1D& f) {
  std::vector<Leaf> leaves;
  flatten(f, 1.0, 0.0, 1.0, leaves);
  int depth = 0;
  for (const auto& leaf : leaves) {
    if (const auto* spec = leaf.f->as_cantor()) depth = std::max(depth, spec->depth());
  }
  return depth;
}

}  // namespace nltv
