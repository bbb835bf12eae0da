#include "nltv/function_json.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "nltv/errors.hpp"

namespace nltv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SpecError(path, what); }

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

double number_or_inf(const json& v, const std::string& path, double inf) {
  if (v.is_null()) return inf;
  return number(v, path);
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

VectorN vector_of(const json& v, const std::string& path) {
  array(v, path);
  VectorN out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], at(path, i));
  return out;
}

std::string type_of(const json& j, const std::string& path) {
  const auto& t = field(j, path, "type");
  if (!t.is_string()) fail(path + ".type", "expected a string");
  return t.get<std::string>();
}

// Wraps model validation failures with the path of the object being built.
template <class Fn>
auto build(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

OpenDomain1D domain_1d(const json& j, const std::string& path) {
  array(j, path);
  std::vector<Interval> ivs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at(path, i);
    const auto& pair = array(j[i], p);
    if (pair.size() != 2) fail(p, "expected [lo, hi]");
    ivs.push_back({number_or_inf(pair[0], at(p, 0), -kInf), number_or_inf(pair[1], at(p, 1), kInf)});
  }
  return build(path, [&] { return OpenDomain1D(std::move(ivs)); });
}

BVFunction1D parse_1d(const json& j, const std::string& path) {
  const std::string type = type_of(j, path);
  if (type == "piecewise") {
    const std::string np = path + ".nodes";
    const auto& raw = array(field(j, path, "nodes"), np);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::string p = at(np, i);
      const auto& n = array(raw[i], p);
      if (n.size() == 2) {
        const double v = number(n[1], at(p, 1));
        nodes.push_back({number(n[0], at(p, 0)), v, v});
      } else if (n.size() == 3) {
        nodes.push_back({number(n[0], at(p, 0)), number(n[1], at(p, 1)), number(n[2], at(p, 2))});
      } else {
        fail(p, "expected [x, value] or [x, left, right]");
      }
    }
    std::vector<double> slopes;
    if (j.contains("slopes")) {
      const std::string sp = path + ".slopes";
      const auto& s = array(j["slopes"], sp);
      for (std::size_t i = 0; i < s.size(); ++i) slopes.push_back(number(s[i], at(sp, i)));
    } else {
      // Affine interpolation between consecutive nodes.
      slopes.assign(nodes.size() + 1, 0.0);
      for (std::size_t k = 1; k < nodes.size(); ++k) {
        const double dx = nodes[k].x - nodes[k - 1].x;
        if (dx > 0) slopes[k] = (nodes[k].left - nodes[k - 1].right) / dx;
      }
    }
    OpenDomain1D domain = OpenDomain1D::real_line();
    if (j.contains("domain") && !j["domain"].is_null()) domain = domain_1d(j["domain"], path + ".domain");
    return build(path, [&] { return BVFunction1D(PiecewiseBV(nodes, slopes, domain)); });
  }
  if (type == "step") {
    const double x = number(field(j, path, "at"), path + ".at");
    const double h = number(field(j, path, "height"), path + ".height");
    const double base = j.contains("base") ? number(j["base"], path + ".base") : 0.0;
    OpenDomain1D domain = OpenDomain1D::real_line();
    if (j.contains("domain") && !j["domain"].is_null()) domain = domain_1d(j["domain"], path + ".domain");
    return build(path, [&] { return BVFunction1D(PiecewiseBV::step(x, h, base, domain)); });
  }
  if (type == "cantor") {
    const std::string ap = path + ".alphas";
    const auto& a = array(field(j, path, "alphas"), ap);
    std::vector<double> alphas;
    for (std::size_t i = 0; i < a.size(); ++i) alphas.push_back(number(a[i], at(ap, i)));
    const int depth = integer(field(j, path, "depth"), path + ".depth");
    return build(path, [&] { return BVFunction1D::cantor(CantorSpec(alphas, depth)); });
  }
  if (type == "combination") {
    const std::string tp = path + ".terms";
    const auto& t = array(field(j, path, "terms"), tp);
    std::vector<CombinationTerm> terms;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string p = at(tp, i);
      const double coef = t[i].is_object() && t[i].contains("coef") ? number(t[i]["coef"], p + ".coef") : 1.0;
      terms.push_back({coef, parse_1d(field(t[i], p, "f"), p + ".f")});
    }
    return build(path, [&] { return BVFunction1D::combination(std::move(terms)); });
  }
  if (type == "reparam") {
    const double shift = j.contains("shift") ? number(j["shift"], path + ".shift") : 0.0;
    const double scale = j.contains("scale") ? number(j["scale"], path + ".scale") : 1.0;
    auto inner = parse_1d(field(j, path, "f"), path + ".f");
    return build(path, [&] { return BVFunction1D::reparameterized(std::move(inner), shift, scale); });
  }
  fail(path + ".type", "unknown function type '" + type + "'");
}

DomainND domain_nd(const json& j, const std::string& path) {
  const std::string type = type_of(j, path);
  if (type == "box") {
    auto lo = vector_of(field(j, path, "lo"), path + ".lo");
    auto hi = vector_of(field(j, path, "hi"), path + ".hi");
    return build(path, [&] { return DomainND::box(std::move(lo), std::move(hi)); });
  }
  if (type == "ball") {
    auto c = vector_of(field(j, path, "center"), path + ".center");
    const double r = number(field(j, path, "radius"), path + ".radius");
    return build(path, [&] { return DomainND::ball(std::move(c), r); });
  }
  fail(path + ".type", "unknown domain type '" + type + "'");
}

BVFunctionND parse_nd(const json& j, const std::string& path, const std::string& type) {
  auto dom = domain_nd(field(j, path, "domain"), path + ".domain");
  if (type == "halfspace") {
    auto e = vector_of(field(j, path, "normal"), path + ".normal");
    const double c = j.contains("offset") ? number(j["offset"], path + ".offset") : 0.0;
    const double h = j.contains("height") ? number(j["height"], path + ".height") : 1.0;
    return build(path, [&] { return BVFunctionND(HalfSpace{std::move(e), c, h}, std::move(dom)); });
  }
  if (type == "radial") {
    const double r = number(field(j, path, "radius"), path + ".radius");
    const double h = j.contains("height") ? number(j["height"], path + ".height") : 1.0;
    return build(path, [&] { return BVFunctionND(RadialIndicator{r, h}, std::move(dom)); });
  }
  auto e = vector_of(field(j, path, "direction"), path + ".direction");
  auto profile = parse_1d(field(j, path, "profile"), path + ".profile");
  return build(path, [&] { return BVFunctionND(Ridge{std::move(e), std::move(profile)}, std::move(dom)); });
}

json domain_json(const OpenDomain1D& d) {
  json out = json::array();
  for (const auto& iv : d.intervals()) {
    json lo = std::isinf(iv.lo) ? json(nullptr) : json(iv.lo);
    json hi = std::isinf(iv.hi) ? json(nullptr) : json(iv.hi);
    out.push_back({lo, hi});
  }
  return out;
}

json cantor_json(const CantorSpec& spec) {
  return {{"type", "cantor"}, {"alphas", spec.alphas()}, {"depth", spec.depth()}};
}

json to_json_value(const BVFunction1D& f) {
  switch (f.kind()) {
    case BVFunction1D::Kind::Piecewise: {
      const auto& pw = *f.as_piecewise();
      json nodes = json::array();
      for (const auto& n : pw.nodes()) nodes.push_back({n.x, n.left, n.right});
      return {{"type", "piecewise"}, {"nodes", nodes}, {"slopes", pw.slopes()}, {"domain", domain_json(pw.domain())}};
    }
    case BVFunction1D::Kind::CantorLimit:
      return cantor_json(*f.as_cantor());
    case BVFunction1D::Kind::Combination: {
      json terms = json::array();
      for (const auto& t : *f.as_combination()) terms.push_back({{"coef", t.coef}, {"f", to_json_value(t.f)}});
      return {{"type", "combination"}, {"terms", terms}};
    }
    case BVFunction1D::Kind::Reparameterized: {
      const auto& r = *f.as_reparameterized();
      return {{"type", "reparam"}, {"shift", r.shift}, {"scale", r.scale}, {"f", to_json_value(r.inner)}};
    }
  }
  return nullptr;
}

}  // namespace

FunctionSpec parse_function_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SpecError("line " + std::to_string(line) + ", column " + std::to_string(col), "invalid JSON");
  }
  const std::string type = type_of(j, "f");
  if (type == "halfspace" || type == "radial" || type == "ridge") return parse_nd(j, "f", type);
  return parse_1d(j, "f");
}

std::string to_json(const BVFunction1D& f) { return to_json_value(f).dump(); }

std::string to_json(const CantorSpec& spec) { return cantor_json(spec).dump(); }

}  // namespace nltv
