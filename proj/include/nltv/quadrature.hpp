#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "nltv/domain.hpp"
#include "nltv/parallel.hpp"

namespace nltv {

struct QuadraturePanel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  /// Error is at the rounding floor; bisecting cannot reduce it.
  bool at_floor = false;
};

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_panels = std::size_t{1} << 20;
  unsigned threads = 0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

/// Compensated running sum.
class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

/// 15-point Kronrod rule with the embedded 7-point Gauss rule; error scaled
/// the QUADPACK way.
template <class F>
QuadraturePanel gauss_kronrod15(const F& f, double a, double b) {
  using namespace detail;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double scale = std::abs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  bool floor = false;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps) && 50.0 * eps * resabs >= err) {
    err = 50.0 * eps * resabs;
    floor = true;
  }
  return {a, b, resk * half, err, floor};
}

/// Globally adaptive integration over a union of intervals. Each round bisects
/// the panels with the largest errors until the remaining error would drop
/// below half the target; new panels are evaluated in parallel and all sums are
/// taken in panel order, so the result does not depend on the thread count.
/// `f` must be safe to call concurrently.
template <class F>
QuadratureResult integrate_adaptive(const F& f, const std::vector<Interval>& initial, const AdaptiveOptions& opt) {
  std::vector<QuadraturePanel> panels(initial.size());
  parallel_for(initial.size(), [&](std::size_t i) { panels[i] = gauss_kronrod15(f, initial[i].lo, initial[i].hi); },
               opt.threads);

  QuadratureResult out;
  std::vector<std::size_t> order;
  std::vector<QuadraturePanel> children;
  while (true) {
    NeumaierSum value;
    NeumaierSum error;
    for (const auto& p : panels) {
      value.add(p.value);
      error.add(p.error);
    }
    out.value = value.value();
    out.error = error.value();
    out.panels = panels.size();
    const double target = std::max(opt.rel_tol * std::abs(out.value), opt.abs_tol);
    if (out.error <= target) {
      out.converged = true;
      return out;
    }
    if (panels.size() >= opt.max_panels) return out;

    order.resize(panels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return panels[l].error > panels[r].error; });
    std::vector<std::size_t> chosen;
    double removed = 0.0;
    const double needed = out.error - 0.5 * target;
    for (std::size_t idx : order) {
      if (removed >= needed || panels.size() + chosen.size() >= opt.max_panels) break;
      const auto& p = panels[idx];
      const double mid = 0.5 * (p.a + p.b);
      if (p.at_floor || !(p.a < mid && mid < p.b)) continue;
      chosen.push_back(idx);
      removed += p.error;
    }
    if (chosen.empty()) return out;
    std::sort(chosen.begin(), chosen.end());

    children.assign(2 * chosen.size(), {});
    parallel_for(
        children.size(),
        [&](std::size_t c) {
          const auto& p = panels[chosen[c / 2]];
          const double mid = 0.5 * (p.a + p.b);
          children[c] = c % 2 == 0 ? gauss_kronrod15(f, p.a, mid) : gauss_kronrod15(f, mid, p.b);
        },
        opt.threads);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      panels[chosen[i]] = children[2 * i];
      panels.push_back(children[2 * i + 1]);
    }
  }
}

}  // namespace nltv
