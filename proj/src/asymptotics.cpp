#include "nltv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nltv/errors.hpp"

namespace nltv {

void SweepSeries::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i].value >= 0.0)) throw ParameterError("sweep value " + std::to_string(i) + " is negative");
    if (i > 0 && !(records[i - 1].lambda < records[i].lambda)) {
      throw ParameterError("sweep lambdas must increase strictly");
    }
  }
}

std::vector<double> geometric_lambdas(double lambda0, double factor, int count) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw ParameterError("lambda0 must be positive");
  if (!(factor > 1.0) || !std::isfinite(factor)) throw ParameterError("factor must exceed 1");
  if (count < 2) throw ParameterError("a sweep needs count >= 2");
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(lambda0 * std::pow(factor, i));
  return out;
}

SweepSeries lambda_sweep(const BVFunction1D& f, const OpenDomain1D& omega, double gamma, double lambda0, double factor,
                         int count, double tol) {
  SweepSeries s;
  s.gamma = gamma;
  s.descriptor = "1d";
  for (double lambda : geometric_lambdas(lambda0, factor, count)) {
    const auto v = evaluate_functional_1d(f, omega, lambda, gamma, tol);
    s.records.push_back({lambda, v.value, v.error_estimate, v.converged});
  }
  return s;
}

SweepSeries lambda_sweep(const BVFunctionND& f, double gamma, double lambda0, double factor, int count,
                         const NDOptions& options) {
  SweepSeries s;
  s.gamma = gamma;
  s.descriptor = std::to_string(f.dimension()) + "d";
  for (double lambda : geometric_lambdas(lambda0, factor, count)) {
    const auto v = evaluate_functional_nd(f, lambda, gamma, options);
    s.records.push_back({lambda, v.value, v.error_estimate, v.converged});
  }
  return s;
}

LiminfEstimate liminf_estimate(const SweepSeries& series, double tail_fraction) {
  if (series.records.empty()) throw ParameterError("liminf_estimate needs a non-empty series");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ParameterError("tail_fraction must lie in (0, 1]");
  const std::size_t n = series.records.size();
  const auto tail = std::min(n, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  LiminfEstimate out;
  out.tail_count = tail;
  out.nondecreasing = true;
  out.nonincreasing = true;
  out.estimate = series.records[n - tail].value;
  for (std::size_t i = n - tail; i < n; ++i) {
    out.estimate = std::min(out.estimate, series.records[i].value);
    if (i > n - tail) {
      const double prev = series.records[i - 1].value;
      const double cur = series.records[i].value;
      if (cur < prev) out.nondecreasing = false;
      if (cur > prev) out.nonincreasing = false;
    }
  }
  if (tail >= 2) {
    const double prev = series.records[n - 2].value;
    const double cur = series.records[n - 1].value;
    out.last_relative_change = prev != 0.0 ? (cur - prev) / std::abs(prev) : 0.0;
  }
  return out;
}

GapReport theorem_gap_report(const BVDecomposition& parts, int dimension, double gamma, const SweepSeries& series,
                             double tail_fraction) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  const double cn = sphere_constant(dimension);
  GapReport r;
  r.abs_cont_term = cn / gamma * parts.abs_cont;
  r.jump_term = cn / (gamma + 1.0) * parts.jump;
  r.cantor_term = cn / (gamma + 1.0) * parts.cantor;
  r.bound = r.abs_cont_term + r.jump_term + r.cantor_term;
  r.tail_min = liminf_estimate(series, tail_fraction).estimate;
  r.margin = r.tail_min - r.bound;
  return r;
}

GapReport theorem_gap_report(const BVFunction1D& f, const OpenDomain1D& omega, double gamma,
                             const SweepSeries& series, double tail_fraction) {
  return theorem_gap_report(decompose(f, omega), 1, gamma, series, tail_fraction);
}

GapReport theorem_gap_report(const BVFunctionND& f, double gamma, const SweepSeries& series, double tail_fraction) {
  return theorem_gap_report(decompose_nd(f), f.dimension(), gamma, series, tail_fraction);
}

CantorExperiment cantor_sharpness_experiment(double gamma, int jmax, double alpha_start, double tol) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  if (jmax < 1) throw ParameterError("jmax must be at least 1");
  if (!(alpha_start > 0.0 && alpha_start <= 1.0 / 20.0)) throw ParameterError("alpha_start must lie in (0, 1/20]");
  const double p = 1.0 + gamma;
  const int depth = jmax + 8;
  const auto unit = OpenDomain1D::interval(0.0, 1.0);
  auto level_lambda = [&](int j, const std::vector<double>& alphas) {
    double len = 1.0;
    for (int i = 0; i < j - 1; ++i) len *= alphas[i];
    return std::ldexp(std::pow(len, -p), 1 - j) * std::pow(2.0, gamma);
  };
  auto target_of = [&](int j) { return (1.0 + 1.0 / j) * 2.0 / p; };

  std::vector<double> alphas;
  std::vector<int> halvings;
  for (int j = 1; j <= jmax; ++j) {
    const double lambda = level_lambda(j, alphas);
    double alpha = alpha_start;
    int steps = 0;
    while (true) {
      auto trial = alphas;
      trial.push_back(alpha);
      const auto f = BVFunction1D::cantor(CantorSpec(trial, depth));
      const auto v = evaluate_functional_1d(f, unit, lambda, gamma, tol);
      if (v.value + v.error_estimate <= target_of(j)) break;
      alpha *= 0.5;
      ++steps;
      if (alpha < 1e-12) {
        throw NumericalError("Cantor experiment: alpha_" + std::to_string(j) +
                             " fell below 1e-12 before F met the level target");
      }
    }
    alphas.push_back(alpha);
    halvings.push_back(steps);
  }

  CantorExperiment out{CantorSpec(alphas, depth), {}, {}};
  out.series.gamma = gamma;
  out.series.descriptor = "cantor";
  const auto f = BVFunction1D::cantor(out.spec);
  for (int j = 1; j <= jmax; ++j) {
    const double lambda = level_lambda(j, alphas);
    const auto v = evaluate_functional_1d(f, unit, lambda, gamma, tol);
    out.series.records.push_back({lambda, v.value, v.error_estimate, v.converged});
    out.levels.push_back({j, alphas[j - 1], lambda, v.value, v.error_estimate, target_of(j), halvings[j - 1]});
  }
  for (std::size_t i = 1; i < out.series.records.size(); ++i) {
    if (!(out.series.records[i].lambda > out.series.records[i - 1].lambda)) {
      throw NumericalError("Cantor experiment produced non-increasing lambda at level " + std::to_string(i + 1));
    }
  }
  return out;
}

}  // namespace nltv
