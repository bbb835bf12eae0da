#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nltv/bv_model.hpp"
#include "nltv/functional_1d.hpp"
#include "nltv/slicing_nd.hpp"

namespace nltv {

struct SweepRecord {
  double lambda = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Values of F along strictly increasing lambdas.
struct SweepSeries {
  std::vector<SweepRecord> records;
  double gamma = 0.0;
  std::string descriptor;

  /// Throws ParameterError unless the lambdas increase strictly and the
  /// values are non-negative.
  void validate() const;
};

/// lambda0 * factor^i for i < count.
std::vector<double> geometric_lambdas(double lambda0, double factor, int count);

SweepSeries lambda_sweep(const BVFunction1D& f, const OpenDomain1D& omega, double gamma, double lambda0, double factor,
                         int count, double tol = 1e-8);

SweepSeries lambda_sweep(const BVFunctionND& f, double gamma, double lambda0, double factor, int count,
                         const NDOptions& options);

struct LiminfEstimate {
  double estimate = 0.0;
  std::size_t tail_count = 0;
  /// Tail values never decrease (respectively never increase).
  bool nondecreasing = false;
  bool nonincreasing = false;
  /// (v_last - v_prev) / |v_prev|; zero for a one-record tail.
  double last_relative_change = 0.0;
};

/// Minimum over the last ceil(tail_fraction * count) records.
LiminfEstimate liminf_estimate(const SweepSeries& series, double tail_fraction = 0.25);

struct GapReport {
  double bound = 0.0;
  double tail_min = 0.0;
  double margin = 0.0;
  double abs_cont_term = 0.0;
  double jump_term = 0.0;
  double cantor_term = 0.0;
};

/// Compares the tail minimum with C_n/gamma |D^a f| + C_n/(gamma+1) (|D^j f| + |D^c f|).
GapReport theorem_gap_report(const BVDecomposition& parts, int dimension, double gamma, const SweepSeries& series,
                             double tail_fraction = 0.25);
GapReport theorem_gap_report(const BVFunction1D& f, const OpenDomain1D& omega, double gamma,
                             const SweepSeries& series, double tail_fraction = 0.25);
GapReport theorem_gap_report(const BVFunctionND& f, double gamma, const SweepSeries& series,
                             double tail_fraction = 0.25);

struct CantorLevelReport {
  int level = 0;
  double alpha = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  /// (1 + 1/j) * 2 / (1 + gamma)
  double target = 0.0;
  int halvings = 0;
};

struct CantorExperiment {
  CantorSpec spec;
  SweepSeries series;
  std::vector<CantorLevelReport> levels;
};

/// Greedy construction of a sharp Cantor function: level j fixes
/// lambda_j = 2^(1+gamma-j) |I^(j-1)|^(-1-gamma) and halves alpha_j from
/// alpha_start until F(lambda_j) plus its error estimate is within the level
/// target. The reported values are recomputed with the final spec.
CantorExperiment cantor_sharpness_experiment(double gamma, int jmax, double alpha_start = 1.0 / 20.0,
                                             double tol = 1e-6);

}  // namespace nltv
