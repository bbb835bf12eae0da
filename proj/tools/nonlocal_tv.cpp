// nonlocal-tv: command-line front end for the nltv library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nltv/asymptotics.hpp"
#include "nltv/errors.hpp"
#include "nltv/function_json.hpp"
#include "nltv/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nltv;

constexpr int kExitCheckFailed = 1;
constexpr int kExitSpec = 2;
constexpr int kExitNumerical = 3;

// Raised when a computed record carries a numerical flag.
struct FlaggedRecord : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string f;
  std::string spec_file;
  double gamma = 1.0;
  double lambda = 1.0;
  double lambda0 = 1.0;
  double factor = 10.0;
  int count = 7;
  double tol = 1e-8;
  std::size_t max_panels = std::size_t{1} << 20;
  std::uint64_t seed = 0;
  std::uint64_t samples = 1000000;
  int directions = 4096;
  int offsets = 64;
  bool oracle = false;
  std::string output;
  std::string format = "csv";
  int jmax = 8;
  double alpha_start = 1.0 / 20.0;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Doubles are emitted as %.17g strings would be by CSV, but as JSON numbers;
// non-finite values become null.
ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

FunctionSpec load_spec(const RunConfig& cfg) {
  if (!cfg.f.empty() && !cfg.spec_file.empty()) throw SpecError("--f", "give either --f or --spec-file, not both");
  if (!cfg.spec_file.empty()) {
    std::ifstream in(cfg.spec_file);
    if (!in) throw SpecError(cfg.spec_file, "cannot read spec file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_function_spec(ss.str());
  }
  if (cfg.f.empty()) throw SpecError("--f", "a function spec is required");
  return parse_function_spec(cfg.f);
}

NDOptions nd_options(const RunConfig& cfg) {
  NDOptions o;
  o.directions = cfg.directions;
  o.offsets = cfg.offsets;
  o.seed = cfg.seed;
  return o;
}

void require_converged(bool converged, const std::string& record) {
  if (!converged) throw FlaggedRecord("not converged: " + record);
}

struct Emitted {
  std::string csv;
  ordered_json json;
};

FunctionalOptions functional_options(const RunConfig& cfg) {
  FunctionalOptions o;
  o.rel_tol = cfg.tol;
  o.max_panels = cfg.max_panels;
  return o;
}

Emitted run_eval(const RunConfig& cfg) {
  const auto spec = load_spec(cfg);
  const FunctionalValue v = std::holds_alternative<BVFunction1D>(spec)
                                ? evaluate_functional_1d(std::get<BVFunction1D>(spec), std::get<BVFunction1D>(spec).domain(),
                                                         cfg.lambda, cfg.gamma, functional_options(cfg))
                                : evaluate_functional_nd(std::get<BVFunctionND>(spec), cfg.lambda, cfg.gamma, nd_options(cfg));
  Emitted out;
  out.csv = "lambda,gamma,value,error,converged\n" + num(v.lambda) + "," + num(v.gamma) + "," + num(v.value) + "," +
            num(v.error_estimate) + "," + (v.converged ? "1" : "0") + "\n";
  out.json = {{"lambda", jnum(v.lambda)}, {"gamma", jnum(v.gamma)},          {"value", jnum(v.value)},
              {"error", jnum(v.error_estimate)}, {"converged", v.converged}, {"cantor_depth", v.cantor_depth}};
  require_converged(v.converged, "lambda=" + num(v.lambda) + " value=" + num(v.value));
  return out;
}

Emitted run_sweep(const RunConfig& cfg) {
  const auto spec = load_spec(cfg);
  SweepSeries series;
  GapReport gap;
  bool has_bound = true;
  if (const auto* f = std::get_if<BVFunction1D>(&spec)) {
    series = lambda_sweep(*f, f->domain(), cfg.gamma, cfg.lambda0, cfg.factor, cfg.count, cfg.tol);
    gap = theorem_gap_report(*f, f->domain(), cfg.gamma, series);
  } else {
    const auto& g = std::get<BVFunctionND>(spec);
    series = lambda_sweep(g, cfg.gamma, cfg.lambda0, cfg.factor, cfg.count, nd_options(cfg));
    try {
      gap = theorem_gap_report(g, cfg.gamma, series);
    } catch (const DomainError&) {
      // No closed-form derivative masses for this geometry.
      has_bound = false;
      gap.bound = std::nan("");
      gap.tail_min = liminf_estimate(series).estimate;
      gap.margin = std::nan("");
    }
  }
  series.validate();
  const auto lim = liminf_estimate(series);
  Emitted out;
  out.csv = "lambda,value,error,bound,margin\n";
  ordered_json records = ordered_json::array();
  for (const auto& r : series.records) {
    const double margin = r.value - gap.bound;
    out.csv += num(r.lambda) + "," + num(r.value) + "," + num(r.error_estimate) + "," + num(gap.bound) + "," +
               num(margin) + "\n";
    records.push_back({{"lambda", jnum(r.lambda)},
                       {"value", jnum(r.value)},
                       {"error", jnum(r.error_estimate)},
                       {"bound", jnum(gap.bound)},
                       {"margin", jnum(margin)},
                       {"converged", r.converged}});
  }
  out.json = {{"gamma", jnum(series.gamma)},
              {"descriptor", series.descriptor},
              {"records", records},
              {"liminf", {{"estimate", jnum(lim.estimate)},
                          {"tail_count", lim.tail_count},
                          {"nondecreasing", lim.nondecreasing},
                          {"nonincreasing", lim.nonincreasing},
                          {"last_relative_change", jnum(lim.last_relative_change)}}},
              {"gap", {{"bound", jnum(gap.bound)},
                       {"tail_min", jnum(gap.tail_min)},
                       {"margin", jnum(gap.margin)},
                       {"abs_cont_term", has_bound ? jnum(gap.abs_cont_term) : ordered_json(nullptr)},
                       {"jump_term", has_bound ? jnum(gap.jump_term) : ordered_json(nullptr)},
                       {"cantor_term", has_bound ? jnum(gap.cantor_term) : ordered_json(nullptr)}}}};
  for (const auto& r : series.records) require_converged(r.converged, "lambda=" + num(r.lambda) + " value=" + num(r.value));
  return out;
}

Emitted run_cantor(const RunConfig& cfg, bool tol_given) {
  const auto ex = cantor_sharpness_experiment(cfg.gamma, cfg.jmax, cfg.alpha_start, tol_given ? cfg.tol : 1e-6);
  const auto lim = liminf_estimate(ex.series);
  Emitted out;
  out.csv = "level,alpha,lambda,value,error,target,halvings\n";
  ordered_json levels = ordered_json::array();
  for (const auto& l : ex.levels) {
    out.csv += std::to_string(l.level) + "," + num(l.alpha) + "," + num(l.lambda) + "," + num(l.value) + "," +
               num(l.error_estimate) + "," + num(l.target) + "," + std::to_string(l.halvings) + "\n";
    levels.push_back({{"level", l.level},
                      {"alpha", jnum(l.alpha)},
                      {"lambda", jnum(l.lambda)},
                      {"value", jnum(l.value)},
                      {"error", jnum(l.error_estimate)},
                      {"target", jnum(l.target)},
                      {"halvings", l.halvings}});
  }
  out.json = {{"gamma", jnum(cfg.gamma)},
              {"spec", ordered_json::parse(to_json(ex.spec))},
              {"levels", levels},
              {"liminf", jnum(lim.estimate)},
              {"bound", jnum(2.0 / (1.0 + cfg.gamma))}};
  for (const auto& r : ex.series.records) require_converged(r.converged, "lambda=" + num(r.lambda) + " value=" + num(r.value));
  return out;
}

Emitted run_slice_nd(const RunConfig& cfg) {
  const auto spec = load_spec(cfg);
  const auto* f = std::get_if<BVFunctionND>(&spec);
  if (!f) throw SpecError("f.type", "slice-nd needs a halfspace, radial or ridge function");
  const auto v = evaluate_functional_nd(*f, cfg.lambda, cfg.gamma, nd_options(cfg));
  Emitted out;
  out.csv = "method,lambda,gamma,value,error\nslicing," + num(cfg.lambda) + "," + num(cfg.gamma) + "," + num(v.value) +
            "," + num(v.error_estimate) + "\n";
  out.json = {{"lambda", jnum(cfg.lambda)},
              {"gamma", jnum(cfg.gamma)},
              {"slicing", {{"value", jnum(v.value)}, {"error", jnum(v.error_estimate)}, {"converged", v.converged}}}};
  if (cfg.oracle) {
    const auto mc = direct_mc_oracle(*f, cfg.lambda, cfg.gamma, cfg.samples, cfg.seed);
    out.csv += "oracle," + num(cfg.lambda) + "," + num(cfg.gamma) + "," + num(mc.value) + "," + num(mc.error_estimate) + "\n";
    out.json["oracle"] = {{"value", jnum(mc.value)}, {"error", jnum(mc.error_estimate)}, {"samples", cfg.samples}};
  }
  require_converged(v.converged, "slicing lambda=" + num(cfg.lambda) + " value=" + num(v.value));
  return out;
}

Emitted run_constants() {
  Emitted out;
  out.csv = "n,closed_form,quadrature\n";
  out.json = ordered_json::array();
  for (int n = 1; n <= 5; ++n) {
    const double a = sphere_constant(n);
    const double b = sphere_constant(n, SphereMethod::Quadrature);
    out.csv += std::to_string(n) + "," + num(a) + "," + num(b) + "\n";
    out.json.push_back({{"n", n}, {"closed_form", jnum(a)}, {"quadrature", jnum(b)}});
  }
  return out;
}

void write(const RunConfig& cfg, const Emitted& e) {
  const std::string text = cfg.format == "json" ? e.json.dump(2) + "\n" : e.csv;
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + cfg.output);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-local approximation of total variation: evaluation, sweeps and experiments"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--f", cfg.f, "Function description as inline JSON");
    sub->add_option("--spec-file", cfg.spec_file, "Path of a JSON function description");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "Write results here instead of stdout");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_nd = [&](CLI::App* sub) {
    sub->add_option("--directions", cfg.directions, "Slicing directions")->check(CLI::PositiveNumber);
    sub->add_option("--offsets", cfg.offsets, "Line offsets per direction")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
  };
  const auto positive = CLI::PositiveNumber;

  auto* eval = app.add_subcommand("eval", "Single value of F with error estimate");
  add_spec(eval);
  eval->add_option("--gamma", cfg.gamma, "Kernel exponent")->check(positive);
  eval->add_option("--lambda", cfg.lambda, "Threshold scale")->check(positive);
  eval->add_option("--tol", cfg.tol, "Relative tolerance")->check(positive);
  eval->add_option("--max-panels", cfg.max_panels, "Quadrature panel budget for 1-D functions")
      ->check(CLI::PositiveNumber);
  add_nd(eval);
  add_output(eval);

  auto* sweep = app.add_subcommand("sweep", "Geometric lambda sweep with the lower-bound gap report");
  add_spec(sweep);
  sweep->add_option("--gamma", cfg.gamma, "Kernel exponent")->check(positive);
  sweep->add_option("--lambda0", cfg.lambda0, "First lambda")->check(positive);
  sweep->add_option("--factor", cfg.factor, "Ratio between lambdas")->check(CLI::Range(1.0, 1e300));
  sweep->add_option("--count", cfg.count, "Number of lambdas")->check(CLI::Range(2, 1000000));
  sweep->add_option("--tol", cfg.tol, "Relative tolerance")->check(positive);
  add_nd(sweep);
  add_output(sweep);

  auto* cantor = app.add_subcommand("cantor", "Sharp Cantor construction, one row per level");
  cantor->add_option("--gamma", cfg.gamma, "Kernel exponent")->check(positive);
  cantor->add_option("--jmax", cfg.jmax, "Number of levels")->check(CLI::Range(1, 60));
  cantor->add_option("--alpha-start", cfg.alpha_start, "Initial gap ratio, at most 1/20")->check(positive);
  auto* cantor_tol = cantor->add_option("--tol", cfg.tol, "Relative tolerance (default 1e-6)")->check(positive);
  add_output(cantor);

  auto* slice = app.add_subcommand("slice-nd", "Directional slicing estimate of an n-dimensional function");
  add_spec(slice);
  slice->add_option("--gamma", cfg.gamma, "Kernel exponent")->check(positive);
  slice->add_option("--lambda", cfg.lambda, "Threshold scale")->check(positive);
  slice->add_flag("--oracle", cfg.oracle, "Also run the direct Monte Carlo oracle");
  slice->add_option("--samples", cfg.samples, "Oracle samples")->check(CLI::Range(std::uint64_t{1000}, UINT64_MAX));
  add_nd(slice);
  add_output(slice);

  auto* constants = app.add_subcommand("constants", "Sphere constants C_n for n = 1..5");
  add_output(constants);

  auto* verify = app.add_subcommand("verify", "Closed-form, oracle and property self-checks");
  verify->add_option("--seed", cfg.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSpec;
  }

  try {
    if (verify->parsed()) {
      bool all = true;
      for (const auto& r : run_self_checks(cfg.seed)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
      }
      return all ? 0 : kExitCheckFailed;
    }
    Emitted e;
    try {
      if (eval->parsed()) e = run_eval(cfg);
      if (sweep->parsed()) e = run_sweep(cfg);
      if (cantor->parsed()) e = run_cantor(cfg, cantor_tol->count() > 0);
      if (slice->parsed()) e = run_slice_nd(cfg);
      if (constants->parsed()) e = run_constants();
    } catch (const FlaggedRecord& flagged) {
      // The computed values are still written so the flagged record can be inspected.
      std::cerr << "numerical flag: " << flagged.what() << "\n";
      return kExitNumerical;
    }
    write(cfg, e);
    return 0;
  } catch (const SpecError& e) {
    std::cerr << "spec error at " << e.what() << "\n";
    return kExitSpec;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitSpec;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitSpec;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
