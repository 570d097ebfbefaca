#pragma once

// Level-set outer loops. The stochastic method calls OVSMD once per level;
// the deterministic baseline uses full-data subgradient steps instead. The
// initial bound estimator and grid diagnostics for small problems sit here.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slevel/geometry.hpp"
#include "slevel/oracle.hpp"
#include "slevel/soec.hpp"

namespace slevel {

struct SflsConfig {
  double r0 = 0.0;
  double theta = 1.1;
  std::size_t outer_limit = 20;  // K
  OracleConfig oracle;
  double delta = 0.1;
  std::optional<double> eps_opt;      // halt once u_hat >= -eps_opt
  std::optional<double> pass_budget;  // stop once this many data passes are used
  MetricReferences refs;
  EvalPolicy eval;

  void validate() const;
};

struct TraceEntry {
  std::size_t outer = 0;
  double r = 0.0;
  double u_hat = 0.0;  // oracle value (P(r, x) for the deterministic baseline)
  std::optional<double> l_hat;
  Vector x;
  double delta_k = 0.0;
  QualityMetrics metrics;
  std::size_t grad_iters = 0;  // cumulative
  double data_passes = 0.0;    // cumulative
  double wall_ms = 0.0;        // cumulative
};

struct LevelTrace {
  std::vector<TraceEntry> entries;
  std::vector<std::string> warnings;
  bool halted = false;  // stopped by the eps_opt rule
};

double delta_at_iteration(double delta, std::size_t k);
double level_update(double r, double u_hat, double theta);

struct Tolerances {
  double eps_opt;
  double eps_a;
};
Tolerances derive_tolerances(double u_bar, double theta, double epsilon);

LevelTrace sfls_solve(const SoecProblem& problem, const GeometrySpec& geo,
                      const SflsConfig& config);

// Projected full-data subgradient descent on P(r, .) per outer step, then
// r <- r + P(r, x) / 2 with x the best point seen so far. Uses
// config.oracle.iterations inner steps and its step constant; the batch size
// is ignored. Each inner step costs two data passes (value and subgradient).
LevelTrace dfls_solve(const SoecProblem& problem, const GeometrySpec& geo,
                      const SflsConfig& config);

struct BoundEstimateConfig {
  double base_alpha = 0.5;
  std::size_t base_iterations = 100;  // OVSMD length at h = 0; x4 per halving
  std::size_t max_iterations = 20000;
  std::size_t max_halvings = 40;
};

struct BoundEstimate {
  double u_bar;
  std::size_t halvings;
  double alpha;
  double u_hat;
};

// Halving search for a certified negative upper bound on H(r0). Throws
// Error when the halving cap is reached, which signals r0 is not strictly
// above f*.
BoundEstimate estimate_initial_bound(const SaddleFunction& sf, const GeometrySpec& geo,
                                     const OracleConfig& oracle, double delta, double theta,
                                     const BoundEstimateConfig& cfg = {});

struct ConditionDiagnostics {
  double fstar;
  double h_r0;
  double beta_hat;
  std::size_t outer_bound;
};

// Bisection on grid H for f*, then beta = -H(r0) / (r0 - f*) and the outer
// iteration bound ceil((2 theta^2 / beta) ln(theta^2 / (beta eps))).
ConditionDiagnostics condition_diagnostics(const SoecProblem& problem, double r0,
                                           std::size_t resolution, double theta,
                                           double epsilon);

std::size_t outer_iteration_bound(double theta, double beta, double epsilon);

}  // namespace slevel
