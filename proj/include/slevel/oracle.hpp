#pragma once

// Stochastic oracles for H(r): plain stochastic mirror descent (reference,
// needs exact evaluation) and the online-validation variant that carries
// computable upper/lower bounds along the run.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "slevel/geometry.hpp"
#include "slevel/soec.hpp"

namespace slevel {

struct OracleConfig {
  std::size_t iterations = 1000;  // T
  double step_constant = 1.0;     // c in gamma_t = 1 / (c sqrt(t + 1))
  std::size_t batch = 1;
  double delta = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

double step_size(std::size_t t, double c);

// The running bounds, kept as two affine forms:
//   upper(y) = (const_u + lin_u^T y) / sum_gamma, maximized over the simplex
//   lower(x) = (const_l + lin_l^T x) / sum_gamma, minimized over X
class BoundAccumulators {
 public:
  BoundAccumulators(std::size_t d, std::size_t mc) : lin_u_(mc, 0.0), lin_l_(d, 0.0) {}

  void add(double gamma, double phi, std::span<const double> grad_x,
           std::span<const double> grad_y, std::span<const double> x,
           std::span<const double> y);

  double weight() const { return sum_gamma_; }
  double finalize_upper() const;
  double finalize_lower(const DomainSpec& domain) const;

 private:
  double sum_gamma_ = 0.0;
  double const_u_ = 0.0;
  Vector lin_u_;
  double const_l_ = 0.0;
  Vector lin_l_;
};

struct OracleReport {
  double upper = 0.0;
  std::optional<double> lower;
  Vector x_avg;
  Vector y_avg;
  std::size_t iterations = 0;
  std::uint64_t scenarios = 0;
  double points = 0.0;  // data points touched; divide by data_size for passes
};

// Per-iteration view handed to observers after step t has been folded into
// the averages and bounds (so t = 0 describes the one-term average).
struct StepView {
  std::size_t t;
  double upper;
  double lower;
  std::span<const double> x_avg;
};
using StepObserver = std::function<void(const StepView&)>;

// Projection of the origin, the minimizer of w_x over X.
Vector initial_primal(const DomainSpec& domain);

// Where the oracles start in x: the problem's known feasible point when it
// has one, otherwise initial_primal. The dual always starts uniform.
Vector start_point(const SoecProblem& problem);

OracleReport run_ovsmd(const SaddleFunction& sf, const GeometrySpec& geo,
                       const OracleConfig& cfg, ScenarioSource& source,
                       const StepObserver& observer = {});

// Same iterations without accumulators; the bound is U(x_avg) = P(r, x_avg)
// under exact evaluation.
OracleReport run_smd(const SaddleFunction& sf, const GeometrySpec& geo,
                     const OracleConfig& cfg, ScenarioSource& source);

struct ProbeEstimate {
  double mx;
  double my;
  double q;
  double m;  // M implied by the diameters
};

// Empirical stand-ins for the light-tail scales: 1.2 times the largest norm
// seen over `probes` single-scenario draws at the initial point.
ProbeEstimate estimate_constants(const SaddleFunction& sf, const GeometrySpec& geo,
                                 std::uint64_t seed, std::size_t probes = 200);

}  // namespace slevel
