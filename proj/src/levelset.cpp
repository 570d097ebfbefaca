#include "slevel/levelset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

void SflsConfig::validate() const {
  if (!(theta > 1.0)) throw InvalidArgument("theta must be greater than 1");
  if (!std::isfinite(r0)) throw InvalidArgument("r0 must be finite");
  if (outer_limit < 1) throw InvalidArgument("outer iteration limit must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (eps_opt && !(*eps_opt > 0.0)) throw InvalidArgument("eps_opt must be positive");
  oracle.validate();
}

double delta_at_iteration(double delta, std::size_t k) {
  return std::ldexp(delta, -static_cast<int>(k) - 1);
}

double level_update(double r, double u_hat, double theta) { return r + u_hat / (2.0 * theta); }

Tolerances derive_tolerances(double u_bar, double theta, double epsilon) {
  if (!(u_bar < 0.0)) {
    throw InvalidArgument("upper bound estimate must be negative; rerun the estimator");
  }
  if (!(theta > 1.0)) throw InvalidArgument("theta must be greater than 1");
  return {-u_bar * epsilon / theta,
          -(theta - 1.0) / (2.0 * theta * theta * (theta + 1.0)) * u_bar * epsilon};
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void note_positive_streak(LevelTrace& trace, std::size_t& streak, double u_hat) {
  streak = u_hat > 0.0 ? streak + 1 : 0;
  if (streak == 3) {
    trace.warnings.push_back("u_hat stayed positive for 3 consecutive outer iterations (ending at " +
                             std::to_string(trace.entries.back().outer) +
                             "); r is likely below f*");
  }
}

}  // namespace

LevelTrace sfls_solve(const SoecProblem& problem, const GeometrySpec& geo,
                      const SflsConfig& config) {
  config.validate();
  const auto start = Clock::now();
  LevelTrace trace;
  ScenarioSource source(config.oracle.seed, problem.num_constraints() + 1);
  double r = config.r0;
  std::size_t iters = 0;
  double passes = 0.0;
  std::size_t streak = 0;
  for (std::size_t k = 0; k < config.outer_limit; ++k) {
    OracleConfig oc = config.oracle;
    oc.delta = delta_at_iteration(config.delta, k);
    const SaddleFunction sf{&problem, r};
    OracleReport rep;
    try {
      rep = run_ovsmd(sf, geo, oc, source);
    } catch (const NumericalError& e) {
      throw NumericalError("outer iteration " + std::to_string(k) + ": " + e.what(),
                           e.component());
    } catch (const Error& e) {
      throw Error("outer iteration " + std::to_string(k) + ": " + e.what());
    }
    iters += rep.iterations;
    passes += rep.points / problem.data_size();

    TraceEntry e;
    e.outer = k;
    e.r = r;
    e.u_hat = rep.upper;
    e.l_hat = rep.lower;
    e.x = std::move(rep.x_avg);
    e.delta_k = oc.delta;
    e.metrics = compute_metrics(problem, e.x, config.refs, passes, config.eval);
    e.grad_iters = iters;
    e.data_passes = passes;
    e.wall_ms = ms_since(start);
    trace.entries.push_back(std::move(e));
    note_positive_streak(trace, streak, rep.upper);

    if (config.eps_opt && rep.upper >= -*config.eps_opt) {
      trace.halted = true;
      break;
    }
    if (config.pass_budget && passes >= *config.pass_budget) break;
    r = level_update(r, rep.upper, config.theta);
  }
  return trace;
}

LevelTrace dfls_solve(const SoecProblem& problem, const GeometrySpec& geo,
                      const SflsConfig& config) {
  config.validate();
  if (!problem.has_exact()) throw Unsupported("the deterministic baseline needs exact evaluation");
  const auto start = Clock::now();
  const DomainSpec& dom = problem.domain();
  const std::size_t d = problem.dimension();
  const std::size_t mc = problem.num_constraints() + 1;
  const double scale = 2.0 * geo.dx * geo.dx;

  // P(r, .) from cached component values f_0..f_m.
  auto level_value = [&](const Vector& vals, double r_now, std::size_t* active) {
    double p = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mc; ++i) {
      const double v = vals[i] - (i == 0 ? r_now : problem.thresholds()[i - 1]);
      // Strict comparison keeps the lowest index on ties.
      if (v > p) {
        p = v;
        if (active) *active = i;
      }
    }
    return p;
  };

  LevelTrace trace;
  Vector x = start_point(problem);
  double r = config.r0;
  std::size_t iters = 0;
  double passes = 0.0;
  std::size_t streak = 0;
  std::vector<Vector> grads(mc, Vector(d));
  Vector vals(mc);
  // The best point so far and its component values. Re-scoring it at a new
  // level needs no data, and after r <- r + P / 2 its P stays <= P / 2, so a
  // feasible best is never lost.
  Vector best;
  Vector best_vals;
  for (std::size_t k = 0; k < config.outer_limit; ++k) {
    double best_p = best.empty() ? std::numeric_limits<double>::infinity()
                                 : level_value(best_vals, r, nullptr);
    for (std::size_t t = 0; t < config.oracle.iterations; ++t) {
      for (std::size_t i = 0; i < mc; ++i) vals[i] = problem.component(i).exact(x, grads[i]);
      std::size_t active = 0;
      const double p = level_value(vals, r, &active);
      if (!std::isfinite(p)) {
        throw NumericalError("non-finite value in outer iteration " + std::to_string(k), active);
      }
      if (p < best_p) {
        best_p = p;
        best = x;
        best_vals = vals;
      }
      // The iterate and the step index both carry over between rounds; the
      // point after the last step is scored at the start of the next round.
      Vector moved = x;
      kernels::axpy(-scale * step_size(iters, config.oracle.step_constant), grads[active], moved);
      x = project_primal(dom, moved);
      ++iters;
      passes += 2.0;
    }

    TraceEntry e;
    e.outer = k;
    e.r = r;
    e.u_hat = best_p;
    e.x = best;
    e.delta_k = 0.0;
    e.metrics = compute_metrics(problem, best, config.refs, passes, config.eval);
    e.grad_iters = iters;
    e.data_passes = passes;
    e.wall_ms = ms_since(start);
    trace.entries.push_back(std::move(e));
    note_positive_streak(trace, streak, best_p);

    if (config.eps_opt && best_p >= -*config.eps_opt) {
      trace.halted = true;
      break;
    }
    if (config.pass_budget && passes >= *config.pass_budget) break;
    r += best_p / 2.0;
  }
  return trace;
}

BoundEstimate estimate_initial_bound(const SaddleFunction& sf, const GeometrySpec& geo,
                                     const OracleConfig& oracle, double delta, double theta,
                                     const BoundEstimateConfig& cfg) {
  if (!(cfg.base_alpha > 0.0)) throw InvalidArgument("base alpha must be positive");
  if (!(theta > 1.0)) throw InvalidArgument("theta must be greater than 1");
  ScenarioSource source(oracle.seed, sf.problem->num_constraints() + 1);
  std::size_t iters = cfg.base_iterations;
  for (std::size_t h = 0; h < cfg.max_halvings; ++h) {
    OracleConfig oc = oracle;
    oc.iterations = std::min(iters, cfg.max_iterations);
    oc.delta = std::ldexp(delta, -static_cast<int>(h) - 1);
    const double alpha = std::ldexp(cfg.base_alpha, -static_cast<int>(h));
    const OracleReport rep = run_ovsmd(sf, geo, oc, source);
    const double hi = rep.upper + alpha;
    if (hi < 0.0 && (rep.upper - alpha) / hi <= theta) {
      return {hi, h, alpha, rep.upper};
    }
    if (iters < cfg.max_iterations) iters *= 4;
  }
  throw Error("initial bound estimator hit the halving cap (" + std::to_string(cfg.max_halvings) +
              "); the level is not strictly above f*");
}

std::size_t outer_iteration_bound(double theta, double beta, double epsilon) {
  const double t2 = theta * theta;
  return static_cast<std::size_t>(std::ceil(2.0 * t2 / beta * std::log(t2 / (beta * epsilon))));
}

ConditionDiagnostics condition_diagnostics(const SoecProblem& problem, double r0,
                                           std::size_t resolution, double theta,
                                           double epsilon) {
  auto h = [&](double r) { return evaluate_h_grid(problem, r, resolution).value; };
  const double h0 = h(r0);
  if (!(h0 < 0.0)) throw Error("H(r0) is not negative; f* cannot be bracketed below r0");
  double width = std::max(1.0, std::abs(r0));
  double lo = r0 - width;
  int tries = 0;
  while (!(h(lo) > 0.0)) {
    width *= 2.0;
    lo = r0 - width;
    if (++tries > 60) throw Error("could not bracket the root of H below r0");
  }
  double hi = r0;
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double fstar = 0.5 * (lo + hi);
  const double beta = -h0 / (r0 - fstar);
  return {fstar, h0, beta, outer_iteration_bound(theta, beta, epsilon)};
}

}  // namespace slevel
