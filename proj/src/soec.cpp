#include "slevel/soec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

double Component::exact(std::span<const double> x, std::span<double> grad) const {
  const auto n = support_size();
  if (!n || uniforms_per_draw() != 1) {
    throw Unsupported("component has no exact evaluator");
  }
  Vector u(*n);
  for (std::size_t j = 0; j < *n; ++j) {
    u[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(*n);
  }
  if (!grad.empty()) return sample(x, u, *n, grad);
  Vector scratch(x.size());
  return sample(x, u, *n, scratch);
}

SoecProblem::SoecProblem(SoecProblemParts parts) : p_(std::move(parts)) {
  if (p_.components.size() != p_.thresholds.size() + 1) {
    throw InvalidArgument("need exactly one component per threshold plus the objective");
  }
  if (p_.thresholds.empty()) throw InvalidArgument("at least one constraint is required");
  for (const auto& c : p_.components) {
    if (!c) throw InvalidArgument("null component");
  }
  if (!(p_.data_size > 0.0)) throw InvalidArgument("data size must be positive");
  if (!p_.initial_point.empty() && !p_.domain.contains(p_.initial_point, 1e-9)) {
    throw InvalidArgument("initial point lies outside the domain");
  }
}

bool SoecProblem::has_exact() const {
  return std::all_of(p_.components.begin(), p_.components.end(),
                     [](const ComponentPtr& c) { return c->has_exact(); });
}

double to_open_uniform(std::uint64_t word) {
  // The top word would round to exactly 1; clamp to the largest double below it.
  return std::min((static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53, 0x1.fffffffffffffp-1);
}

ScenarioSource::ScenarioSource(std::uint64_t seed, std::size_t components,
                               StreamPurpose purpose)
    : consumed_(components, 0) {
  engines_.reserve(components);
  for (std::size_t i = 0; i < components; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(purpose)};
    engines_.emplace_back(seq);
  }
}

void ScenarioSource::fill(std::size_t component, std::span<double> out) {
  auto& eng = engines_.at(component);
  for (double& u : out) u = to_open_uniform(eng());
  consumed_[component] += out.size();
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

void check_simplex(std::span<const double> y, std::size_t expected) {
  if (y.size() != expected) throw InvalidArgument("dual point has the wrong length");
  double s = 0.0;
  for (double v : y) {
    if (!(v >= -1e-12)) throw InvalidArgument("dual point has a negative component");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) {
    throw InvalidArgument("dual point is not on the simplex");
  }
}

}  // namespace

void sample_saddle_subgradient(const SaddleFunction& sf, std::span<const double> x,
                               std::span<const double> y, std::size_t batch,
                               ScenarioSource& source, SaddleSample& out) {
  const SoecProblem& p = *sf.problem;
  const std::size_t d = p.dimension();
  const std::size_t mc = p.num_constraints() + 1;
  if (batch == 0) throw InvalidArgument("batch size must be at least 1");
  if (!p.domain().contains(x, 1e-9)) throw InvalidArgument("primal point lies outside X");
  check_simplex(y, mc);

  out.grad_x.assign(d, 0.0);
  out.grad_y.assign(mc, 0.0);
  out.value = 0.0;
  Vector g(d);
  Vector u;
  for (std::size_t i = 0; i < mc; ++i) {
    const Component& c = p.component(i);
    u.resize(batch * c.uniforms_per_draw());
    source.fill(i, u);
    const double v = c.sample(x, u, batch, g);
    if (!std::isfinite(v) || !all_finite(g)) {
      throw NumericalError("non-finite sample from component " + std::to_string(i), i);
    }
    out.grad_y[i] = v - sf.shift(i);
    if (y[i] != 0.0) kernels::axpy(y[i], g, out.grad_x);
    out.scenarios += batch;
    out.points += static_cast<double>(batch * c.points_per_draw());
  }
  out.value = kernels::dot(y, out.grad_y);
}

ComponentValues evaluate_components(const SoecProblem& problem, std::span<const double> x,
                                    const EvalMode& mode) {
  const std::size_t mc = problem.num_constraints() + 1;
  ComponentValues res;
  res.values.resize(mc);
  if (std::holds_alternative<ExactMode>(mode)) {
    for (std::size_t i = 0; i < mc; ++i) {
      const Component& c = problem.component(i);
      if (!c.has_exact()) {
        throw Unsupported("exact evaluation requested but component " + std::to_string(i) +
                          " has no exact evaluator");
      }
      res.values[i] = c.exact(x, {});
    }
    return res;
  }
  const auto& saa = std::get<SaaMode>(mode);
  if (saa.samples == 0) throw InvalidArgument("SAA needs at least one sample");
  ScenarioSource src(saa.seed, mc, StreamPurpose::evaluation);
  Vector g(problem.dimension());
  Vector u;
  for (std::size_t i = 0; i < mc; ++i) {
    const Component& c = problem.component(i);
    u.resize(saa.samples * c.uniforms_per_draw());
    src.fill(i, u);
    res.values[i] = c.sample(x, u, saa.samples, g);
  }
  res.saa_samples = saa.samples;
  return res;
}

PEvaluation evaluate_p(const SoecProblem& problem, double r, std::span<const double> x,
                       const EvalMode& mode) {
  ComponentValues cv = evaluate_components(problem, x, mode);
  PEvaluation out{-std::numeric_limits<double>::infinity(), std::move(cv.values), cv.saa_samples};
  for (std::size_t i = 0; i < out.shifted.size(); ++i) {
    out.shifted[i] -= (i == 0 ? r : problem.thresholds()[i - 1]);
    out.value = std::max(out.value, out.shifted[i]);
  }
  return out;
}

namespace {

double p_exact(const SoecProblem& problem, double r, std::span<const double> x) {
  double best = problem.component(0).exact(x, {}) - r;
  for (std::size_t i = 1; i <= problem.num_constraints(); ++i) {
    best = std::max(best, problem.component(i).exact(x, {}) - problem.thresholds()[i - 1]);
  }
  return best;
}

// Largest t in [0, span] with base + t * dir_k feasible, assuming t = 0 is.
double feasible_reach(const DomainSpec& dom, Vector base, std::size_t k, double sign,
                      double span) {
  const double x0 = base[k];
  base[k] = x0 + sign * span;
  if (dom.contains(base, 0.0)) return span;
  double lo = 0.0;
  double hi = span;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    base[k] = x0 + sign * mid;
    if (dom.contains(base, 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

GridResult evaluate_h_grid(const SoecProblem& problem, double r, std::size_t resolution) {
  const std::size_t d = problem.dimension();
  if (d > 3) throw Unsupported("grid evaluation of H needs dimension <= 3");
  if (resolution < 101) throw InvalidArgument("grid resolution must be at least 101 per axis");
  if (!problem.has_exact()) throw Unsupported("grid evaluation of H needs an exact evaluator");
  const DomainSpec& dom = problem.domain();
  if (!dom.bounded()) throw Unsupported("grid evaluation of H needs a bounded domain");
  const Box bb = dom.bounding_box();

  Vector step(d);
  for (std::size_t k = 0; k < d; ++k) {
    step[k] = (bb.upper[k] - bb.lower[k]) / static_cast<double>(resolution - 1);
  }

  GridResult best{std::numeric_limits<double>::infinity(), Vector(d)};
  Vector x(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= resolution;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t idx = rem % resolution;
      rem /= resolution;
      x[k] = idx + 1 == resolution ? bb.upper[k] : bb.lower[k] + static_cast<double>(idx) * step[k];
    }
    if (!dom.contains(x, 0.0)) continue;
    const double v = p_exact(problem, r, x);
    if (v < best.value) {
      best.value = v;
      best.argmin = x;
    }
  }
  if (!std::isfinite(best.value)) throw Error("no grid point fell inside the domain");

  // Golden-section refinement, one axis at a time, within one grid cell.
  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t k = 0; k < d; ++k) {
    if (step[k] == 0.0) continue;
    const double up = feasible_reach(dom, best.argmin, k, 1.0, step[k]);
    const double down = feasible_reach(dom, best.argmin, k, -1.0, step[k]);
    double a = best.argmin[k] - down;
    double b = best.argmin[k] + up;
    Vector probe = best.argmin;
    auto f = [&](double t) {
      probe[k] = t;
      return p_exact(problem, r, probe);
    };
    double c1 = b - kInvPhi * (b - a);
    double c2 = a + kInvPhi * (b - a);
    double f1 = f(c1);
    double f2 = f(c2);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (f1 <= f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - kInvPhi * (b - a);
        f1 = f(c1);
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + kInvPhi * (b - a);
        f2 = f(c2);
      }
    }
    const double t = f1 <= f2 ? c1 : c2;
    const double ft = std::min(f1, f2);
    if (ft < best.value) {
      best.value = ft;
      best.argmin[k] = t;
    }
  }
  return best;
}

EvalMode metrics_mode(const SoecProblem& problem, const EvalPolicy& policy) {
  if (problem.has_exact()) return ExactMode{};
  return SaaMode{policy.saa_samples, policy.seed};
}

double relative_gap(double objective, double fstar, double objective_at_start) {
  return (objective - fstar) / (objective_at_start - fstar);
}

QualityMetrics compute_metrics(const SoecProblem& problem, std::span<const double> x,
                               const MetricReferences& refs, double data_passes,
                               const EvalPolicy& policy) {
  const ComponentValues cv = evaluate_components(problem, x, metrics_mode(problem, policy));
  QualityMetrics m;
  m.objective = problem.objective_sign() * cv.values[0];
  m.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < cv.values.size(); ++i) {
    m.max_violation = std::max(m.max_violation, cv.values[i] - problem.thresholds()[i - 1]);
  }
  if (refs.fstar && refs.objective_at_start) {
    m.relative_gap = relative_gap(m.objective, *refs.fstar, *refs.objective_at_start);
  }
  m.data_passes = data_passes;
  m.saa_samples = cv.saa_samples;
  return m;
}

}  // namespace slevel
