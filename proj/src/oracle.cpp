#include "slevel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

void OracleConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("oracle needs at least one iteration");
  if (!(step_constant > 0.0) || !std::isfinite(step_constant)) {
    throw InvalidArgument("step constant must be positive");
  }
  if (batch < 1) throw InvalidArgument("batch size must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
}

double step_size(std::size_t t, double c) {
  return 1.0 / (c * std::sqrt(static_cast<double>(t) + 1.0));
}

void BoundAccumulators::add(double gamma, double phi, std::span<const double> grad_x,
                            std::span<const double> grad_y, std::span<const double> x,
                            std::span<const double> y) {
  sum_gamma_ += gamma;
  const_u_ += gamma * (phi - kernels::dot(grad_y, y));
  kernels::axpy(gamma, grad_y, lin_u_);
  const_l_ += gamma * (phi - kernels::dot(grad_x, x));
  kernels::axpy(gamma, grad_x, lin_l_);
}

double BoundAccumulators::finalize_upper() const {
  if (!(sum_gamma_ > 0.0)) throw Error("upper bound requested from an empty accumulator");
  return (const_u_ + *std::max_element(lin_u_.begin(), lin_u_.end())) / sum_gamma_;
}

double BoundAccumulators::finalize_lower(const DomainSpec& domain) const {
  if (!(sum_gamma_ > 0.0)) throw Error("lower bound requested from an empty accumulator");
  return (const_l_ + domain.min_linear(lin_l_)) / sum_gamma_;
}

Vector initial_primal(const DomainSpec& domain) {
  return project_primal(domain, Vector(domain.dimension(), 0.0));
}

Vector start_point(const SoecProblem& problem) {
  return problem.initial_point().empty() ? initial_primal(problem.domain())
                                         : problem.initial_point();
}

namespace {

struct Averages {
  Vector x_sum;
  Vector y_sum;
  double weight = 0.0;

  void add(double g, std::span<const double> x, std::span<const double> y) {
    kernels::axpy(g, x, x_sum);
    kernels::axpy(g, y, y_sum);
    weight += g;
  }
  Vector x() const {
    Vector out(x_sum);
    for (double& v : out) v /= weight;
    return out;
  }
  Vector y() const {
    Vector out(y_sum);
    for (double& v : out) v /= weight;
    return out;
  }
};

// Shared iterate loop of both oracles. `on_step` sees the sample and the
// current iterate before the prox step is taken.
template <class OnStep>
Averages mirror_descent(const SaddleFunction& sf, const GeometrySpec& geo,
                        const OracleConfig& cfg, ScenarioSource& source, OracleReport& rep,
                        OnStep&& on_step) {
  cfg.validate();
  const SoecProblem& p = *sf.problem;
  const std::size_t d = p.dimension();
  const std::size_t mc = p.num_constraints() + 1;
  Vector x = start_point(p);
  Vector y(mc, 1.0 / static_cast<double>(mc));
  Averages avg{Vector(d, 0.0), Vector(mc, 0.0)};
  SaddleSample s;
  Vector zeta_x(d);
  Vector zeta_y(mc);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    s.scenarios = 0;
    s.points = 0.0;
    sample_saddle_subgradient(sf, x, y, cfg.batch, source, s);
    rep.scenarios += s.scenarios;
    rep.points += s.points;
    const double g = step_size(t, cfg.step_constant);
    avg.add(g, x, y);
    on_step(t, g, s, x, y, avg);
    // G = (G_x, -G_y); the dual part ascends.
    for (std::size_t j = 0; j < d; ++j) zeta_x[j] = g * s.grad_x[j];
    for (std::size_t i = 0; i < mc; ++i) zeta_y[i] = -g * s.grad_y[i];
    ProductPoint z = prox_product(geo, p.domain(), x, y, zeta_x, zeta_y);
    for (double v : z.x) {
      if (!std::isfinite(v)) {
        throw NumericalError("non-finite iterate at iteration " + std::to_string(t), 0);
      }
    }
    if (!p.domain().contains(z.x, 1e-6)) {
      throw Error("internal: prox step left the domain at iteration " + std::to_string(t));
    }
    x = std::move(z.x);
    y = std::move(z.y);
  }
  rep.iterations = cfg.iterations;
  return avg;
}

}  // namespace

OracleReport run_ovsmd(const SaddleFunction& sf, const GeometrySpec& geo,
                       const OracleConfig& cfg, ScenarioSource& source,
                       const StepObserver& observer) {
  OracleReport rep;
  BoundAccumulators acc(sf.problem->dimension(), sf.problem->num_constraints() + 1);
  const DomainSpec& dom = sf.problem->domain();
  Averages avg = mirror_descent(
      sf, geo, cfg, source, rep,
      [&](std::size_t t, double g, const SaddleSample& s, const Vector& x, const Vector& y,
          const Averages& run) {
        acc.add(g, s.value, s.grad_x, s.grad_y, x, y);
        if (observer) {
          const Vector xa = run.x();
          observer(StepView{t, acc.finalize_upper(), acc.finalize_lower(dom), xa});
        }
      });
  rep.upper = acc.finalize_upper();
  rep.lower = acc.finalize_lower(dom);
  rep.x_avg = avg.x();
  rep.y_avg = avg.y();
  // Averaging can drift by rounding; pull back onto X.
  if (!dom.contains(rep.x_avg, 0.0)) rep.x_avg = project_primal(dom, rep.x_avg);
  return rep;
}

OracleReport run_smd(const SaddleFunction& sf, const GeometrySpec& geo,
                     const OracleConfig& cfg, ScenarioSource& source) {
  if (!sf.problem->has_exact()) {
    throw Unsupported("SMD needs an exact evaluator to compute U(x_avg)");
  }
  OracleReport rep;
  Averages avg = mirror_descent(sf, geo, cfg, source, rep,
                                [](std::size_t, double, const SaddleSample&, const Vector&,
                                   const Vector&, const Averages&) {});
  rep.x_avg = avg.x();
  rep.y_avg = avg.y();
  const DomainSpec& dom = sf.problem->domain();
  if (!dom.contains(rep.x_avg, 0.0)) rep.x_avg = project_primal(dom, rep.x_avg);
  rep.upper = evaluate_p(*sf.problem, sf.level, rep.x_avg, ExactMode{}).value;
  return rep;
}

ProbeEstimate estimate_constants(const SaddleFunction& sf, const GeometrySpec& geo,
                                 std::uint64_t seed, std::size_t probes) {
  const SoecProblem& p = *sf.problem;
  const std::size_t mc = p.num_constraints() + 1;
  const Vector x = start_point(p);
  ScenarioSource src(seed, mc, StreamPurpose::evaluation);
  Vector g(p.dimension());
  Vector u;
  double gx = 0.0;
  double gy = 0.0;
  // Phi-hat deviation: bound each component's spread around its probe mean;
  // with y on the simplex the combined deviation is at most the largest one.
  double dev = 0.0;
  for (std::size_t i = 0; i < mc; ++i) {
    const Component& c = p.component(i);
    std::vector<double> vals(probes);
    u.resize(c.uniforms_per_draw());
    for (std::size_t k = 0; k < probes; ++k) {
      src.fill(i, u);
      vals[k] = c.sample(x, u, 1, g);
      gx = std::max(gx, std::sqrt(kernels::dot(g, g)));
      gy = std::max(gy, std::abs(vals[k] - sf.shift(i)));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(probes);
    for (double v : vals) dev = std::max(dev, std::abs(v - mean));
  }
  ProbeEstimate e{1.2 * gx, 1.2 * gy, 1.2 * dev, 0.0};
  e.m = std::sqrt(2.0 * geo.dx * geo.dx * e.mx * e.mx + 2.0 * geo.dy * geo.dy * e.my * e.my);
  return e;
}

}  // namespace slevel
