#pragma once

// Expectation-constrained convex programs
//
//   min f0(x)  s.t.  f_i(x) <= r_i (i = 1..m),  x in X,   f_i(x) = E[F_i(x, xi_i)]
//
// together with their saddle form Phi(x, y) = sum_i y_i (F_i - r_i) over the
// (m+1)-simplex, and the evaluation helpers shared by every solver.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slevel/domain.hpp"

namespace slevel {

// One of f0, f1, ..., fm. A scenario draw is described by a fixed number of
// uniforms in (0, 1); the component maps them to data rows or continuous
// random quantities. Implementations must be deterministic functions of
// (x, uniforms) so that runs are reproducible.
class Component {
 public:
  virtual ~Component() = default;

  virtual std::size_t uniforms_per_draw() const = 0;

  // Data points touched by one draw, for data-pass accounting.
  virtual std::size_t points_per_draw() const { return 1; }

  // Size n of a finite, uniformly weighted support, if any. Draw u maps to
  // support element floor(u * n).
  virtual std::optional<std::size_t> support_size() const { return std::nullopt; }

  // Batch mean of F(x, xi) over `count` draws and the matching batch-mean
  // subgradient written into `grad` (overwritten, length d).
  virtual double sample(std::span<const double> x, std::span<const double> uniforms,
                        std::size_t count, std::span<double> grad) const = 0;

  virtual bool has_exact() const { return support_size().has_value(); }

  // f(x) and a subgradient. `grad` may be empty when only the value is needed.
  // The default enumerates the finite support through sample(), so exact and
  // full-support SAA agree bit for bit.
  virtual double exact(std::span<const double> x, std::span<double> grad) const;
};

using ComponentPtr = std::shared_ptr<const Component>;

// Accumulates a batch mean in draw order. Batches above 1e4 terms use Kahan
// compensation; smaller ones are plain sequential sums.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(std::size_t count) : count_(count), kahan_(count > 10000) {}
  void add(double v) {
    if (kahan_) {
      const double yv = v - comp_;
      const double t = sum_ + yv;
      comp_ = (t - sum_) - yv;
      sum_ = t;
    } else {
      sum_ += v;
    }
  }
  double mean() const { return sum_ / static_cast<double>(count_); }

 private:
  std::size_t count_;
  bool kahan_;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SoecProblemParts {
  std::string name;
  DomainSpec domain;
  std::vector<ComponentPtr> components;  // f0 first, then the m constraints
  Vector thresholds;                     // r_1..r_m
  // Samples per data pass; 1 for continuous problems (passes = raw draws).
  double data_size = 1.0;
  // Reported objective = objective_sign * f0 (-1 for maximization problems).
  double objective_sign = 1.0;
  Vector initial_point;  // optional known feasible point
};

class SoecProblem {
 public:
  explicit SoecProblem(SoecProblemParts parts);

  const std::string& name() const { return p_.name; }
  std::size_t dimension() const { return p_.domain.dimension(); }
  std::size_t num_constraints() const { return p_.thresholds.size(); }
  const DomainSpec& domain() const { return p_.domain; }
  const Component& component(std::size_t i) const { return *p_.components[i]; }
  const Vector& thresholds() const { return p_.thresholds; }
  double data_size() const { return p_.data_size; }
  double objective_sign() const { return p_.objective_sign; }
  const Vector& initial_point() const { return p_.initial_point; }
  bool has_exact() const;

 private:
  SoecProblemParts p_;
};

enum class StreamPurpose : std::uint32_t { optimization = 0, evaluation = 1 };

// Independent uniform streams, one per component, derived from one seed.
class ScenarioSource {
 public:
  ScenarioSource(std::uint64_t seed, std::size_t components,
                 StreamPurpose purpose = StreamPurpose::optimization);

  void fill(std::size_t component, std::span<double> out);
  std::uint64_t draws(std::size_t component) const { return consumed_[component]; }

 private:
  std::vector<std::mt19937_64> engines_;
  std::vector<std::uint64_t> consumed_;
};

// Maps a 64-bit word to a uniform strictly inside (0, 1).
double to_open_uniform(std::uint64_t word);

// Phi at level r: shift for component 0 is r, for component i it is r_i.
struct SaddleFunction {
  const SoecProblem* problem;
  double level;

  double shift(std::size_t i) const {
    return i == 0 ? level : problem->thresholds()[i - 1];
  }
};

struct SaddleSample {
  double value = 0.0;  // Phi-hat = y^T grad_y
  Vector grad_x;
  Vector grad_y;  // batch-mean F_i - shift_i
  std::uint64_t scenarios = 0;
  double points = 0.0;
};

// Mini-batch stochastic subgradient of Phi at (x, y). Reuses out's buffers.
void sample_saddle_subgradient(const SaddleFunction& sf, std::span<const double> x,
                               std::span<const double> y, std::size_t batch,
                               ScenarioSource& source, SaddleSample& out);

struct ExactMode {};
struct SaaMode {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};
using EvalMode = std::variant<ExactMode, SaaMode>;

struct ComponentValues {
  Vector values;  // f_0..f_m (unshifted)
  std::optional<std::size_t> saa_samples;
};

ComponentValues evaluate_components(const SoecProblem& problem, std::span<const double> x,
                                    const EvalMode& mode);

struct PEvaluation {
  double value;
  Vector shifted;  // f_i - shift_i
  std::optional<std::size_t> saa_samples;
};

PEvaluation evaluate_p(const SoecProblem& problem, double r, std::span<const double> x,
                       const EvalMode& mode);

// Brute-force H(r) = min_X P(r, x) for d <= 3 using the exact evaluator:
// grid over the bounding box (points outside X skipped), then one
// golden-section pass per axis around the best grid point.
struct GridResult {
  double value;
  Vector argmin;
};
GridResult evaluate_h_grid(const SoecProblem& problem, double r, std::size_t resolution = 101);

struct QualityMetrics {
  double objective = 0.0;  // reported units (objective_sign applied)
  double max_violation = 0.0;
  std::optional<double> relative_gap;
  double data_passes = 0.0;
  std::optional<std::size_t> saa_samples;  // set when SAA was used
};

struct MetricReferences {
  std::optional<double> fstar;               // reported units
  std::optional<double> objective_at_start;  // reported units
};

struct EvalPolicy {
  std::size_t saa_samples = 10000;
  std::uint64_t seed = 0x5eed;
};

// Exact evaluation when the problem supports it, otherwise SAA on a fresh
// evaluation stream.
EvalMode metrics_mode(const SoecProblem& problem, const EvalPolicy& policy);

QualityMetrics compute_metrics(const SoecProblem& problem, std::span<const double> x,
                               const MetricReferences& refs, double data_passes,
                               const EvalPolicy& policy = {});

// Relative gap convention shared by metrics and tests.
double relative_gap(double objective, double fstar, double objective_at_start);

}  // namespace slevel
