#pragma once

// Problem builders. The analytic toys have a grid-computable H; the
// applications are the perishable inventory ALP and two constrained
// classification models.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "slevel/dataset.hpp"
#include "slevel/soec.hpp"

namespace slevel {

// ---------------------------------------------------------------- toys

enum class ToyVariant { one_d, two_d };

// one_d: X = [0, 2], f0 = x, f1 = 1 - x, r1 = 0, f* = 1.
// two_d: X = Ball(2), f0 = |x - (1, 1)|^2, f1 = x1 + x2, r1 = 1, f* = 1/2.
// noise > 0 adds mean-zero uniform(-noise, noise) terms to sampled values.
SoecProblem build_analytic_toy(ToyVariant variant, double noise = 0.0);

struct ToyFacts {
  double fstar;
  Vector xstar;
  double r0;           // level used by the tests, equal to f0(start)
  Vector start;        // a feasible point with f0(start) = r0
};
ToyFacts toy_facts(ToyVariant variant);

// ---------------------------------------------------------------- MDP / ALP

class TruncatedNormal {
 public:
  TruncatedNormal(double mean, double sd, double lo, double hi);
  double quantile(double u) const;  // u in [0, 1]
  double mean() const;
  // Mass and first moment of the distribution restricted to (a, b].
  std::array<double, 2> partial(double a, double b) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double mu_, sd_, lo_, hi_, clo_, chi_;
};

std::vector<double> sample_truncated_normal(double mean, double sd, double lo, double hi,
                                            std::uint64_t seed, std::size_t count);

struct PerishableMdpSpec {
  std::size_t lifetime = 2;   // I
  std::size_t lead_time = 2;  // J
  double max_order = 10.0;    // a-bar
  double backlog_floor = -10.0;
  double discount = 0.95;
  double c_p = 20.0;
  double c_l = 100.0;
  double c_d = 10.0;
  double c_h = 2.0;
  double c_b = 10.0;
  double demand_mean = 5.0;
  double demand_sd = 2.0;
  double demand_lo = 0.0;
  double demand_hi = 10.0;
  Vector s0{5.0, 0.0, 0.0};

  std::size_t state_dim() const { return lifetime + lead_time - 1; }
  TruncatedNormal demand() const {
    return {demand_mean, demand_sd, demand_lo, demand_hi};
  }
  void validate() const;
};

Vector mdp_transition(const PerishableMdpSpec& spec, std::span<const double> s, double a,
                      double demand);
// Stage cost averaged over the given demand draws.
double mdp_stage_cost(const PerishableMdpSpec& spec, std::span<const double> s, double a,
                      std::span<const double> demand);
// Stage cost with the expectation over demand taken in closed form.
double mdp_expected_cost(const PerishableMdpSpec& spec, std::span<const double> s, double a);

// Knots E[G], 25th percentile and median of the demand.
std::array<double, 3> demand_knots(const PerishableMdpSpec& spec);
// The 18 features for I = J = 2: [z0, z1, q1] then five hinges per knot.
Vector basis_features(std::span<const double> s, const std::array<double, 3>& knots);
inline constexpr std::size_t kNumBasis = 18;

struct AlpSpec {
  PerishableMdpSpec mdp;
  std::size_t samples = 500;  // m sampled state-action pairs
  std::uint64_t seed = 1;
  double tau_max = 3000.0;
  double weight_bound = 5.0;
  // > 0 freezes that many demand draws per constraint (finite SAA problem
  // with exact evaluation); 0 keeps fresh draws on every query.
  std::size_t frozen_demand = 0;
};

struct AlpInstance {
  SoecProblem problem;  // minimizes -(tau + theta^T phi(s0))
  std::vector<Vector> states;
  Vector actions;
  double tau_tilde;  // initial feasible point is (tau_tilde, 0)
};

AlpInstance build_alp(const AlpSpec& spec);

// ---------------------------------------------------------------- classification

struct MulticlassNpSpec {
  std::shared_ptr<const DatasetMatrix> data;
  double radius = 5.0;
};

// Class 0 (first seen) is the prioritized class. Variables are one linear
// model per class stacked in class order.
SoecProblem build_np_multiclass(const MulticlassNpSpec& spec);

struct FairnessSpec {
  std::shared_ptr<const DatasetMatrix> labeled;  // positive label > 0
  std::shared_ptr<const DatasetMatrix> group_m;
  std::shared_ptr<const DatasetMatrix> group_f;
  double kappa = 0.95;
  double radius = 5.0;
};

SoecProblem build_fairness(const FairnessSpec& spec);

// Isotropic Gaussian clusters, one per mean, labeled 1..K in order.
DatasetMatrix make_gaussian_classes(std::uint64_t seed, const std::vector<Vector>& means,
                                    double sd, const std::vector<std::size_t>& counts);

}  // namespace slevel
