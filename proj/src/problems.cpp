#include "slevel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

namespace {

std::size_t pick(double u, std::size_t n) {
  return std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

// ------------------------------------------------------------------ toys

using SmoothFn = std::function<double(std::span<const double>, std::span<double>)>;

class ToyComponent final : public Component {
 public:
  ToyComponent(SmoothFn f, double noise) : f_(std::move(f)), noise_(noise) {}

  std::size_t uniforms_per_draw() const override { return 1; }
  bool has_exact() const override { return true; }

  double sample(std::span<const double> x, std::span<const double> u, std::size_t count,
                std::span<double> grad) const override {
    const double base = f_(x, grad);
    if (noise_ == 0.0) return base;
    MeanAccumulator acc(count);
    for (std::size_t j = 0; j < count; ++j) acc.add(noise_ * (2.0 * u[j] - 1.0));
    return base + acc.mean();
  }

  double exact(std::span<const double> x, std::span<double> grad) const override {
    if (!grad.empty()) return f_(x, grad);
    Vector scratch(x.size());
    return f_(x, scratch);
  }

 private:
  SmoothFn f_;
  double noise_;
};

}  // namespace

SoecProblem build_analytic_toy(ToyVariant variant, double noise) {
  if (!(noise >= 0.0)) throw InvalidArgument("noise amplitude must be nonnegative");
  if (variant == ToyVariant::one_d) {
    auto f0 = [](std::span<const double> x, std::span<double> g) {
      g[0] = 1.0;
      return x[0];
    };
    auto f1 = [](std::span<const double> x, std::span<double> g) {
      g[0] = -1.0;
      return 1.0 - x[0];
    };
    return SoecProblem(SoecProblemParts{
        .name = "toy1d",
        .domain = DomainSpec::box({0.0}, {2.0}),
        .components = {std::make_shared<ToyComponent>(f0, noise),
                       std::make_shared<ToyComponent>(f1, noise)},
        .thresholds = {0.0},
        .initial_point = {2.0},
    });
  }
  auto f0 = [](std::span<const double> x, std::span<double> g) {
    const double a = x[0] - 1.0;
    const double b = x[1] - 1.0;
    g[0] = 2.0 * a;
    g[1] = 2.0 * b;
    return a * a + b * b;
  };
  auto f1 = [](std::span<const double> x, std::span<double> g) {
    g[0] = 1.0;
    g[1] = 1.0;
    return x[0] + x[1];
  };
  return SoecProblem(SoecProblemParts{
      .name = "toy2d",
      .domain = DomainSpec::ball(2.0, std::size_t{2}),
      .components = {std::make_shared<ToyComponent>(f0, noise),
                     std::make_shared<ToyComponent>(f1, noise)},
      .thresholds = {1.0},
      .initial_point = {0.0, 0.0},
  });
}

ToyFacts toy_facts(ToyVariant variant) {
  if (variant == ToyVariant::one_d) return {1.0, {1.0}, 2.0, {2.0}};
  return {0.5, {0.5, 0.5}, 2.0, {0.0, 0.0}};
}

// ------------------------------------------------------------------ demand

TruncatedNormal::TruncatedNormal(double mean, double sd, double lo, double hi)
    : mu_(mean), sd_(sd), lo_(lo), hi_(hi) {
  if (!(sd > 0.0)) throw InvalidArgument("standard deviation must be positive");
  if (!(lo < hi)) throw InvalidArgument("truncation interval is empty");
  const boost::math::normal n(mean, sd);
  clo_ = boost::math::cdf(n, lo);
  chi_ = boost::math::cdf(n, hi);
  if (!(chi_ > clo_)) throw InvalidArgument("truncation interval carries no probability mass");
}

double TruncatedNormal::quantile(double u) const {
  if (u <= 0.0) return lo_;
  if (u >= 1.0) return hi_;
  const double p = clo_ + u * (chi_ - clo_);
  if (p <= 0.0) return lo_;
  if (p >= 1.0) return hi_;
  const boost::math::normal n(mu_, sd_);
  return std::clamp(boost::math::quantile(n, p), lo_, hi_);
}

double TruncatedNormal::mean() const {
  const auto pm = partial(lo_, hi_);
  return pm[1] / pm[0];
}

std::array<double, 2> TruncatedNormal::partial(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return {0.0, 0.0};
  const boost::math::normal std_normal;
  const double za = (a - mu_) / sd_;
  const double zb = (b - mu_) / sd_;
  const double z = chi_ - clo_;
  const double mass = (boost::math::cdf(std_normal, zb) - boost::math::cdf(std_normal, za)) / z;
  const double dens = (boost::math::pdf(std_normal, za) - boost::math::pdf(std_normal, zb)) / z;
  return {mass, mu_ * mass + sd_ * dens};
}

std::vector<double> sample_truncated_normal(double mean, double sd, double lo, double hi,
                                            std::uint64_t seed, std::size_t count) {
  const TruncatedNormal tn(mean, sd, lo, hi);
  auto eng = seeded_engine(seed, 0x7e);
  std::vector<double> out(count);
  for (double& v : out) v = tn.quantile(to_open_uniform(eng()));
  return out;
}

// ------------------------------------------------------------------ MDP

void PerishableMdpSpec::validate() const {
  if (lifetime < 2 || lead_time < 1) throw InvalidArgument("need lifetime >= 2 and lead time >= 1");
  if (!(backlog_floor < 0.0)) throw InvalidArgument("backlog floor must be negative");
  if (!(discount > 0.0 && discount < 1.0)) throw InvalidArgument("discount must lie in (0, 1)");
  if (!(max_order > 0.0)) throw InvalidArgument("max order must be positive");
  if (s0.size() != state_dim()) throw InvalidArgument("initial state has the wrong length");
  (void)demand();
}

Vector mdp_transition(const PerishableMdpSpec& spec, std::span<const double> s, double a,
                      double demand) {
  const std::size_t I = spec.lifetime;
  const std::size_t J = spec.lead_time;
  double older = 0.0;
  for (std::size_t i = 2; i < I; ++i) older += s[i];
  Vector next;
  next.reserve(I + J - 1);
  next.push_back(std::max(s[1] - std::max(demand - s[0], 0.0), spec.backlog_floor - older));
  for (std::size_t i = 2; i < I; ++i) next.push_back(s[i]);
  for (std::size_t j = 0; j + 1 < J; ++j) next.push_back(s[I + j]);
  next.push_back(a);
  return next;
}

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

double purchase_cost(const PerishableMdpSpec& spec, double a) {
  return std::pow(spec.discount, static_cast<double>(spec.lead_time)) * spec.c_p * a;
}

// Everything except the purchase cost, for one realized demand.
double demand_cost(const PerishableMdpSpec& spec, std::span<const double> s, double g) {
  double rest = 0.0;
  for (std::size_t i = 1; i < spec.lifetime; ++i) rest += s[i];
  const double total = s[0] + rest;
  return spec.c_h * pos(rest - pos(g - s[0])) + spec.c_b * pos(g - total) +
         spec.c_d * pos(s[0] - g) + spec.c_l * pos(spec.backlog_floor + g - total);
}

}  // namespace

double mdp_stage_cost(const PerishableMdpSpec& spec, std::span<const double> s, double a,
                      std::span<const double> demand) {
  if (demand.empty()) throw InvalidArgument("demand batch is empty");
  MeanAccumulator acc(demand.size());
  for (double g : demand) acc.add(demand_cost(spec, s, g));
  return purchase_cost(spec, a) + acc.mean();
}

double mdp_expected_cost(const PerishableMdpSpec& spec, std::span<const double> s, double a) {
  const TruncatedNormal tn = spec.demand();
  double rest = 0.0;
  for (std::size_t i = 1; i < spec.lifetime; ++i) rest += s[i];
  const double total = s[0] + rest;
  // The demand cost is piecewise linear in g; integrate it piece by piece.
  std::vector<double> cuts{tn.lo(), tn.hi(), s[0], s[0] + rest, total, total - spec.backlog_floor};
  std::sort(cuts.begin(), cuts.end());
  double e = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = std::max(cuts[k], tn.lo());
    const double hi = std::min(cuts[k + 1], tn.hi());
    if (!(hi > lo)) continue;
    const double g1 = lo + (hi - lo) / 3.0;
    const double g2 = lo + 2.0 * (hi - lo) / 3.0;
    const double h1 = demand_cost(spec, s, g1);
    const double h2 = demand_cost(spec, s, g2);
    const double slope = (h2 - h1) / (g2 - g1);
    const double icpt = h1 - slope * g1;
    const auto pm = tn.partial(lo, hi);
    e += icpt * pm[0] + slope * pm[1];
  }
  return purchase_cost(spec, a) + e;
}

std::array<double, 3> demand_knots(const PerishableMdpSpec& spec) {
  const TruncatedNormal tn = spec.demand();
  return {tn.mean(), tn.quantile(0.25), tn.quantile(0.5)};
}

Vector basis_features(std::span<const double> s, const std::array<double, 3>& knots) {
  if (s.size() != 3) throw InvalidArgument("basis features are defined for I = J = 2");
  const double z0 = s[0];
  const double z1 = s[1];
  const double q1 = s[2];
  Vector phi{z0, z1, q1};
  phi.reserve(kNumBasis);
  for (double nu : knots) {
    phi.push_back(pos(z0 - nu));
    phi.push_back(pos(z0 + z1 - 2.0 * nu));
    phi.push_back(pos(z0 + z1 + q1 - 3.0 * nu));
    phi.push_back(pos(2.0 * nu - z0 - z1 - q1));
    phi.push_back(pos(nu - z1 - q1));
  }
  return phi;
}

namespace {

class LinearComponent final : public Component {
 public:
  explicit LinearComponent(Vector coef) : coef_(std::move(coef)) {}
  std::size_t uniforms_per_draw() const override { return 0; }
  bool has_exact() const override { return true; }
  double sample(std::span<const double> x, std::span<const double>, std::size_t,
                std::span<double> grad) const override {
    return exact(x, grad);
  }
  double exact(std::span<const double> x, std::span<double> grad) const override {
    if (!grad.empty()) std::copy(coef_.begin(), coef_.end(), grad.begin());
    return kernels::dot(coef_, x);
  }

 private:
  Vector coef_;
};

// (1 - gamma) tau + theta^T (phi(s) - gamma phi(f(s, a, G))) - C(s, a, G)
class AlpConstraint final : public Component {
 public:
  AlpConstraint(const PerishableMdpSpec& spec, Vector s, double a, std::array<double, 3> knots,
                std::vector<double> frozen)
      : spec_(spec), tn_(spec.demand()), s_(std::move(s)), a_(a), knots_(knots),
        phi_s_(basis_features(s_, knots_)), frozen_(std::move(frozen)) {}

  std::size_t uniforms_per_draw() const override { return 1; }
  std::optional<std::size_t> support_size() const override {
    if (frozen_.empty()) return std::nullopt;
    return frozen_.size();
  }

  double sample(std::span<const double> x, std::span<const double> u, std::size_t count,
                std::span<double> grad) const override {
    std::vector<MeanAccumulator> phi_next(kNumBasis, MeanAccumulator(count));
    MeanAccumulator cost(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double g = frozen_.empty() ? tn_.quantile(u[j]) : frozen_[pick(u[j], frozen_.size())];
      const Vector next = mdp_transition(spec_, s_, a_, g);
      const Vector phi = basis_features(next, knots_);
      for (std::size_t b = 0; b < kNumBasis; ++b) phi_next[b].add(phi[b]);
      cost.add(demand_cost(spec_, s_, g));
    }
    const double gamma = spec_.discount;
    grad[0] = 1.0 - gamma;
    double v = (1.0 - gamma) * x[0];
    for (std::size_t b = 0; b < kNumBasis; ++b) {
      grad[b + 1] = phi_s_[b] - gamma * phi_next[b].mean();
      v += x[b + 1] * grad[b + 1];
    }
    return v - purchase_cost(spec_, a_) - cost.mean();
  }

 private:
  PerishableMdpSpec spec_;
  TruncatedNormal tn_;
  Vector s_;
  double a_;
  std::array<double, 3> knots_;
  Vector phi_s_;
  std::vector<double> frozen_;
};

}  // namespace

AlpInstance build_alp(const AlpSpec& spec) {
  spec.mdp.validate();
  if (spec.samples == 0) throw InvalidArgument("ALP needs at least one sampled state-action pair");
  if (spec.mdp.lifetime != 2 || spec.mdp.lead_time != 2) {
    throw Unsupported("the ALP basis is defined for lifetime 2 and lead time 2");
  }
  const auto& mdp = spec.mdp;
  const auto knots = demand_knots(mdp);
  auto eng = seeded_engine(spec.seed, 0xa1);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * to_open_uniform(eng()); };

  std::vector<Vector> states;
  Vector actions;
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.samples; ++i) {
    Vector s(mdp.state_dim());
    s[0] = uni(mdp.backlog_floor, mdp.max_order);
    for (std::size_t k = 1; k < s.size(); ++k) s[k] = uni(0.0, mdp.max_order);
    const double a = uni(0.0, mdp.max_order);
    min_cost = std::min(min_cost, mdp_expected_cost(mdp, s, a));
    states.push_back(std::move(s));
    actions.push_back(a);
  }
  const double tau_tilde = min_cost / (1.0 - mdp.discount);
  if (!(tau_tilde >= 0.0 && tau_tilde <= spec.tau_max)) {
    throw InvalidArgument("initial intercept falls outside [0, tau_max]");
  }

  const std::size_t d = kNumBasis + 1;
  Vector obj(d);
  obj[0] = -1.0;
  const Vector phi0 = basis_features(mdp.s0, knots);
  for (std::size_t b = 0; b < kNumBasis; ++b) obj[b + 1] = -phi0[b];

  std::vector<ComponentPtr> comps{std::make_shared<LinearComponent>(obj)};
  for (std::size_t i = 0; i < spec.samples; ++i) {
    std::vector<double> frozen;
    if (spec.frozen_demand > 0) {
      frozen = sample_truncated_normal(mdp.demand_mean, mdp.demand_sd, mdp.demand_lo,
                                       mdp.demand_hi, spec.seed * 1000003ULL + i,
                                       spec.frozen_demand);
    }
    comps.push_back(std::make_shared<AlpConstraint>(mdp, states[i], actions[i], knots,
                                                    std::move(frozen)));
  }
  Vector lower(d, -spec.weight_bound);
  Vector upper(d, spec.weight_bound);
  lower[0] = 0.0;
  upper[0] = spec.tau_max;
  Vector start(d, 0.0);
  start[0] = tau_tilde;
  SoecProblem problem(SoecProblemParts{
      .name = "alp",
      .domain = DomainSpec::box(std::move(lower), std::move(upper)),
      .components = std::move(comps),
      .thresholds = Vector(spec.samples, 0.0),
      .data_size = 1.0,
      .objective_sign = -1.0,
      .initial_point = std::move(start),
  });
  return AlpInstance{std::move(problem), std::move(states), std::move(actions), tau_tilde};
}

// ------------------------------------------------------------------ classification

namespace {

using DataPtr = std::shared_ptr<const DatasetMatrix>;

// Class c's pairwise hinge sum over the other models, one row per draw.
class NpComponent final : public Component {
 public:
  NpComponent(DataPtr data, std::vector<std::size_t> rows, std::size_t cls, std::size_t classes)
      : data_(std::move(data)), rows_(std::move(rows)), cls_(cls), classes_(classes),
        p_(data_->feature_dim()) {}

  std::size_t uniforms_per_draw() const override { return 1; }
  std::optional<std::size_t> support_size() const override { return rows_.size(); }

  double sample(std::span<const double> x, std::span<const double> u, std::size_t count,
                std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    MeanAccumulator acc(count);
    const double w = 1.0 / static_cast<double>(count);
    Vector score(classes_);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t r = rows_[pick(u[j], rows_.size())];
      const auto idx = data_->row_indices(r);
      const auto val = data_->row_values(r);
      for (std::size_t k = 0; k < classes_; ++k) {
        score[k] = kernels::sparse_dot(idx, val, x.subspan(k * p_, p_), 1);
      }
      double v = 0.0;
      for (std::size_t l = 0; l < classes_; ++l) {
        if (l == cls_) continue;
        const double h = 1.0 - (score[cls_] - score[l]);
        if (h > 0.0) {
          v += h;
          kernels::sparse_axpy(-w, idx, val, grad.subspan(cls_ * p_, p_), 1);
          kernels::sparse_axpy(w, idx, val, grad.subspan(l * p_, p_), 1);
        }
      }
      acc.add(v);
    }
    return acc.mean();
  }

 private:
  DataPtr data_;
  std::vector<std::size_t> rows_;
  std::size_t cls_;
  std::size_t classes_;
  std::size_t p_;
};

double sign_of_label(const DatasetMatrix& d, std::size_t r) {
  return d.original_label(d.label(r)) > 0.0 ? 1.0 : -1.0;
}

class HingeObjective final : public Component {
 public:
  explicit HingeObjective(DataPtr data) : data_(std::move(data)) {}
  std::size_t uniforms_per_draw() const override { return 1; }
  std::optional<std::size_t> support_size() const override { return data_->rows(); }

  double sample(std::span<const double> x, std::span<const double> u, std::size_t count,
                std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    MeanAccumulator acc(count);
    const double w = 1.0 / static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t r = pick(u[j], data_->rows());
      const auto idx = data_->row_indices(r);
      const auto val = data_->row_values(r);
      const double b = sign_of_label(*data_, r);
      const double h = 1.0 - b * kernels::sparse_dot(idx, val, x, 1);
      if (h > 0.0) {
        acc.add(h);
        kernels::sparse_axpy(-b * w, idx, val, grad, 1);
      } else {
        acc.add(0.0);
      }
    }
    return acc.mean();
  }

 private:
  DataPtr data_;
};

// mean_first (a^T x + 0.5)_+ + (1/kappa) mean_second (-a^T x + 0.5)_+
class FairnessConstraint final : public Component {
 public:
  FairnessConstraint(DataPtr first, DataPtr second, double kappa)
      : first_(std::move(first)), second_(std::move(second)), inv_kappa_(1.0 / kappa) {}

  std::size_t uniforms_per_draw() const override { return 2; }
  std::size_t points_per_draw() const override { return 2; }
  bool has_exact() const override { return true; }

  double sample(std::span<const double> x, std::span<const double> u, std::size_t count,
                std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    MeanAccumulator acc(count);
    const double w = 1.0 / static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double v1 = term(*first_, pick(u[2 * j], first_->rows()), x, 1.0, w, grad);
      const double v2 = term(*second_, pick(u[2 * j + 1], second_->rows()), x, -1.0,
                             w * inv_kappa_, grad);
      acc.add(v1 + inv_kappa_ * v2);
    }
    return acc.mean();
  }

  double exact(std::span<const double> x, std::span<double> grad) const override {
    Vector scratch;
    if (grad.empty()) {
      scratch.assign(x.size(), 0.0);
      grad = scratch;
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double m1 = group_mean(*first_, x, 1.0, 1.0, grad);
    const double m2 = group_mean(*second_, x, -1.0, inv_kappa_, grad);
    return m1 + inv_kappa_ * m2;
  }

 private:
  // (sign * a^T x + 0.5)_+ for row r; adds weight * subgradient into grad.
  static double term(const DatasetMatrix& d, std::size_t r, std::span<const double> x,
                     double sign, double weight, std::span<double> grad) {
    const auto idx = d.row_indices(r);
    const auto val = d.row_values(r);
    const double z = sign * kernels::sparse_dot(idx, val, x, 1) + 0.5;
    if (z > 0.0) {
      kernels::sparse_axpy(sign * weight, idx, val, grad, 1);
      return z;
    }
    return 0.0;
  }

  static double group_mean(const DatasetMatrix& d, std::span<const double> x, double sign,
                           double scale, std::span<double> grad) {
    const std::size_t n = d.rows();
    MeanAccumulator acc(n);
    const double w = scale / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) acc.add(term(d, r, x, sign, w, grad));
    return acc.mean();
  }

  DataPtr first_;
  DataPtr second_;
  double inv_kappa_;
};

}  // namespace

SoecProblem build_np_multiclass(const MulticlassNpSpec& spec) {
  if (!spec.data) throw InvalidArgument("Neyman-Pearson problem needs a dataset");
  const std::size_t k = spec.data->num_classes();
  if (k < 2) throw InvalidArgument("Neyman-Pearson problem needs at least two classes");
  const std::size_t p = spec.data->feature_dim();
  if (p == 0) throw InvalidArgument("dataset has no features");
  auto parts = spec.data->class_partition();
  std::vector<ComponentPtr> comps;
  std::vector<ProductPart> blocks;
  for (std::size_t c = 0; c < k; ++c) {
    if (parts[c].empty()) throw InvalidArgument("class " + std::to_string(c) + " has no points");
    comps.push_back(std::make_shared<NpComponent>(spec.data, std::move(parts[c]), c, k));
    blocks.push_back(ProductPart{c * p, DomainSpec::ball(spec.radius, p)});
  }
  return SoecProblem(SoecProblemParts{
      .name = "np",
      .domain = DomainSpec::product(std::move(blocks)),
      .components = std::move(comps),
      .thresholds = Vector(k - 1, static_cast<double>(k - 1)),
      .data_size = static_cast<double>(spec.data->rows()),
      .objective_sign = 1.0,
      .initial_point = Vector(k * p, 0.0),
  });
}

SoecProblem build_fairness(const FairnessSpec& spec) {
  if (!spec.labeled || !spec.group_m || !spec.group_f) {
    throw InvalidArgument("fairness problem needs three datasets");
  }
  if (spec.labeled->rows() == 0 || spec.group_m->rows() == 0 || spec.group_f->rows() == 0) {
    throw InvalidArgument("fairness datasets must be nonempty");
  }
  if (!(spec.kappa > 0.0 && spec.kappa <= 1.0)) throw InvalidArgument("kappa must lie in (0, 1]");
  const std::size_t p = std::max({spec.labeled->feature_dim(), spec.group_m->feature_dim(),
                                  spec.group_f->feature_dim()});
  if (p == 0) throw InvalidArgument("datasets have no features");
  const double bound = 1.0 / spec.kappa;
  return SoecProblem(SoecProblemParts{
      .name = "fairness",
      .domain = DomainSpec::ball(spec.radius, p),
      .components = {std::make_shared<HingeObjective>(spec.labeled),
                     std::make_shared<FairnessConstraint>(spec.group_m, spec.group_f, spec.kappa),
                     std::make_shared<FairnessConstraint>(spec.group_f, spec.group_m, spec.kappa)},
      .thresholds = {bound, bound},
      .data_size = static_cast<double>(spec.labeled->rows() + spec.group_m->rows() +
                                       spec.group_f->rows()),
      .objective_sign = 1.0,
      .initial_point = Vector(p, 0.0),
  });
}

DatasetMatrix make_gaussian_classes(std::uint64_t seed, const std::vector<Vector>& means,
                                    double sd, const std::vector<std::size_t>& counts) {
  if (means.empty() || means.size() != counts.size()) {
    throw InvalidArgument("need one count per class mean");
  }
  const std::size_t p = means[0].size();
  auto eng = seeded_engine(seed, 0x6a);
  DatasetMatrix out;
  std::vector<std::int32_t> idx(p);
  for (std::size_t j = 0; j < p; ++j) idx[j] = static_cast<std::int32_t>(j + 1);
  Vector val(p);
  // Classes are interleaved so that every prefix of rows mixes all labels.
  std::vector<std::size_t> left(counts);
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t c = 0; c < means.size(); ++c) {
      if (left[c] == 0) continue;
      --left[c];
      any = true;
      for (std::size_t j = 0; j < p; ++j) {
        // Box-Muller keeps the stream portable across standard libraries.
        const double u1 = to_open_uniform(eng());
        const double u2 = to_open_uniform(eng());
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        val[j] = means[c][j] + sd * z;
      }
      out.add_row(static_cast<double>(c + 1), idx, val);
    }
  }
  return out;
}

}  // namespace slevel
