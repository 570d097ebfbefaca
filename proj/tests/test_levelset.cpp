#include <doctest.h>

#include <cmath>

#include "slevel/errors.hpp"
#include "slevel/levelset.hpp"
#include "slevel/problems.hpp"

using namespace slevel;
using doctest::Approx;

namespace {

SflsConfig toy_config(double theta, std::size_t t, std::uint64_t seed) {
  SflsConfig c;
  c.r0 = 2.0;
  c.theta = theta;
  c.outer_limit = 40;
  c.oracle.iterations = t;
  c.oracle.step_constant = 1.0;
  c.oracle.seed = seed;
  c.refs = {1.0, 2.0};
  return c;
}

}  // namespace

TEST_CASE("confidence schedule and level updates") {
  CHECK(delta_at_iteration(0.1, 0) == Approx(0.05));
  CHECK(delta_at_iteration(0.1, 3) == Approx(0.00625));
  CHECK(level_update(2.0, -0.5, 1.25) == Approx(1.8));
}

TEST_CASE("tolerances derived from the initial bound") {
  const Tolerances t = derive_tolerances(-0.5, 1.1, 0.01);
  CHECK(t.eps_opt == Approx(4.545e-3).epsilon(1e-3));
  CHECK(t.eps_a == Approx(9.839e-5).epsilon(1e-3));
  CHECK_THROWS_AS(derive_tolerances(0.5, 1.1, 0.01), InvalidArgument);
  CHECK(outer_iteration_bound(1.25, 0.5, 0.01) == 36);
}

TEST_CASE("solver configuration is validated") {
  SflsConfig c = toy_config(0.9, 10, 1);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = toy_config(1.1, 10, 1);
  c.outer_limit = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("stochastic level-set method stays feasible on the 1-D toy") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GeometrySpec geo = make_geometry(toy);
  SflsConfig c = toy_config(1.25, 2000, 5);
  c.eps_opt = derive_tolerances(-0.45, 1.25, 0.01).eps_opt;
  const LevelTrace tr = sfls_solve(toy, geo, c);
  REQUIRE_FALSE(tr.entries.empty());
  double prev_r = 1e300;
  for (const auto& e : tr.entries) {
    CHECK(e.metrics.max_violation <= 1e-9);
    CHECK(e.r <= prev_r);
    CHECK(e.r >= 1.0 - 1e-9);  // levels never cross below f*
    prev_r = e.r;
  }
  CHECK(tr.halted);
  CHECK(*tr.entries.back().metrics.relative_gap <= 0.01);
  CHECK(tr.entries.back().grad_iters == 2000 * tr.entries.size());
}

TEST_CASE("stochastic solver is reproducible for a fixed seed") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::two_d, 0.3);
  const GeometrySpec geo = make_geometry(toy);
  SflsConfig c = toy_config(1.1, 200, 9);
  c.outer_limit = 5;
  c.oracle.batch = 4;
  c.refs = {0.5, 2.0};
  const LevelTrace a = sfls_solve(toy, geo, c);
  const LevelTrace b = sfls_solve(toy, geo, c);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].r == b.entries[i].r);
    CHECK(a.entries[i].x == b.entries[i].x);
  }
}

TEST_CASE("deterministic baseline charges two passes per inner step") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  SflsConfig c = toy_config(1.1, 5, 1);
  c.outer_limit = 3;
  const LevelTrace tr = dfls_solve(toy, make_geometry(toy), c);
  REQUIRE(tr.entries.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(tr.entries[k].grad_iters == 5 * (k + 1));
    CHECK(tr.entries[k].data_passes == 10.0 * static_cast<double>(k + 1));
  }
}

TEST_CASE("deterministic baseline steps on the lowest active index") {
  // At r = 3 and x = 2 both pieces of P equal -1. Stepping on f0 moves x
  // to 1.9, which becomes the best point at the next level; stepping on f1
  // would leave x pinned at the upper bound.
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  SflsConfig c = toy_config(1.1, 1, 1);
  c.r0 = 3.0;
  c.outer_limit = 2;
  c.oracle.step_constant = 40.0;
  const LevelTrace tr = dfls_solve(toy, make_geometry(toy), c);
  REQUIRE(tr.entries.size() == 2);
  CHECK(tr.entries[0].u_hat == Approx(-1.0));
  CHECK(tr.entries[1].r == Approx(2.5));
  CHECK(tr.entries[1].x[0] == Approx(1.9));
}

TEST_CASE("deterministic and stochastic methods agree on the toy optimum") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GeometrySpec geo = make_geometry(toy);
  SflsConfig c = toy_config(1.25, 2000, 5);
  c.eps_opt = 1e-3;
  const LevelTrace s = sfls_solve(toy, geo, c);
  SflsConfig d = toy_config(1.25, 200, 5);
  d.outer_limit = 60;
  d.eps_opt = 1e-4;
  const LevelTrace det = dfls_solve(toy, geo, d);
  const double fs = s.entries.back().metrics.objective;
  const double fd = det.entries.back().metrics.objective;
  CHECK(std::abs(fs - fd) <= 1e-2);
  CHECK(det.entries.back().metrics.max_violation <= 1e-9);
}

TEST_CASE("pass budget stops the deterministic baseline") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  SflsConfig c = toy_config(1.1, 5, 1);
  c.pass_budget = 25.0;
  const LevelTrace tr = dfls_solve(toy, make_geometry(toy), c);
  CHECK(tr.entries.size() == 3);
  CHECK(tr.entries.back().data_passes == 30.0);
}

TEST_CASE("initial bound estimator certifies a negative bound above f*") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GeometrySpec geo = make_geometry(toy);
  OracleConfig oc;
  oc.seed = 3;
  const BoundEstimate be = estimate_initial_bound(SaddleFunction{&toy, 2.0}, geo, oc, 0.1, 1.1);
  CHECK(be.u_bar < 0.0);
  CHECK(be.u_bar >= -0.5);
  CHECK(0.5 / std::abs(be.u_bar) <= 1.1);
  CHECK(be.alpha == Approx(std::ldexp(0.5, -static_cast<int>(be.halvings))));
}

TEST_CASE("initial bound estimator gives up at the optimal level") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  OracleConfig oc;
  oc.seed = 3;
  BoundEstimateConfig bc;
  bc.max_halvings = 6;
  CHECK_THROWS_WITH_AS(estimate_initial_bound(SaddleFunction{&toy, 1.0}, make_geometry(toy), oc,
                                              0.1, 1.1, bc),
                       doctest::Contains("halving cap"), Error);
}

TEST_CASE("condition diagnostics on the 1-D toy") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const ConditionDiagnostics cd = condition_diagnostics(toy, 2.0, 201, 1.25, 0.01);
  CHECK(cd.fstar == Approx(1.0).epsilon(1e-4));
  CHECK(cd.h_r0 == Approx(-0.5).epsilon(1e-4));
  CHECK(cd.beta_hat == Approx(0.5).epsilon(1e-3));
  CHECK(cd.outer_bound == 36);
}
