#include <doctest.h>

#include <cmath>

#include "slevel/errors.hpp"
#include "slevel/problems.hpp"
#include "slevel/soec.hpp"

using namespace slevel;
using doctest::Approx;

TEST_CASE("saddle subgradient on the 1-D toy") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const SaddleFunction sf{&toy, 2.0};
  ScenarioSource src(1, 2);
  SaddleSample s;
  sample_saddle_subgradient(sf, Vector{0.5}, Vector{0.5, 0.5}, 1, src, s);
  CHECK(s.grad_y[0] == Approx(-1.5));
  CHECK(s.grad_y[1] == Approx(0.5));
  CHECK(s.grad_x[0] == Approx(0.0));
  CHECK(s.value == Approx(-0.5));
  CHECK(s.scenarios == 2);
}

TEST_CASE("scenario streams are reproducible and independent per component") {
  ScenarioSource a(42, 2);
  ScenarioSource b(42, 2);
  Vector u1(5), u2(5), v(5);
  a.fill(0, u1);
  b.fill(0, u2);
  CHECK(u1 == u2);
  a.fill(1, v);
  CHECK(v != u1);
  CHECK(a.draws(0) == 5);
  for (double u : u1) {
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(to_open_uniform(0) > 0.0);
  CHECK(to_open_uniform(~0ull) < 1.0);

  ScenarioSource eval(42, 2, StreamPurpose::evaluation);
  Vector w(5);
  eval.fill(0, w);
  CHECK(w != u1);
}

TEST_CASE("level function value P(r, x)") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const PEvaluation p = evaluate_p(toy, 2.0, Vector{0.75}, ExactMode{});
  CHECK(p.value == Approx(0.25));
  CHECK(p.shifted[0] == Approx(-1.25));
  CHECK(p.shifted[1] == Approx(0.25));
  CHECK_FALSE(p.saa_samples.has_value());
}

TEST_CASE("grid evaluation of H on the 1-D toy") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GridResult h2 = evaluate_h_grid(toy, 2.0);
  CHECK(h2.value == Approx(-0.5).epsilon(1e-6));
  CHECK(h2.argmin[0] == Approx(1.5).epsilon(1e-4));
  CHECK(std::abs(evaluate_h_grid(toy, 1.0).value) < 1e-6);
  CHECK(evaluate_h_grid(toy, 0.5).value == Approx(0.25).epsilon(1e-6));
}

TEST_CASE("H is non-increasing and crosses zero at the optimum on the 2-D toy") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::two_d);
  double prev = 1e300;
  for (double r : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const double h = evaluate_h_grid(toy, r, 201).value;
    CHECK(h <= prev + 1e-9);
    prev = h;
  }
  CHECK(std::abs(evaluate_h_grid(toy, 0.5, 201).value) < 1e-3);
}

TEST_CASE("quality metrics") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const MetricReferences refs{1.0, 2.0};
  const QualityMetrics m = compute_metrics(toy, Vector{1.2}, refs, 3.0);
  CHECK(m.objective == Approx(1.2));
  CHECK(m.max_violation == Approx(-0.2));
  REQUIRE(m.relative_gap.has_value());
  CHECK(*m.relative_gap == Approx(0.2));
  CHECK(m.data_passes == 3.0);

  const QualityMetrics at_start = compute_metrics(toy, Vector{2.0}, refs, 0.0);
  CHECK(*at_start.relative_gap == Approx(1.0));

  const QualityMetrics no_ref = compute_metrics(toy, Vector{1.2}, {}, 0.0);
  CHECK_FALSE(no_ref.relative_gap.has_value());

  CHECK(relative_gap(1.5, 1.0, 3.0) == Approx(0.25));
}

TEST_CASE("sample-average evaluation on a noisy toy converges to the exact value") {
  const SoecProblem noisy = build_analytic_toy(ToyVariant::one_d, 0.5);
  CHECK(noisy.has_exact());
  const ComponentValues v = evaluate_components(noisy, Vector{0.75}, SaaMode{200000, 3});
  REQUIRE(v.saa_samples.has_value());
  CHECK(*v.saa_samples == 200000);
  CHECK(v.values[0] == Approx(0.75).epsilon(0.01));
  CHECK(v.values[1] == Approx(0.25).epsilon(0.01));
  const ComponentValues e = evaluate_components(noisy, Vector{0.75}, ExactMode{});
  CHECK(e.values[0] == Approx(0.75));
  CHECK_FALSE(e.saa_samples.has_value());
  CHECK(std::holds_alternative<ExactMode>(metrics_mode(noisy, {})));
}
