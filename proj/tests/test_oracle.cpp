#include <doctest.h>

#include <cmath>

#include "slevel/errors.hpp"
#include "slevel/oracle.hpp"
#include "slevel/problems.hpp"

using namespace slevel;
using doctest::Approx;

namespace {

OracleConfig cfg(std::size_t t, std::uint64_t seed) {
  OracleConfig c;
  c.iterations = t;
  c.step_constant = 1.0;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("step size schedule") {
  CHECK(step_size(3, 2.0) == Approx(0.25));
  CHECK(step_size(0, 1.0) == Approx(1.0));
  CHECK(step_size(99, 0.5) == Approx(0.2));
}

TEST_CASE("upper accumulator maximizes an affine form over the simplex") {
  BoundAccumulators acc(1, 2);
  acc.add(1.0, 0.3, Vector{0.0}, Vector{-1.0, 2.0}, Vector{0.0}, Vector{0.5, 0.5});
  CHECK(acc.weight() == 1.0);
  CHECK(acc.finalize_upper() == Approx(1.8));
}

TEST_CASE("lower accumulator minimizes an affine form over X") {
  BoundAccumulators acc(2, 2);
  acc.add(1.0, 0.3, Vector{3.0, 4.0}, Vector{0.0, 0.0}, Vector{0.0, 0.0}, Vector{0.5, 0.5});
  CHECK(acc.finalize_lower(DomainSpec::ball(1.0, 2)) == Approx(-4.7));
  BoundAccumulators empty(1, 2);
  CHECK_THROWS_AS(empty.finalize_upper(), Error);
}

TEST_CASE("oracle configuration is validated") {
  OracleConfig c;
  c.iterations = 0;
  CHECK_THROWS(c.validate());
  c = OracleConfig{};
  c.step_constant = -1.0;
  CHECK_THROWS(c.validate());
  c = OracleConfig{};
  c.delta = 1.0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("oracles start at the known feasible point when there is one") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  CHECK(start_point(toy) == toy_facts(ToyVariant::one_d).start);
  CHECK(initial_primal(toy.domain()) == Vector{0.0});
  CHECK(start_point(toy) == Vector{2.0});
}

TEST_CASE("OVSMD on the 1-D toy sandwiches H and tightens") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GeometrySpec geo = make_geometry(toy);
  const SaddleFunction sf{&toy, 2.0};
  ScenarioSource src(11, 2);
  const OracleReport rep = run_ovsmd(sf, geo, cfg(2000, 11), src);
  const double h = -0.5;
  REQUIRE(rep.lower.has_value());
  CHECK(rep.upper >= h - 1e-9);
  CHECK(rep.upper - h <= 0.1);
  CHECK(*rep.lower <= h + 1e-9);
  CHECK(rep.iterations == 2000);
  CHECK(rep.scenarios == 2 * 2000);
  CHECK(rep.x_avg.size() == 1);
  CHECK(rep.y_avg.size() == 2);
}

TEST_CASE("OVSMD upper bound is close to zero at the optimal level") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const SaddleFunction sf{&toy, toy_facts(ToyVariant::one_d).fstar};
  ScenarioSource src(4, 2);
  const OracleReport rep = run_ovsmd(sf, make_geometry(toy), cfg(2000, 4), src);
  CHECK(std::abs(rep.upper) <= 0.1);
}

TEST_CASE("observer sees every step with a valid pair of bounds") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const SaddleFunction sf{&toy, 2.0};
  ScenarioSource src(2, 2);
  std::size_t calls = 0;
  bool ordered = true;
  run_ovsmd(sf, make_geometry(toy), cfg(300, 2), src, [&](const StepView& v) {
    ordered = ordered && v.t == calls && v.lower <= v.upper + 1e-12;
    ++calls;
  });
  CHECK(calls == 300);
  CHECK(ordered);
}

TEST_CASE("plain SMD bound is the level function at the averaged point") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::one_d);
  const GeometrySpec geo = make_geometry(toy);
  const SaddleFunction sf{&toy, 2.0};
  ScenarioSource s1(8, 2);
  const OracleReport smd = run_smd(sf, geo, cfg(2000, 8), s1);
  CHECK(smd.upper >= -0.5 - 1e-9);
  CHECK(smd.upper <= -0.4);
  CHECK_FALSE(smd.lower.has_value());
  ScenarioSource s2(8, 2);
  const OracleReport ov = run_ovsmd(sf, geo, cfg(2000, 8), s2);
  CHECK(ov.upper >= smd.upper - 1e-9);
}

TEST_CASE("OVSMD is deterministic given the seed") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::two_d, 0.3);
  const GeometrySpec geo = make_geometry(toy);
  const SaddleFunction sf{&toy, 1.0};
  OracleConfig c = cfg(200, 5);
  c.batch = 4;
  ScenarioSource a(5, 2);
  ScenarioSource b(5, 2);
  const OracleReport ra = run_ovsmd(sf, geo, c, a);
  const OracleReport rb = run_ovsmd(sf, geo, c, b);
  CHECK(ra.upper == rb.upper);
  CHECK(ra.x_avg == rb.x_avg);
}

TEST_CASE("probe constants are positive and imply M") {
  const SoecProblem toy = build_analytic_toy(ToyVariant::two_d, 0.5);
  const GeometrySpec geo = make_geometry(toy);
  const ProbeEstimate p = estimate_constants(SaddleFunction{&toy, 1.0}, geo, 1);
  CHECK(p.mx > 0.0);
  CHECK(p.my > 0.0);
  CHECK(p.m == Approx(std::sqrt(2 * geo.dx * geo.dx * p.mx * p.mx +
                                2 * geo.dy * geo.dy * p.my * p.my)));
}
