#include <doctest.h>

#include <cmath>

#include "slevel/domain.hpp"
#include "slevel/errors.hpp"
#include "slevel/geometry.hpp"
#include "slevel/oracle.hpp"

using namespace slevel;
using doctest::Approx;

TEST_CASE("domains report dimension, boundedness and membership") {
  const auto ball = DomainSpec::ball(2.0, 3);
  CHECK(ball.dimension() == 3);
  CHECK(ball.bounded());
  CHECK(ball.contains(Vector{1.0, 1.0, 1.0}, 0.0));
  CHECK_FALSE(ball.contains(Vector{2.0, 1.0, 0.0}, 0.0));

  const auto box = DomainSpec::box({0.0, -1.0}, {2.0, 1.0});
  CHECK(box.contains(Vector{2.0, -1.0}, 0.0));
  CHECK_FALSE(box.contains(Vector{2.1, 0.0}, 0.0));

  CHECK_THROWS_AS(DomainSpec::box({1.0}, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(DomainSpec::ball(-1.0, 2), InvalidArgument);
}

TEST_CASE("linear minimization over each domain kind") {
  CHECK(DomainSpec::ball(1.0, 2).min_linear(Vector{3.0, 4.0}) == Approx(-5.0));
  CHECK(DomainSpec::box({0.0, 0.0}, {2.0, 2.0}).min_linear(Vector{1.0, -1.0}) == Approx(-2.0));
  const auto prod = DomainSpec::product(
      {{0, DomainSpec::box({0.0}, {1.0})}, {1, DomainSpec::ball(1.0, 2)}});
  CHECK(prod.dimension() == 3);
  CHECK(prod.min_linear(Vector{-1.0, 0.0, 2.0}) == Approx(-3.0));
}

TEST_CASE("Euclidean projection") {
  const auto ball = DomainSpec::ball(5.0, 2);
  const Vector p = project_primal(ball, Vector{6.0, 8.0});
  CHECK(p[0] == Approx(3.0));
  CHECK(p[1] == Approx(4.0));
  const Vector inside = project_primal(ball, Vector{1.0, 2.0});
  CHECK(inside == Vector{1.0, 2.0});

  const auto box = DomainSpec::box({0.0}, {2.0});
  CHECK(project_primal(box, Vector{3.5})[0] == 2.0);
  CHECK(project_primal(box, Vector{-1.0})[0] == 0.0);

  const auto prod = DomainSpec::product(
      {{0, DomainSpec::box({0.0}, {1.0})}, {1, DomainSpec::ball(1.0, 2)}});
  const Vector q = project_primal(prod, Vector{5.0, 0.0, -3.0});
  CHECK(q[0] == 1.0);
  CHECK(q[1] == Approx(0.0));
  CHECK(q[2] == Approx(-1.0));
  CHECK_THROWS_AS(project_primal(box, Vector{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("entropy prox on the simplex") {
  const Vector y{0.5, 0.5};
  const Vector out = prox_entropy_simplex(y, Vector{std::log(2.0), 0.0});
  CHECK(out[0] == Approx(1.0 / 3.0));
  CHECK(out[1] == Approx(2.0 / 3.0));

  const Vector same = prox_entropy_simplex(Vector{0.2, 0.3, 0.5}, Vector{0.0, 0.0, 0.0});
  CHECK(same[0] == Approx(0.2));
  CHECK(same[1] == Approx(0.3));
  CHECK(same[2] == Approx(0.5));

  // Huge steps push mass onto one vertex; the floor keeps the rest positive.
  const Vector tilt = prox_entropy_simplex(Vector{0.5, 0.5}, Vector{0.0, 900.0});
  CHECK(tilt[1] > 0.0);
  CHECK(tilt[0] + tilt[1] == Approx(1.0));

  CHECK_THROWS_AS(prox_entropy_simplex(Vector{1.0, 0.0}, Vector{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("product prox scales each block by its diameter") {
  const GeometrySpec geo{std::sqrt(0.5), std::sqrt(0.5), 1e-12};  // 2 D^2 = 1
  const auto box = DomainSpec::box({0.0}, {2.0});
  const ProductPoint p =
      prox_product(geo, box, Vector{1.0}, Vector{0.5, 0.5}, Vector{0.4}, Vector{0.0, 0.0});
  CHECK(p.x[0] == Approx(0.6));
  CHECK(p.y[0] == Approx(0.5));
}

TEST_CASE("Bregman divergences") {
  CHECK(bregman(Dgf::euclidean, Vector{0.0, 0.0}, Vector{3.0, 4.0}) == Approx(12.5));
  CHECK(bregman(Dgf::entropy, Vector{0.5, 0.5}, Vector{0.9, 0.1}) == Approx(0.368).epsilon(1e-3));
  CHECK(bregman(Dgf::entropy, Vector{0.3, 0.7}, Vector{0.3, 0.7}) == Approx(0.0));
  CHECK(omega_x(Vector{3.0, 4.0}) == Approx(12.5));
  CHECK(omega_y(Vector{1.0, 0.0}) == Approx(0.0));
}

TEST_CASE("diameters of the distance-generating functions") {
  const double lambda = 3.0;
  const Diameters d = compute_diameters(DomainSpec::ball(lambda, 4), 1);
  CHECK(d.dx == Approx(lambda / std::sqrt(2.0)));
  CHECK(d.dy == Approx(0.8326).epsilon(1e-4));
  CHECK(compute_diameters(DomainSpec::box({1.0}, {1.0}), 2).dx == 0.0);
  CHECK(compute_diameters(DomainSpec::box({1.0}, {3.0}), 2).dx == Approx(2.0));
}

TEST_CASE("the origin projection is where w_x is smallest") {
  const auto box = DomainSpec::box({1.0, -2.0}, {3.0, 2.0});
  CHECK(initial_primal(box) == Vector{1.0, 0.0});
}

TEST_CASE("deviation constant and iteration bounds") {
  CHECK(compute_omega(0.05) == Approx(8.607).epsilon(1e-3));
  // sqrt(12 L) and 4L/3 cross at L = 6.75
  const double delta_cross = 24.0 * std::exp(-6.75);
  CHECK(compute_omega(delta_cross) == Approx(9.0));
  CHECK_THROWS_AS(compute_omega(1.5), InvalidArgument);

  TheoryConstants c;
  c.q = 1.0;
  c.m = 1.0;
  c.omega = 2.0;
  const std::size_t t1 = iteration_bound_t(c, 1.0);
  const std::size_t t2 = iteration_bound_t(c, 0.5);
  CHECK(t2 > t1);
  CHECK(iteration_bound_w(c, 1.0) < t1);
  CHECK_THROWS_AS(iteration_bound_t(c, 0.0), InvalidArgument);
}
