#pragma once

// Mirror-descent geometry. X gets the Euclidean setup and the simplex Y the
// negative entropy; the prox on Z = X x Y scales each block by its diameter.
// The theoretical constants that size the oracles live here too.

#include <cstddef>
#include <span>

#include "slevel/domain.hpp"
#include "slevel/soec.hpp"

namespace slevel {

struct GeometrySpec {
  double dx = 0.0;  // D_x
  double dy = 0.0;  // D_y
  double entropy_floor = 1e-12;
};

struct Diameters {
  double dx;
  double dy;
};

// D_x^2 = max_X w_x - min_X w_x with w_x = |x|^2 / 2, and D_y^2 = ln(m + 1).
Diameters compute_diameters(const DomainSpec& domain, std::size_t m);

GeometrySpec make_geometry(const SoecProblem& problem, double entropy_floor = 1e-12);

// Range (min, max) of |x|^2 / 2 over the domain.
struct OmegaRange {
  double min;
  double max;
};
OmegaRange omega_x_range(const DomainSpec& domain);

// Orthogonal projection onto X.
Vector project_primal(const DomainSpec& domain, std::span<const double> point);

// argmin over the simplex of zeta^T y' + KL(y' || y): y' proportional to
// y * exp(-zeta), with components floored at `floor` and renormalized.
Vector prox_entropy_simplex(std::span<const double> y, std::span<const double> zeta,
                            double floor = 1e-12);

struct ProductPoint {
  Vector x;
  Vector y;
};

// Prox on Z with the scaled distance-generating function
// w_z = w_x / (2 D_x^2) + w_y / (2 D_y^2).
ProductPoint prox_product(const GeometrySpec& geo, const DomainSpec& domain,
                          std::span<const double> x, std::span<const double> y,
                          std::span<const double> zeta_x, std::span<const double> zeta_y);

enum class Dgf { euclidean, entropy };

// V(center, point): divergence of `point` from `center`.
double bregman(Dgf dgf, std::span<const double> center, std::span<const double> point);

double omega_x(std::span<const double> x);
double omega_y(std::span<const double> y);
double omega_z(const GeometrySpec& geo, std::span<const double> x, std::span<const double> y);

// Light-tail scale of the deviation bounds.
double compute_omega(double delta);

struct TheoryConstants {
  double mx = 0.0;
  double my = 0.0;
  double q = 0.0;
  double m = 0.0;      // M
  double omega = 0.0;  // Omega(delta)
};

// Fills M from (Mx, My) and the diameters, and Omega from delta.
TheoryConstants make_theory_constants(const GeometrySpec& geo, double mx, double my, double q,
                                      double delta);

// Iterations that make OVSMD (T) or plain SMD (W) an eps_a-accurate oracle.
// Both use constants.omega as given.
std::size_t iteration_bound_t(const TheoryConstants& constants, double eps_a);
std::size_t iteration_bound_w(const TheoryConstants& constants, double eps_a);

}  // namespace slevel
