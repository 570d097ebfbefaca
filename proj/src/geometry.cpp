#include "slevel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

OmegaRange omega_x_range(const DomainSpec& domain) {
  if (!domain.bounded()) throw InvalidArgument("diameter of an unbounded domain");
  const auto& v = domain.variant();
  if (const auto* b = std::get_if<Ball>(&v)) {
    const double cn = std::sqrt(kernels::dot(b->center, b->center));
    const double far = cn + b->radius;
    const double near = std::max(0.0, cn - b->radius);
    return {0.5 * near * near, 0.5 * far * far};
  }
  if (const auto* bx = std::get_if<Box>(&v)) {
    OmegaRange r{0.0, 0.0};
    for (std::size_t i = 0; i < bx->lower.size(); ++i) {
      const double l = bx->lower[i];
      const double u = bx->upper[i];
      r.max += 0.5 * std::max(l * l, u * u);
      if (!(l <= 0.0 && 0.0 <= u)) r.min += 0.5 * std::min(l * l, u * u);
    }
    return r;
  }
  // Both extremes separate across the blocks of a product.
  OmegaRange r{0.0, 0.0};
  for (const auto& part : std::get<Product>(v).parts) {
    const OmegaRange sub = omega_x_range(part.domain);
    r.min += sub.min;
    r.max += sub.max;
  }
  return r;
}

Diameters compute_diameters(const DomainSpec& domain, std::size_t m) {
  const OmegaRange r = omega_x_range(domain);
  return {std::sqrt(std::max(0.0, r.max - r.min)), std::sqrt(std::log(static_cast<double>(m) + 1.0))};
}

GeometrySpec make_geometry(const SoecProblem& problem, double entropy_floor) {
  const Diameters d = compute_diameters(problem.domain(), problem.num_constraints());
  return {d.dx, d.dy, entropy_floor};
}

Vector project_primal(const DomainSpec& domain, std::span<const double> point) {
  if (point.size() != domain.dimension()) throw InvalidArgument("projection: dimension mismatch");
  const auto& v = domain.variant();
  Vector out(point.begin(), point.end());
  if (const auto* b = std::get_if<Ball>(&v)) {
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = out[i] - b->center[i];
      s += d * d;
    }
    const double norm = std::sqrt(s);
    if (norm > b->radius) {
      const double scale = b->radius / norm;
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = b->center[i] + (out[i] - b->center[i]) * scale;
      }
    }
    return out;
  }
  if (const auto* bx = std::get_if<Box>(&v)) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], bx->lower[i], bx->upper[i]);
    return out;
  }
  for (const auto& part : std::get<Product>(v).parts) {
    const std::size_t n = part.domain.dimension();
    const Vector sub = project_primal(part.domain, point.subspan(part.offset, n));
    std::copy(sub.begin(), sub.end(), out.begin() + static_cast<std::ptrdiff_t>(part.offset));
  }
  return out;
}

Vector prox_entropy_simplex(std::span<const double> y, std::span<const double> zeta,
                            double floor) {
  if (y.size() != zeta.size() || y.empty()) throw InvalidArgument("prox: length mismatch");
  Vector w(y.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw InvalidArgument("entropy prox needs a strictly positive dual point");
    }
    w[i] = std::log(y[i]) - zeta[i];
    top = std::max(top, w[i]);
  }
  double s = 0.0;
  for (double& v : w) {
    v = std::exp(v - top);
    s += v;
  }
  bool clamped = false;
  for (double& v : w) {
    v /= s;
    if (v < floor) {
      v = floor;
      clamped = true;
    }
  }
  if (clamped) {
    s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
  }
  return w;
}

ProductPoint prox_product(const GeometrySpec& geo, const DomainSpec& domain,
                          std::span<const double> x, std::span<const double> y,
                          std::span<const double> zeta_x, std::span<const double> zeta_y) {
  const double sx = 2.0 * geo.dx * geo.dx;
  const double sy = 2.0 * geo.dy * geo.dy;
  Vector moved(x.begin(), x.end());
  kernels::axpy(-sx, zeta_x, moved);
  Vector scaled(zeta_y.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = sy * zeta_y[i];
  return {project_primal(domain, moved), prox_entropy_simplex(y, scaled, geo.entropy_floor)};
}

double bregman(Dgf dgf, std::span<const double> center, std::span<const double> point) {
  if (center.size() != point.size()) throw InvalidArgument("bregman: length mismatch");
  double s = 0.0;
  if (dgf == Dgf::euclidean) {
    for (std::size_t i = 0; i < point.size(); ++i) {
      const double d = point[i] - center[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(center[i] > 0.0)) throw InvalidArgument("entropy divergence centered at a boundary point");
    if (point[i] > 0.0) s += point[i] * std::log(point[i] / center[i]);
  }
  return s;
}

double omega_x(std::span<const double> x) { return 0.5 * kernels::dot(x, x); }

double omega_y(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s;
}

double omega_z(const GeometrySpec& geo, std::span<const double> x, std::span<const double> y) {
  // A single-point X has D_x = 0 and contributes nothing.
  const double px = geo.dx > 0.0 ? omega_x(x) / (2.0 * geo.dx * geo.dx) : 0.0;
  return px + omega_y(y) / (2.0 * geo.dy * geo.dy);
}

double compute_omega(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  const double l = std::log(24.0 / delta);
  return std::max(std::sqrt(12.0 * l), (4.0 / 3.0) * l);
}

TheoryConstants make_theory_constants(const GeometrySpec& geo, double mx, double my, double q,
                                      double delta) {
  TheoryConstants c;
  c.mx = mx;
  c.my = my;
  c.q = q;
  c.m = std::sqrt(2.0 * geo.dx * geo.dx * mx * mx + 2.0 * geo.dy * geo.dy * my * my);
  c.omega = compute_omega(delta);
  return c;
}

namespace {

std::size_t bound_from(double a, double lead, double inner, double eps_a) {
  if (!(eps_a > 0.0)) throw InvalidArgument("oracle tolerance must be positive");
  const double root = lead * a / eps_a * std::log(inner * a / eps_a);
  const double val = std::max(6.0, root * root - 2.0);
  return static_cast<std::size_t>(std::ceil(val));
}

}  // namespace

std::size_t iteration_bound_t(const TheoryConstants& c, double eps_a) {
  const double a = c.q * c.omega + 10.0 * c.m * c.omega + 4.5 * c.m;
  return bound_from(a, 16.0, 8.0, eps_a);
}

std::size_t iteration_bound_w(const TheoryConstants& c, double eps_a) {
  const double a = 10.0 * c.m * c.omega + 4.5 * c.m;
  return bound_from(a, 8.0, 4.0, eps_a);
}

}  // namespace slevel
