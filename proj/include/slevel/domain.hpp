#pragma once

// The feasible set X of a problem: a Euclidean ball, a box, or a product of
// those over consecutive index ranges.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace slevel {

using Vector = std::vector<double>;

class DomainSpec;

struct Ball {
  double radius;
  Vector center;
};

struct Box {
  Vector lower;
  Vector upper;
};

struct ProductPart;

struct Product {
  std::vector<ProductPart> parts;
};

class DomainSpec {
 public:
  static DomainSpec ball(double radius, Vector center);
  // Ball centered at the origin.
  static DomainSpec ball(double radius, std::size_t dimension);
  static DomainSpec box(Vector lower, Vector upper);
  // Parts must tile [0, d) in order.
  static DomainSpec product(std::vector<ProductPart> parts);

  std::size_t dimension() const;
  bool bounded() const;
  bool contains(std::span<const double> x, double tol) const;

  // min over X of a^T x (closed form for every supported variant).
  double min_linear(std::span<const double> a) const;

  // Axis-aligned bounding box, used by grid searches.
  Box bounding_box() const;

  const std::variant<Ball, Box, Product>& variant() const { return v_; }

 private:
  explicit DomainSpec(std::variant<Ball, Box, Product> v) : v_(std::move(v)) {}
  std::variant<Ball, Box, Product> v_;
};

struct ProductPart {
  std::size_t offset;
  DomainSpec domain;
};

}  // namespace slevel
