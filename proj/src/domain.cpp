#include "slevel/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slevel/errors.hpp"
#include "slevel/kernels.hpp"

namespace slevel {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

DomainSpec DomainSpec::ball(double radius, Vector center) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("ball radius must be finite and strictly positive");
  }
  if (center.empty()) throw InvalidArgument("ball dimension must be positive");
  return DomainSpec(Ball{radius, std::move(center)});
}

DomainSpec DomainSpec::ball(double radius, std::size_t dimension) {
  return ball(radius, Vector(dimension, 0.0));
}

DomainSpec DomainSpec::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw InvalidArgument("box bounds must have the same positive length");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw InvalidArgument("box lower bound exceeds upper bound at index " + std::to_string(i));
    }
  }
  return DomainSpec(Box{std::move(lower), std::move(upper)});
}

DomainSpec DomainSpec::product(std::vector<ProductPart> parts) {
  if (parts.empty()) throw InvalidArgument("product domain needs at least one part");
  std::size_t next = 0;
  for (const auto& p : parts) {
    if (p.offset != next) {
      throw InvalidArgument("product parts must partition the index range in order");
    }
    next += p.domain.dimension();
  }
  return DomainSpec(Product{std::move(parts)});
}

std::size_t DomainSpec::dimension() const {
  return std::visit(Overloaded{
                        [](const Ball& b) { return b.center.size(); },
                        [](const Box& b) { return b.lower.size(); },
                        [](const Product& p) {
                          const auto& last = p.parts.back();
                          return last.offset + last.domain.dimension();
                        },
                    },
                    v_);
}

bool DomainSpec::bounded() const {
  return std::visit(Overloaded{
                        [](const Ball&) { return true; },
                        [](const Box& b) {
                          for (std::size_t i = 0; i < b.lower.size(); ++i) {
                            if (!std::isfinite(b.lower[i]) || !std::isfinite(b.upper[i])) return false;
                          }
                          return true;
                        },
                        [](const Product& p) {
                          return std::all_of(p.parts.begin(), p.parts.end(),
                                             [](const ProductPart& q) { return q.domain.bounded(); });
                        },
                    },
                    v_);
}

bool DomainSpec::contains(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) return false;
  return std::visit(Overloaded{
                        [&](const Ball& b) {
                          double s = 0.0;
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            const double d = x[i] - b.center[i];
                            s += d * d;
                          }
                          return std::sqrt(s) <= b.radius + tol;
                        },
                        [&](const Box& b) {
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            if (!(x[i] >= b.lower[i] - tol && x[i] <= b.upper[i] + tol)) return false;
                          }
                          return true;
                        },
                        [&](const Product& p) {
                          for (const auto& q : p.parts) {
                            if (!q.domain.contains(x.subspan(q.offset, q.domain.dimension()), tol)) {
                              return false;
                            }
                          }
                          return true;
                        },
                    },
                    v_);
}

double DomainSpec::min_linear(std::span<const double> a) const {
  return std::visit(Overloaded{
                        [&](const Ball& b) {
                          const double norm = std::sqrt(kernels::dot(a, a));
                          return kernels::dot(a, b.center) - b.radius * norm;
                        },
                        [&](const Box& b) {
                          double s = 0.0;
                          for (std::size_t i = 0; i < a.size(); ++i) {
                            if (a[i] > 0.0) {
                              s += a[i] * b.lower[i];
                            } else if (a[i] < 0.0) {
                              s += a[i] * b.upper[i];
                            }
                          }
                          return s;
                        },
                        [&](const Product& p) {
                          double s = 0.0;
                          for (const auto& q : p.parts) {
                            s += q.domain.min_linear(a.subspan(q.offset, q.domain.dimension()));
                          }
                          return s;
                        },
                    },
                    v_);
}

Box DomainSpec::bounding_box() const {
  return std::visit(Overloaded{
                        [](const Ball& b) {
                          Box out{b.center, b.center};
                          for (std::size_t i = 0; i < b.center.size(); ++i) {
                            out.lower[i] -= b.radius;
                            out.upper[i] += b.radius;
                          }
                          return out;
                        },
                        [](const Box& b) { return b; },
                        [](const Product& p) {
                          Box out;
                          for (const auto& q : p.parts) {
                            Box sub = q.domain.bounding_box();
                            out.lower.insert(out.lower.end(), sub.lower.begin(), sub.lower.end());
                            out.upper.insert(out.upper.end(), sub.upper.begin(), sub.upper.end());
                          }
                          return out;
                        },
                    },
                    v_);
}

}  // namespace slevel
