#include "slevel/kernels.hpp"

namespace slevel::kernels::scalar {

// Lane layout mirrors a 256-bit register of doubles. Element i accumulates in
// lane i % 4 and the lanes combine as (l0 + l1) + (l2 + l3) before the tail.

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t body = n - n % 4;
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] += a[i + l] * b[i + l];
  }
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sparse_dot(std::span<const std::int32_t> idx, std::span<const double> val,
                  std::span<const double> dense, std::int32_t base) {
  const std::size_t n = idx.size();
  const std::size_t body = n - n % 4;
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < body; k += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      lane[l] += val[k + l] * dense[static_cast<std::size_t>(idx[k + l] - base)];
    }
  }
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t k = body; k < n; ++k) {
    s += val[k] * dense[static_cast<std::size_t>(idx[k] - base)];
  }
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace slevel::kernels::scalar
