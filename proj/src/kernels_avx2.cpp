#include "slevel/kernels.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(_M_X64)
#define SLEVEL_X86 1
#include <immintrin.h>
#else
#define SLEVEL_X86 0
#endif

namespace slevel::kernels::avx2 {

#if SLEVEL_X86

namespace {

// No FMA: the products are rounded before accumulation, matching scalar.
__attribute__((target("avx2"))) double reduce_lanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

__attribute__((target("avx2"))) double dot(std::span<const double> a,
                                            std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d va = _mm256_loadu_pd(a.data() + i);
    const __m256d vb = _mm256_loadu_pd(b.data() + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double s = reduce_lanes(acc);
  for (std::size_t i = body; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2"))) double sparse_dot(std::span<const std::int32_t> idx,
                                                   std::span<const double> val,
                                                   std::span<const double> dense,
                                                   std::int32_t base) {
  const std::size_t n = idx.size();
  const std::size_t body = n - n % 4;
  const __m128i vbase = _mm_set1_epi32(base);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < body; k += 4) {
    __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx.data() + k));
    vi = _mm_sub_epi32(vi, vbase);
    const __m256d gathered = _mm256_i32gather_pd(dense.data(), vi, 8);
    const __m256d vv = _mm256_loadu_pd(val.data() + k);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vv, gathered));
  }
  double s = reduce_lanes(acc);
  for (std::size_t k = body; k < n; ++k) {
    s += val[k] * dense[static_cast<std::size_t>(idx[k] - base)];
  }
  return s;
}

__attribute__((target("avx2"))) void axpy(double alpha, std::span<const double> x,
                                           std::span<double> y) {
  const std::size_t n = x.size();
  const std::size_t body = n - n % 4;
  const __m256d va = _mm256_set1_pd(alpha);
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (std::size_t i = body; i < n; ++i) y[i] += alpha * x[i];
}

#else

double dot(std::span<const double>, std::span<const double>) {
  throw std::runtime_error("avx2 kernels are not available on this architecture");
}
double sparse_dot(std::span<const std::int32_t>, std::span<const double>,
                  std::span<const double>, std::int32_t) {
  throw std::runtime_error("avx2 kernels are not available on this architecture");
}
void axpy(double, std::span<const double>, std::span<double>) {
  throw std::runtime_error("avx2 kernels are not available on this architecture");
}

#endif

}  // namespace slevel::kernels::avx2
