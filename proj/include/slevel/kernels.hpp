#pragma once

// Dense and sparse vector kernels used on the hot paths of the solvers
// (row margins over datasets, gradient accumulation, affine-form updates).
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The variant is picked once at startup from the CPU feature flags and can be
// overridden with SLEVEL_SIMD=scalar|avx2. The scalar reductions use the same
// four-lane accumulation order as the AVX2 code, so both variants return
// bit-identical results and a run is reproducible regardless of dispatch.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace slevel::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// True when the running CPU can execute the AVX2 variants.
bool cpu_has_avx2();

// The variant currently used by the dispatching entry points below.
Isa active_isa();

// Overrides dispatch (tests and benchmarks). Requesting avx2 on a CPU
// without it throws std::runtime_error.
void force_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

// sum_k val[k] * dense[idx[k] - base]
double sparse_dot(std::span<const std::int32_t> idx, std::span<const double> val,
                  std::span<const double> dense, std::int32_t base);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// dense[idx[k] - base] += alpha * val[k]; scatter is always scalar.
void sparse_axpy(double alpha, std::span<const std::int32_t> idx,
                 std::span<const double> val, std::span<double> dense, std::int32_t base);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double sparse_dot(std::span<const std::int32_t> idx, std::span<const double> val,
                  std::span<const double> dense, std::int32_t base);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double sparse_dot(std::span<const std::int32_t> idx, std::span<const double> val,
                  std::span<const double> dense, std::int32_t base);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace avx2

}  // namespace slevel::kernels
