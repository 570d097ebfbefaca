#include "slevel/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "slevel/errors.hpp"

namespace slevel::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("SLEVEL_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) {
    throw std::runtime_error("avx2 requested but not supported by this CPU");
  }
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  return active_isa() == Isa::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double sparse_dot(std::span<const std::int32_t> idx, std::span<const double> val,
                  std::span<const double> dense, std::int32_t base) {
  return active_isa() == Isa::avx2 ? avx2::sparse_dot(idx, val, dense, base)
                                   : scalar::sparse_dot(idx, val, dense, base);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidArgument("axpy: length mismatch");
  if (active_isa() == Isa::avx2) {
    avx2::axpy(alpha, x, y);
  } else {
    scalar::axpy(alpha, x, y);
  }
}

void sparse_axpy(double alpha, std::span<const std::int32_t> idx,
                 std::span<const double> val, std::span<double> dense, std::int32_t base) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    dense[static_cast<std::size_t>(idx[k] - base)] += alpha * val[k];
  }
}

}  // namespace slevel::kernels
