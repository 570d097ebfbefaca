#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "slevel/kernels.hpp"

namespace k = slevel::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernels compute the textbook values") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{5, 4, 3, 2, 1};
  CHECK(k::scalar::dot(a, b) == doctest::Approx(35.0));
  std::vector<double> y{1, 1, 1, 1, 1};
  k::scalar::axpy(2.0, a, y);
  CHECK(y == std::vector<double>{3, 5, 7, 9, 11});
  const std::vector<std::int32_t> idx{1, 3, 5};
  const std::vector<double> val{2.0, -1.0, 0.5};
  CHECK(k::scalar::sparse_dot(idx, val, a, 1) == doctest::Approx(2.0 - 3.0 + 2.5));
  std::vector<double> dense(5, 0.0);
  k::sparse_axpy(2.0, idx, val, dense, 1);
  CHECK(dense == std::vector<double>{4.0, 0.0, -2.0, 0.0, 1.0});
}

TEST_CASE("AVX2 kernels match the scalar reference bit for bit") {
  if (!k::cpu_has_avx2()) {
    MESSAGE("CPU lacks AVX2; equivalence check skipped");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    CHECK(same_bits(k::scalar::dot(a, b), k::avx2::dot(a, b)));

    auto y1 = random_vec(rng, n);
    auto y2 = y1;
    k::scalar::axpy(-0.37, a, y1);
    k::avx2::axpy(-0.37, a, y2);
    for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(y1[i], y2[i]));

    const auto dense = random_vec(rng, 3 * n + 1);
    std::vector<std::int32_t> idx;
    std::vector<double> val;
    for (std::size_t j = 0; j < dense.size(); ++j) {
      if (rng() % 3 == 0) {
        idx.push_back(static_cast<std::int32_t>(j + 1));
        val.push_back(random_vec(rng, 1)[0]);
      }
    }
    CHECK(same_bits(k::scalar::sparse_dot(idx, val, dense, 1),
                    k::avx2::sparse_dot(idx, val, dense, 1)));
  }
}

TEST_CASE("dispatch can be forced and reports its variant") {
  const k::Isa before = k::active_isa();
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  const std::vector<double> a{1.5, -2.0, 3.25};
  const double s = k::dot(a, a);
  if (k::cpu_has_avx2()) {
    k::force_isa(k::Isa::avx2);
    CHECK(same_bits(k::dot(a, a), s));
  } else {
    CHECK_THROWS(k::force_isa(k::Isa::avx2));
  }
  k::force_isa(before);
}

TEST_CASE("length mismatches are rejected") {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{1, 2, 3};
  CHECK_THROWS(k::dot(a, b));
}
