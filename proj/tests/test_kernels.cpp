#include "doctest.h"

#include <random>

#include "geollm/kernels.hpp"

using namespace geollm;

TEST_CASE("parallel scoring is bit-identical to serial") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal;
  for (std::size_t rows : {1u, 255u, 257u, 5000u}) {
    const std::size_t dim = 64;
    std::vector<float> m(rows * dim);
    for (auto& v : m) v = normal(rng);
    CHECK(kernels::normalize_rows(m, dim));
    std::vector<float> q(m.begin(), m.begin() + dim);
    std::vector<double> a(rows), b(rows);
    kernels::score_rows_serial(m, dim, q, a);
    kernels::score_rows_parallel(m, dim, q, b);
    CHECK(a == b);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("top_k orders by score then key") {
  const std::vector<double> s{0.5, 0.9, 0.5, 0.1};
  const std::vector<std::string> keys{"b", "z", "a", "c"};
  CHECK(kernels::top_k(s, keys, 3) == std::vector<std::size_t>{1, 2, 0});
  CHECK(kernels::top_k(s, keys, 10).size() == 4);
  CHECK(kernels::top_k(s, keys, 0).empty());
}

TEST_CASE("normalize_rows reports zero rows") {
  std::vector<float> m{3, 4, 0, 0};
  CHECK_FALSE(kernels::normalize_rows(m, 2));
  CHECK(m[0] == doctest::Approx(0.6));
  CHECK(m[1] == doctest::Approx(0.8));
}
