#include "geollm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geollm::kernels {

namespace {

inline double dot_row(const float* row, const float* q, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t j = 0; j < dim; ++j) acc += static_cast<double>(row[j]) * static_cast<double>(q[j]);
  return acc;
}

}  // namespace

void score_rows_serial(std::span<const float> matrix, std::size_t dimension,
                       std::span<const float> query, std::span<double> scores) {
  const std::size_t rows = scores.size();
  for (std::size_t i = 0; i < rows; ++i) {
    scores[i] = dot_row(matrix.data() + i * dimension, query.data(), dimension);
  }
}

void score_rows_parallel(std::span<const float> matrix, std::size_t dimension,
                         std::span<const float> query, std::span<double> scores) {
  const auto rows = static_cast<std::ptrdiff_t>(scores.size());
  const float* base = matrix.data();
  const float* q = query.data();
  double* out = scores.data();
#pragma omp parallel for schedule(static) if (rows > 256)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    out[i] = dot_row(base + static_cast<std::size_t>(i) * dimension, q, dimension);
  }
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::span<const std::string> keys,
                               std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[a] < keys[b];
  };
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    better);
  order.resize(k);
  return order;
}

bool normalize_rows(std::span<float> matrix, std::size_t dimension) {
  if (dimension == 0) return false;
  const std::size_t rows = matrix.size() / dimension;
  bool ok = true;
  for (std::size_t i = 0; i < rows; ++i) {
    float* row = matrix.data() + i * dimension;
    double sq = 0.0;
    for (std::size_t j = 0; j < dimension; ++j) sq += static_cast<double>(row[j]) * row[j];
    if (sq == 0.0) {
      ok = false;
      continue;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < dimension; ++j) row[j] = static_cast<float>(row[j] * inv);
  }
  return ok;
}

}  // namespace geollm::kernels
