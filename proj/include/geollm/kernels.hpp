#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace geollm::kernels {

// Dot product of `query` with every row of a row-major matrix. Each row is
// accumulated left to right in double, so both variants produce bit-identical
// scores; they differ only in how rows are distributed.
void score_rows_serial(std::span<const float> matrix, std::size_t dimension,
                       std::span<const float> query, std::span<double> scores);
void score_rows_parallel(std::span<const float> matrix, std::size_t dimension,
                         std::span<const float> query, std::span<double> scores);

// Indices of the k best rows: descending score, ties by ascending key.
std::vector<std::size_t> top_k(std::span<const double> scores, std::span<const std::string> keys,
                               std::size_t k);

// In-place L2 normalization of each row; returns false if any row has zero norm.
bool normalize_rows(std::span<float> matrix, std::size_t dimension);

}  // namespace geollm::kernels
