// Serial vs OpenMP timings for the retrieval scan and batch classification.
// Usage: bench_kernels [rows] [dimension] [repeats]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "geollm/kernels.hpp"
#include "geollm/soil.hpp"
#include "geollm/uscs.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::cout << fmt::format("{:<18} serial {:9.3f} ms  parallel {:9.3f} ms  speedup {:5.2f}x  {}\n",
                           name, serial, parallel, serial / parallel,
                           identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 100000;
  const std::size_t dim = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 256;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;
  std::cout << fmt::format("threads {}  rows {}  dimension {}  repeats {}\n", omp_get_max_threads(),
                           rows, dim, repeats);

  std::mt19937_64 rng(42);
  std::normal_distribution<float> normal;
  std::vector<float> matrix(rows * dim);
  for (auto& v : matrix) v = normal(rng);
  geollm::kernels::normalize_rows(matrix, dim);
  std::vector<float> query(matrix.begin(), matrix.begin() + static_cast<long>(dim));
  std::vector<double> s1(rows), s2(rows);

  const double scan_serial =
      best_ms(repeats, [&] { geollm::kernels::score_rows_serial(matrix, dim, query, s1); });
  const double scan_parallel =
      best_ms(repeats, [&] { geollm::kernels::score_rows_parallel(matrix, dim, query, s2); });
  report("score_rows", scan_serial, scan_parallel, s1 == s2);

  std::uniform_real_distribution<double> pct(0.0, 100.0), size(0.01, 10.0), ll(10.0, 100.0);
  std::vector<geollm::SoilSample> samples(rows / 4 + 1);
  for (auto& s : samples) {
    s.pass_sieve4 = pct(rng);
    s.pass_sieve200 = std::uniform_real_distribution<double>(0.0, s.pass_sieve4)(rng);
    const double d10 = size(rng);
    s.d10 = d10;
    s.d30 = d10 * (1.0 + pct(rng) / 20.0);
    s.d60 = *s.d30 * (1.0 + pct(rng) / 20.0);
    s.liquid_limit = ll(rng);
    s.plastic_limit = *s.liquid_limit * pct(rng) / 100.0;
  }
  std::vector<geollm::ClassificationOutcome> c1, c2;
  const double cls_serial =
      best_ms(repeats, [&] { c1 = geollm::classify_batch_serial(samples); });
  const double cls_parallel = best_ms(repeats, [&] { c2 = geollm::classify_batch(samples); });
  bool same = c1.size() == c2.size();
  for (std::size_t i = 0; same && i < c1.size(); ++i) {
    same = c1[i].ok() == c2[i].ok() && (!c1[i].ok() || c1[i].code->symbol == c2[i].code->symbol);
  }
  report("classify_batch", cls_serial, cls_parallel, same);
  return (s1 == s2 && same) ? EXIT_SUCCESS : EXIT_FAILURE;
}
