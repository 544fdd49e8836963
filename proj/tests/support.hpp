#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "geollm/soil.hpp"

namespace testing {

inline std::filesystem::path fixtures() { return GEOLLM_FIXTURES; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("geollm-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Complete, valid samples. Roughly one in five coordinates is pinned to a
// decision boundary (fines 5/12/50, LL 50, PI on the A-line, gravel = sand,
// Cu at the gate).
inline std::vector<geollm::SoilSample> random_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto pick = [&](double p) { return unit(rng) < p; };
  std::vector<geollm::SoilSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    geollm::SoilSample s;
    if (pick(0.2)) {
      const double b[] = {5.0, 12.0, 50.0, 0.0, 4.999, 12.001, 50.001};
      s.pass_sieve200 = b[rng() % 7];
      s.pass_sieve4 = s.pass_sieve200 + unit(rng) * (100.0 - s.pass_sieve200);
    } else {
      s.pass_sieve4 = 100.0 * unit(rng);
      s.pass_sieve200 = s.pass_sieve4 * unit(rng);
    }
    if (pick(0.1)) s.pass_sieve4 = std::min(100.0, 50.0 + s.pass_sieve200 / 2.0);  // gravel == sand
    if (pick(0.05)) s.pass_sieve4 = 100.0;

    const double d10 = 0.001 * std::pow(10.0, 4.0 * unit(rng));
    double cu = 1.0 + 15.0 * unit(rng);
    if (pick(0.1)) cu = pick(0.5) ? 4.0 : 6.0;
    const double d60 = d10 * cu;
    const double d30 = d10 + (d60 - d10) * unit(rng);
    s.d10 = d10;
    s.d30 = d30;
    s.d60 = d60;

    double ll = 120.0 * unit(rng);
    if (pick(0.1)) ll = 50.0;
    s.liquid_limit = ll;
    const double line = 0.73 * (ll - 20.0);
    if (pick(0.15) && line >= 0.0 && line <= ll) {
      s.plastic_limit = ll - line;
    } else {
      s.plastic_limit = ll * unit(rng);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace testing
