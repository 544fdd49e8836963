#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geollm/soil.hpp"

namespace geollm {

enum class UscsSymbol {
  kGW, kGP, kGM, kGC, kGM_GC,
  kGW_GM, kGW_GC, kGW_GM_GC, kGP_GM, kGP_GC, kGP_GM_GC,
  kSW, kSP, kSM, kSC, kSM_SC,
  kSW_SM, kSW_SC, kSW_SM_SC, kSP_SM, kSP_SC, kSP_SM_SC,
  kCL, kCH, kML, kMH, kCL_ML, kMH_CH,
};

inline constexpr std::size_t kUscsSymbolCount = 28;

std::string_view to_string(UscsSymbol symbol);
std::optional<UscsSymbol> parse_uscs_symbol(std::string_view text);

// Thresholds of the decision list. Gradation gates follow ASTM D2487:
// Cu > 4 for gravel, Cu > 6 for sand.
struct UscsConfig {
  double coarse_max_fines = 50.0;   // pass200 <= this is coarse-grained
  double clean_fines_below = 5.0;   // fines < this: clean (GW/GP)
  double dirty_fines_above = 12.0;  // fines > this: GM/GC; 5 <= fines <= 12 is dual
  double gravel_cu_min = 4.0;       // well graded needs Cu > gravel_cu_min
  double sand_cu_min = 6.0;
  double cc_lower = 1.0;            // strictly between
  double cc_upper = 3.0;
  double high_plasticity_ll = 50.0; // LL >= this is "H"
};

struct ClassificationCode {
  UscsSymbol symbol;
  // Identifiers of the rules that fired, in evaluation order.
  std::vector<std::string> rationale;
};

// Throws ValidationError for invalid samples and ClassificationError naming
// the first missing field the reached branch needs.
ClassificationCode classify(const SoilSample& sample, const UscsConfig& config = {});

struct ClassificationOutcome {
  std::optional<ClassificationCode> code;
  std::string error;          // empty on success
  std::string missing_field;  // set for ClassificationError

  bool ok() const { return code.has_value(); }
};

// Element-wise classify; order preserved, per-element failures captured.
// OpenMP-parallel over samples.
std::vector<ClassificationOutcome> classify_batch(std::span<const SoilSample> samples,
                                                  const UscsConfig& config = {});
// Single-threaded reference for classify_batch.
std::vector<ClassificationOutcome> classify_batch_serial(std::span<const SoilSample> samples,
                                                         const UscsConfig& config = {});

}  // namespace geollm
