#include "geollm/uscs.hpp"

#include <array>
#include <cstddef>

#include <fmt/format.h>

#include "geollm/error.hpp"

namespace geollm {

namespace {

constexpr std::array<std::string_view, kUscsSymbolCount> kNames = {
    "GW", "GP", "GM", "GC", "GM-GC",
    "GW-GM", "GW-GC", "GW-GM-GC", "GP-GM", "GP-GC", "GP-GM-GC",
    "SW", "SP", "SM", "SC", "SM-SC",
    "SW-SM", "SW-SC", "SW-SM-SC", "SP-SM", "SP-SC", "SP-SM-SC",
    "CL", "CH", "ML", "MH", "CL-ML", "MH-CH",
};

enum class ALinePosition { kBelow, kAbove, kOn };

struct Fraction {
  bool gravel;
  // Symbols indexed [graded][position]; graded 0 = W, 1 = P.
  UscsSymbol clean[2];
  UscsSymbol dirty[3];
  UscsSymbol dual[2][3];
};

constexpr Fraction kGravel = {
    true,
    {UscsSymbol::kGW, UscsSymbol::kGP},
    {UscsSymbol::kGM, UscsSymbol::kGC, UscsSymbol::kGM_GC},
    {{UscsSymbol::kGW_GM, UscsSymbol::kGW_GC, UscsSymbol::kGW_GM_GC},
     {UscsSymbol::kGP_GM, UscsSymbol::kGP_GC, UscsSymbol::kGP_GM_GC}},
};

constexpr Fraction kSand = {
    false,
    {UscsSymbol::kSW, UscsSymbol::kSP},
    {UscsSymbol::kSM, UscsSymbol::kSC, UscsSymbol::kSM_SC},
    {{UscsSymbol::kSW_SM, UscsSymbol::kSW_SC, UscsSymbol::kSW_SM_SC},
     {UscsSymbol::kSP_SM, UscsSymbol::kSP_SC, UscsSymbol::kSP_SM_SC}},
};

[[noreturn]] void missing(const char* field, const char* branch) {
  throw ClassificationError(fmt::format("{} branch requires {}", branch, field), field);
}

// Cu and Cc for the gradation gate; d-sizes are required.
bool well_graded(const SoilSample& s, const UscsConfig& cfg, bool gravel,
                 std::vector<std::string>& why) {
  const char* branch = gravel ? "gravel gradation" : "sand gradation";
  if (!s.d10) missing("d10", branch);
  if (!s.d30) missing("d30", branch);
  if (!s.d60) missing("d60", branch);
  const auto props = derive_index_properties(s);
  const double cu = *props.cu;
  const double cc = *props.cc;
  const double cu_min = gravel ? cfg.gravel_cu_min : cfg.sand_cu_min;
  const bool ok = cu > cu_min && cc > cfg.cc_lower && cc < cfg.cc_upper;
  why.push_back(ok ? fmt::format("well-graded:Cu>{}&{}<Cc<{}", cu_min, cfg.cc_lower, cfg.cc_upper)
                   : fmt::format("poorly-graded:not(Cu>{}&{}<Cc<{})", cu_min, cfg.cc_lower,
                                 cfg.cc_upper));
  return ok;
}

ALinePosition plasticity_position(const SoilSample& s, const char* branch,
                                  std::vector<std::string>& why) {
  if (!s.liquid_limit) missing("liquid_limit", branch);
  if (!s.plastic_limit) missing("plastic_limit", branch);
  const double pi = *derive_index_properties(s).plasticity_index;
  const double line = a_line(*s.liquid_limit);
  if (pi > line) {
    why.emplace_back("above-a-line:PI>0.73(LL-20)");
    return ALinePosition::kAbove;
  }
  if (pi < line) {
    why.emplace_back("below-a-line:PI<0.73(LL-20)");
    return ALinePosition::kBelow;
  }
  why.emplace_back("on-a-line:PI=0.73(LL-20)");
  return ALinePosition::kOn;
}

ClassificationCode classify_coarse(const SoilSample& s, const UscsConfig& cfg,
                                   std::vector<std::string> why) {
  const bool gravel = s.gravel_percent() > s.sand_percent();
  why.emplace_back(gravel ? "gravel:gravel%>sand%" : "sand:gravel%<=sand%");
  const Fraction& f = gravel ? kGravel : kSand;
  const double fines = s.pass_sieve200;
  if (fines < cfg.clean_fines_below) {
    why.push_back(fmt::format("clean:pass200<{}", cfg.clean_fines_below));
    const bool w = well_graded(s, cfg, gravel, why);
    return {f.clean[w ? 0 : 1], std::move(why)};
  }
  const auto pos_index = [](ALinePosition p) { return static_cast<int>(p); };
  if (fines > cfg.dirty_fines_above) {
    why.push_back(fmt::format("with-fines:pass200>{}", cfg.dirty_fines_above));
    const auto pos = plasticity_position(s, gravel ? "gravel fines" : "sand fines", why);
    return {f.dirty[pos_index(pos)], std::move(why)};
  }
  why.push_back(
      fmt::format("borderline:{}<=pass200<={}", cfg.clean_fines_below, cfg.dirty_fines_above));
  const bool w = well_graded(s, cfg, gravel, why);
  const auto pos = plasticity_position(s, gravel ? "gravel borderline" : "sand borderline", why);
  return {f.dual[w ? 0 : 1][pos_index(pos)], std::move(why)};
}

ClassificationCode classify_fine(const SoilSample& s, const UscsConfig& cfg,
                                 std::vector<std::string> why) {
  if (!s.liquid_limit) missing("liquid_limit", "fine-grained");
  if (!s.plastic_limit) missing("plastic_limit", "fine-grained");
  const bool high = *s.liquid_limit >= cfg.high_plasticity_ll;
  why.push_back(high ? fmt::format("high-plasticity:LL>={}", cfg.high_plasticity_ll)
                     : fmt::format("low-plasticity:LL<{}", cfg.high_plasticity_ll));
  switch (plasticity_position(s, "fine-grained", why)) {
    case ALinePosition::kAbove: return {high ? UscsSymbol::kCH : UscsSymbol::kCL, std::move(why)};
    case ALinePosition::kBelow: return {high ? UscsSymbol::kMH : UscsSymbol::kML, std::move(why)};
    case ALinePosition::kOn:
      return {high ? UscsSymbol::kMH_CH : UscsSymbol::kCL_ML, std::move(why)};
  }
  throw ClassificationError("unreachable A-line position", "");
}

ClassificationOutcome classify_one(const SoilSample& sample, const UscsConfig& config) {
  ClassificationOutcome out;
  try {
    out.code = classify(sample, config);
  } catch (const ClassificationError& e) {
    out.error = e.what();
    out.missing_field = e.missing_field();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::string_view to_string(UscsSymbol symbol) {
  return kNames[static_cast<std::size_t>(symbol)];
}

std::optional<UscsSymbol> parse_uscs_symbol(std::string_view text) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return static_cast<UscsSymbol>(i);
  }
  return std::nullopt;
}

ClassificationCode classify(const SoilSample& sample, const UscsConfig& config) {
  sample.validate();
  std::vector<std::string> why;
  if (sample.pass_sieve200 <= config.coarse_max_fines) {
    why.push_back(fmt::format("coarse:pass200<={}", config.coarse_max_fines));
    return classify_coarse(sample, config, std::move(why));
  }
  why.push_back(fmt::format("fine:pass200>{}", config.coarse_max_fines));
  return classify_fine(sample, config, std::move(why));
}

std::vector<ClassificationOutcome> classify_batch_serial(std::span<const SoilSample> samples,
                                                         const UscsConfig& config) {
  std::vector<ClassificationOutcome> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(classify_one(s, config));
  return out;
}

std::vector<ClassificationOutcome> classify_batch(std::span<const SoilSample> samples,
                                                  const UscsConfig& config) {
  std::vector<ClassificationOutcome> out(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = classify_one(samples[static_cast<std::size_t>(i)], config);
  }
  return out;
}

}  // namespace geollm
