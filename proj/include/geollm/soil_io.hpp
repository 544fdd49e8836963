#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geollm/soil.hpp"

namespace geollm {

// Line-oriented records: whitespace-separated key=value pairs, values may be
// double-quoted, '#' starts a comment. Field names mirror the struct fields;
// pass4/pass200/ll/pl/su/gamma/phi are accepted as short aliases.
//
//   pass_sieve4=40 pass_sieve200=8 d10=0.1 d30=0.3 d60=0.6 liquid_limit=30 plastic_limit=10
//
// Profiles use one `layer` record per layer and optional `point` records
// that attach tabulated Su values to the preceding layer:
//
//   layer top_elevation=-5 bottom_elevation=-17.5 material=Clay undrained_strength=35
//   point elevation=-5 su=35

using Record = std::vector<std::pair<std::string, std::string>>;

// Tokenizes one record line. line_no is used for error locations.
Record parse_record_line(std::string_view line, std::size_t line_no = 0);

struct LabeledSample {
  std::string id;  // optional "id" field, else "sample-<n>"
  SoilSample sample;
};

std::vector<LabeledSample> read_samples_text(std::string_view text);
// Either a JSON array of objects or one JSON object per line.
std::vector<LabeledSample> read_samples_json(std::string_view text);
// Picks the reader from the extension (.json/.jsonl) or leading character.
std::vector<LabeledSample> load_samples(const std::filesystem::path& path);

SoilSample sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SoilSample& sample);

SoilProfile read_profile_text(std::string_view text);
SoilProfile read_profile_json(std::string_view text);
SoilProfile load_profile(const std::filesystem::path& path);

nlohmann::json to_json(const SoilProfile& profile);

}  // namespace geollm
