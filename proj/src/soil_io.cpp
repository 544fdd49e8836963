#include "geollm/soil_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm {

namespace {

const std::map<std::string, std::string, std::less<>>& field_aliases() {
  static const std::map<std::string, std::string, std::less<>> aliases = {
      {"pass4", "pass_sieve4"},
      {"pass200", "pass_sieve200"},
      {"ll", "liquid_limit"},
      {"pl", "plastic_limit"},
      {"top", "top_elevation"},
      {"bottom", "bottom_elevation"},
      {"su", "undrained_strength"},
      {"gamma", "unit_weight"},
      {"phi", "friction_angle"},
  };
  return aliases;
}

std::string canonical(std::string_view key) {
  auto lowered = to_lower(key);
  const auto& aliases = field_aliases();
  if (auto it = aliases.find(lowered); it != aliases.end()) return it->second;
  return lowered;
}

double number_field(const std::string& key, const std::string& value, std::size_t line_no) {
  auto v = parse_double(value);
  if (!v) throw ParseError(fmt::format("field '{}' is not a number: '{}'", key, value), line_no, 1);
  return *v;
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

SoilSample sample_from_record(const Record& record, std::size_t line_no, std::string* id) {
  SoilSample s;
  bool have4 = false;
  bool have200 = false;
  for (const auto& [raw_key, value] : record) {
    const auto key = canonical(raw_key);
    if (key == "id") {
      if (id) *id = value;
      continue;
    }
    const double v = number_field(key, value, line_no);
    if (key == "pass_sieve4") {
      s.pass_sieve4 = v;
      have4 = true;
    } else if (key == "pass_sieve200") {
      s.pass_sieve200 = v;
      have200 = true;
    } else if (key == "d10") {
      s.d10 = v;
    } else if (key == "d30") {
      s.d30 = v;
    } else if (key == "d60") {
      s.d60 = v;
    } else if (key == "liquid_limit") {
      s.liquid_limit = v;
    } else if (key == "plastic_limit") {
      s.plastic_limit = v;
    } else {
      throw ParseError(fmt::format("unknown sample field '{}'", raw_key), line_no, 1);
    }
  }
  if (!have200) throw ParseError("sample record lacks pass_sieve200", line_no, 1);
  if (!have4) s.pass_sieve4 = 100.0;
  return s;
}

SoilLayer layer_from_record(const Record& record, std::size_t line_no) {
  SoilLayer layer;
  bool have_top = false;
  bool have_bottom = false;
  for (const auto& [raw_key, value] : record) {
    const auto key = canonical(raw_key);
    if (key == "material") {
      layer.material = value;
    } else if (key == "top_elevation") {
      layer.top_elevation = number_field(key, value, line_no);
      have_top = true;
    } else if (key == "bottom_elevation") {
      layer.bottom_elevation = number_field(key, value, line_no);
      have_bottom = true;
    } else if (key == "undrained_strength") {
      layer.undrained_strength = number_field(key, value, line_no);
    } else if (key == "unit_weight") {
      layer.unit_weight = number_field(key, value, line_no);
    } else if (key == "friction_angle") {
      layer.friction_angle = number_field(key, value, line_no);
    } else {
      throw ParseError(fmt::format("unknown layer field '{}'", raw_key), line_no, 1);
    }
  }
  if (!have_top || !have_bottom) {
    throw ParseError("layer record needs top_elevation and bottom_elevation", line_no, 1);
  }
  return layer;
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ParseError(fmt::format("field '{}' must be a number", key));
  return j.at(key).get<double>();
}

}  // namespace

Record parse_record_line(std::string_view line, std::size_t line_no) {
  Record record;
  std::size_t i = 0;
  const auto at_space = [&](std::size_t k) {
    return std::isspace(static_cast<unsigned char>(line[k])) != 0;
  };
  while (i < line.size()) {
    while (i < line.size() && at_space(i)) ++i;
    if (i >= line.size()) break;
    const std::size_t key_start = i;
    while (i < line.size() && line[i] != '=' && !at_space(i)) ++i;
    if (i >= line.size() || line[i] != '=') {
      throw ParseError(fmt::format("expected key=value, found '{}'",
                                   line.substr(key_start, i - key_start)),
                       line_no, key_start + 1);
    }
    std::string key(line.substr(key_start, i - key_start));
    if (key.empty()) throw ParseError("empty key", line_no, key_start + 1);
    ++i;  // '='
    std::string value;
    if (i < line.size() && line[i] == '"') {
      const std::size_t quote_start = i++;
      while (i < line.size() && line[i] != '"') value += line[i++];
      if (i >= line.size()) throw ParseError("unterminated quote", line_no, quote_start + 1);
      ++i;
    } else {
      while (i < line.size() && !at_space(i)) value += line[i++];
    }
    record.emplace_back(std::move(key), std::move(value));
  }
  return record;
}

std::vector<LabeledSample> read_samples_text(std::string_view text) {
  std::vector<LabeledSample> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    LabeledSample labeled;
    labeled.sample = sample_from_record(parse_record_line(line, line_no), line_no, &labeled.id);
    if (labeled.id.empty()) labeled.id = fmt::format("sample-{}", out.size() + 1);
    out.push_back(std::move(labeled));
  }
  return out;
}

SoilSample sample_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("sample must be a JSON object");
  SoilSample s;
  for (const auto& [key, value] : j.items()) {
    const auto name = canonical(key);
    if (name == "id") continue;
    static const char* known[] = {"pass_sieve4", "pass_sieve200", "d10", "d30", "d60",
                                  "liquid_limit", "plastic_limit"};
    if (std::find(std::begin(known), std::end(known), name) == std::end(known)) {
      throw ParseError(fmt::format("unknown sample field '{}'", key));
    }
    if (!value.is_null() && !value.is_number()) {
      throw ParseError(fmt::format("field '{}' must be a number", key));
    }
  }
  nlohmann::json c;
  for (const auto& [key, value] : j.items()) c[canonical(key)] = value;
  auto pass200 = optional_number(c, "pass_sieve200");
  if (!pass200) throw ParseError("sample lacks pass_sieve200");
  s.pass_sieve200 = *pass200;
  s.pass_sieve4 = optional_number(c, "pass_sieve4").value_or(100.0);
  s.d10 = optional_number(c, "d10");
  s.d30 = optional_number(c, "d30");
  s.d60 = optional_number(c, "d60");
  s.liquid_limit = optional_number(c, "liquid_limit");
  s.plastic_limit = optional_number(c, "plastic_limit");
  return s;
}

nlohmann::json to_json(const SoilSample& s) {
  nlohmann::json j;
  j["pass_sieve4"] = s.pass_sieve4;
  j["pass_sieve200"] = s.pass_sieve200;
  const auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("d10", s.d10);
  put("d30", s.d30);
  put("d60", s.d60);
  put("liquid_limit", s.liquid_limit);
  put("plastic_limit", s.plastic_limit);
  return j;
}

std::vector<LabeledSample> read_samples_json(std::string_view text) {
  std::vector<LabeledSample> out;
  const auto add = [&](const nlohmann::json& j) {
    LabeledSample labeled;
    labeled.sample = sample_from_json(j);
    labeled.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                         : fmt::format("sample-{}", out.size() + 1);
    out.push_back(std::move(labeled));
  };
  const auto body = trim(text);
  if (!body.empty() && body.front() == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    for (const auto& item : doc) add(item);
    return out;
  }
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    try {
      add(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no, 1);
    }
  }
  return out;
}

std::vector<LabeledSample> load_samples(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto ext = to_lower(path.extension().string());
  const auto body = trim(text);
  if (ext == ".json" || ext == ".jsonl" || (!body.empty() && (body[0] == '[' || body[0] == '{'))) {
    return read_samples_json(text);
  }
  return read_samples_text(text);
}

SoilProfile read_profile_text(std::string_view text) {
  std::vector<SoilLayer> layers;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto space = line.find_first_of(" \t");
    const auto kind = to_lower(line.substr(0, space));
    const auto rest = space == std::string_view::npos ? std::string_view{} : line.substr(space);
    if (kind == "layer") {
      layers.push_back(layer_from_record(parse_record_line(rest, line_no), line_no));
    } else if (kind == "point") {
      if (layers.empty()) throw ParseError("point record before any layer", line_no, 1);
      SuPoint p;
      bool have_e = false;
      bool have_su = false;
      for (const auto& [raw_key, value] : parse_record_line(rest, line_no)) {
        const auto key = to_lower(raw_key);
        if (key == "elevation") {
          p.elevation = number_field(key, value, line_no);
          have_e = true;
        } else if (key == "su" || key == "undrained_strength") {
          p.su = number_field(key, value, line_no);
          have_su = true;
        } else {
          throw ParseError(fmt::format("unknown point field '{}'", raw_key), line_no, 1);
        }
      }
      if (!have_e || !have_su) throw ParseError("point record needs elevation and su", line_no, 1);
      layers.back().su_points.push_back(p);
    } else {
      throw ParseError(fmt::format("unknown profile record '{}'", kind), line_no, 1);
    }
  }
  return SoilProfile(std::move(layers));
}

SoilProfile read_profile_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  const auto& items = doc.is_array() ? doc : doc.at("layers");
  std::vector<SoilLayer> layers;
  for (const auto& item : items) {
    SoilLayer layer;
    nlohmann::json c;
    for (const auto& [key, value] : item.items()) c[canonical(key)] = value;
    auto top = optional_number(c, "top_elevation");
    auto bottom = optional_number(c, "bottom_elevation");
    if (!top || !bottom) throw ParseError("layer needs top_elevation and bottom_elevation");
    layer.top_elevation = *top;
    layer.bottom_elevation = *bottom;
    layer.material = c.value("material", std::string{});
    layer.undrained_strength = optional_number(c, "undrained_strength");
    layer.unit_weight = optional_number(c, "unit_weight");
    layer.friction_angle = optional_number(c, "friction_angle");
    if (c.contains("su_points")) {
      for (const auto& p : c.at("su_points")) {
        layer.su_points.push_back({p.at("elevation").get<double>(), p.at("su").get<double>()});
      }
    }
    layers.push_back(std::move(layer));
  }
  return SoilProfile(std::move(layers));
}

SoilProfile load_profile(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto body = trim(text);
  if (!body.empty() && (body[0] == '{' || body[0] == '[')) return read_profile_json(text);
  return read_profile_text(text);
}

nlohmann::json to_json(const SoilProfile& profile) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : profile.layers()) {
    nlohmann::json j;
    j["top_elevation"] = l.top_elevation;
    j["bottom_elevation"] = l.bottom_elevation;
    j["material"] = l.material;
    if (l.undrained_strength) j["undrained_strength"] = *l.undrained_strength;
    if (l.unit_weight) j["unit_weight"] = *l.unit_weight;
    if (l.friction_angle) j["friction_angle"] = *l.friction_angle;
    if (!l.su_points.empty()) {
      auto pts = nlohmann::json::array();
      for (const auto& p : l.su_points) pts.push_back({{"elevation", p.elevation}, {"su", p.su}});
      j["su_points"] = pts;
    }
    layers.push_back(j);
  }
  return {{"layers", layers}};
}

}  // namespace geollm
