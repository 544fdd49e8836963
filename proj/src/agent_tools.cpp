#include "geollm/agent_tools.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/soil_io.hpp"
#include "geollm/text_util.hpp"

namespace geollm::agent {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> named_text(std::string_view text, std::string_view key) {
  for (auto& [k, v] : parse_named_values(text)) {
    if (to_lower(k) == key) return v;
  }
  return std::nullopt;
}

// Shape named by a "shape=" pair or by one of the shape words in prose.
std::optional<FoundationShape> shape_from_text(std::string_view text) {
  if (auto named = named_text(text, "shape")) return parse_shape(*named);
  const auto lower = to_lower(text);
  for (auto shape : {FoundationShape::kCircular, FoundationShape::kStrip,
                     FoundationShape::kRectangular}) {
    if (lower.find(to_string(shape)) != std::string::npos) return shape;
  }
  if (lower.find("square") != std::string::npos) return FoundationShape::kRectangular;
  return std::nullopt;
}

double require(std::optional<double> value, ToolContext& context, const char* key,
               std::string_view tool) {
  if (value) return *value;
  if (auto rec = context.read(key)) return rec->value;
  throw MissingDataError(
      fmt::format("{} needs {}: give it in the action input or store it in memory first", tool,
                  key));
}

std::optional<double> optional_input(std::optional<double> value, ToolContext& context,
                                     const char* key) {
  if (value) return value;
  if (auto rec = context.read(key)) return rec->value;
  return std::nullopt;
}

std::string report_name(std::string_view input) {
  if (auto file = named_text(input, "file")) return *file;
  if (auto report = named_text(input, "report")) return *report;
  for (const auto& word : split(input, ' ')) {
    auto w = std::string(trim(word));
    while (!w.empty() && (w.back() == ',' || w.back() == '.' || w.back() == ';')) w.pop_back();
    if (w.find('=') == std::string::npos &&
        (w.find('.') != std::string::npos || w.find('/') != std::string::npos)) {
      return w;
    }
  }
  return std::string(trim(input));
}

std::string canonical_parameter(std::string_view name) {
  const auto p = to_lower(name);
  if (p == "su" || p == "cu" || p == "undrained_strength") return kKeySu;
  if (p == "phi" || p == "friction_angle") return kKeyPhi;
  if (p == "gamma" || p == "unit_weight") return kKeyGamma;
  return std::string(name);
}

ToolResult miss(std::string narration, const std::string& parameter, std::string_view scope) {
  ToolResult r;
  r.narration = std::move(narration);
  r.observation = fmt::format("Miss: {} is not reported for {}", parameter, scope);
  return r;
}

}  // namespace

std::optional<fs::path> resolve_report(std::string_view name, const GeotechToolOptions& options) {
  const fs::path given{std::string(trim(name))};
  if (given.empty()) return std::nullopt;
  std::vector<fs::path> candidates{given};
  for (const auto& dir : options.report_dirs) candidates.push_back(dir / given.filename());
  for (const auto& base : std::vector<fs::path>(candidates)) {
    for (const char* ext : {".profile", ".json"}) {
      auto alt = base;
      alt.replace_extension(ext);
      candidates.push_back(alt);
    }
  }
  for (const auto& c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c, ec)) return c;
  }
  return std::nullopt;
}

std::optional<double> named_number(std::string_view text, const std::vector<std::string>& aliases) {
  for (const auto& [k, v] : parse_named_values(text)) {
    if (std::find(aliases.begin(), aliases.end(), k) == aliases.end()) continue;
    if (auto d = parse_double(v)) return d;
  }
  return std::nullopt;
}

std::optional<double> transfer_depth_from_text(std::string_view text) {
  if (auto d = named_number(text, {"depth", "Depth", "z", "transfer_depth"})) return d;
  static const std::regex patterns[] = {
      std::regex(R"(at\s+(\d+(?:\.\d+)?)\s*m\s+depth)", std::regex::icase),
      std::regex(R"(depth\s+of\s+(\d+(?:\.\d+)?)\s*m\b)", std::regex::icase),
      std::regex(R"((\d+(?:\.\d+)?)\s*m\s+below)", std::regex::icase),
  };
  const std::string s(text);
  for (const auto& re : patterns) {
    std::smatch m;
    if (std::regex_search(s, m, re)) return parse_double(m[1].str());
  }
  return std::nullopt;
}

ToolSpec soil_report_tool(GeotechToolOptions options) {
  ToolSpec spec;
  spec.name = "SoilReport";
  spec.description =
      "Extracts soil parameters from a soil report and stores them in long-term memory. "
      "Input: the report file name, optionally parameter=Su|phi|gamma, layer=<material>, "
      "elevation=<m asl> or depth=<m below ground>.";
  spec.parameters = {{"report", "file name"}, {"parameter", "Su (default), phi or gamma"}};
  spec.execute = [options = std::move(options)](std::string_view input,
                                                ToolContext& context) -> ToolResult {
    const auto name = report_name(input);
    const auto path = resolve_report(name, options);
    if (!path) throw IoError(fmt::format("soil report '{}' not found", name));
    const auto profile = load_profile(*path);
    std::string narration = fmt::format("Extracting soil parameters from report: {}", name);

    const auto parameter = canonical_parameter(named_text(input, "parameter").value_or("Su"));
    std::optional<double> elevation = named_number(input, {"elevation", "z_asl"});
    if (!elevation) {
      if (auto depth = named_number(input, {"depth", "Depth"})) elevation = profile.top() - *depth;
    }
    const SoilLayer* layer = nullptr;
    if (auto material = named_text(input, "layer")) {
      layer = profile.find_layer(*material);
      if (layer == nullptr) {
        throw NotFoundError(fmt::format("report {} has no layer named '{}'", name, *material));
      }
    } else if (elevation) {
      layer = profile.layer_at(*elevation);
      if (layer == nullptr) {
        throw RangeError(fmt::format("elevation {} m is outside report {} ({} to {} m)",
                                     format_compact(*elevation), name,
                                     format_compact(profile.top()),
                                     format_compact(profile.bottom())));
      }
    }

    if (parameter == kKeySu) {
      if (layer == nullptr) {
        const auto& layers = profile.layers();
        auto it = std::find_if(layers.begin(), layers.end(),
                               [](const SoilLayer& l) { return l.has_strength(); });
        if (it == layers.end()) return miss(narration, parameter, fmt::format("any layer of {}", name));
        layer = &*it;
      }
      if (!layer->has_strength()) {
        return miss(narration, parameter, fmt::format("the {} layer of {}", layer->material, name));
      }
      double su = 0.0;
      if (elevation) {
        su = interpolate_su(profile, *elevation);
        narration += fmt::format("\nInterpolated strength of {} at {} m asl. Su = {} kPa.",
                                 layer->material, format_compact(*elevation), format_compact(su));
      } else {
        su = layer_average_su(*layer);
        narration += fmt::format(
            "\nInterpolated strength of {} from a depth of {} to {} m asl. Su = {} kPa.",
            layer->material, format_compact(layer->top_elevation),
            format_compact(layer->bottom_elevation), format_compact(su));
      }
      context.write(kKeySu, su, "kPa");
      return {fmt::format("Su = {} kPa", format_compact(su)), narration, su, "kPa"};
    }

    std::optional<double> SoilLayer::*field = nullptr;
    const char* unit = "";
    if (parameter == kKeyPhi) {
      field = &SoilLayer::friction_angle;
      unit = "deg";
    } else if (parameter == kKeyGamma) {
      field = &SoilLayer::unit_weight;
      unit = "kN/m^3";
    } else {
      return miss(narration, parameter, fmt::format("report {} (known: Su, phi, gamma)", name));
    }
    if (layer == nullptr) {
      const auto& layers = profile.layers();
      auto it = std::find_if(layers.begin(), layers.end(),
                             [&](const SoilLayer& l) { return (l.*field).has_value(); });
      if (it != layers.end()) layer = &*it;
    }
    if (layer == nullptr || !(layer->*field)) {
      return miss(narration, parameter,
                  layer ? fmt::format("the {} layer of {}", layer->material, name)
                        : fmt::format("any layer of {}", name));
    }
    const double v = *(layer->*field);
    narration += fmt::format("\nReported {} of {}: {} {}.", parameter, layer->material,
                             format_compact(v), unit);
    context.write(parameter, v, unit);
    return {fmt::format("{} = {} {}", parameter, format_compact(v), unit), narration, v, unit};
  };
  return spec;
}

ToolSpec bearing_capacity_tool() {
  ToolSpec spec;
  spec.name = "BearingCapacity";
  spec.description =
      "Undrained bearing capacity q_f = 5.14 Sc Su of a shallow foundation. "
      "Input: Su = <kPa> and Sc = <shape factor>; either falls back to long-term memory.";
  spec.parameters = {{"Su", "undrained shear strength, kPa"}, {"Sc", "shape factor"}};
  spec.execute = [](std::string_view input, ToolContext& context) -> ToolResult {
    const double su =
        require(named_number(input, {"Su", "su", "S_u", "s_u", "cu", "c_u"}), context, kKeySu,
                "BearingCapacity");
    auto sc = optional_input(named_number(input, {"Sc", "sc", "S_c", "s_c"}), context, kKeySc);
    const auto shape = shape_from_text(input).value_or(FoundationShape::kCircular);
    if (!sc) {
      if (!shape_from_text(input)) {
        throw MissingDataError(
            "BearingCapacity needs Sc: give it or a foundation shape in the action input, or "
            "store it in memory first");
      }
      sc = shape_factor(shape);
    }
    const auto result = bearing_capacity_undrained(su, *sc);
    context.write(kKeyQf, result.q_f, "kPa");
    return {fmt::format("Bearing capacity = {} kPa", format_compact(result.q_f)),
            fmt::format("Calculate bearing capacity of a {} foundation with soil parameters: "
                        "{{'Su': {}}}.",
                        to_string(shape), format_with_decimal(su)),
            result.q_f, "kPa"};
  };
  return spec;
}

ToolSpec shape_factor_tool(ShapeFactorTable table) {
  ToolSpec spec;
  spec.name = "ShapeFactor";
  spec.description =
      "Looks up the bearing shape factor Sc for a foundation shape (circular, strip or "
      "rectangular) and stores it in long-term memory.";
  spec.parameters = {{"shape", "circular | strip | rectangular"}};
  spec.execute = [table](std::string_view input, ToolContext& context) -> ToolResult {
    const auto shape = shape_from_text(input);
    if (!shape) {
      throw ValidationError(fmt::format(
          "ShapeFactor needs a shape (circular, strip or rectangular), got '{}'", trim(input)));
    }
    const double sc = shape_factor(*shape, table);
    context.write(kKeySc, sc, "");
    return {fmt::format("Shape factor Sc = {}", format_compact(sc)),
            fmt::format("Look up the shape factor of a {} foundation.", to_string(*shape)), sc,
            ""};
  };
  return spec;
}

ToolSpec max_load_tool() {
  ToolSpec spec;
  spec.name = "MaxLoad";
  spec.description =
      "Maximum load carried by a layer at a given depth: the bearing capacity acts over the "
      "foundation area spread by 2:1 stress transfer. Input: q_f = <kPa>, foundation "
      "dimension (D or φ = <m>, or B and L for rectangles) and the depth of the layer in m.";
  spec.parameters = {{"q_f", "bearing capacity, kPa"},
                     {"D", "foundation diameter or B and L, m"},
                     {"depth", "depth of the loaded layer, m"}};
  spec.execute = [](std::string_view input, ToolContext& context) -> ToolResult {
    const double q_f =
        require(named_number(input, {"q_f", "qf", "q_ult", "qult", "q", "Q_f"}), context, kKeyQf,
                "MaxLoad");
    const auto depth = transfer_depth_from_text(input);
    const double z = require(depth, context, kKeyDepth, "MaxLoad");
    const auto width = named_number(input, {"B", "width"});
    const auto length = named_number(input, {"L", "length"});
    auto shape = shape_from_text(input);
    if (!shape) shape = width ? (length ? FoundationShape::kRectangular : FoundationShape::kStrip)
                              : FoundationShape::kCircular;

    std::optional<Foundation> foundation;
    if (*shape == FoundationShape::kCircular) {
      const auto d = named_number(input, {"φ", "ϕ", "D", "d", "diameter", "Diameter"});
      const double diameter = require(d, context, kKeyDiameter, "MaxLoad");
      if (d) context.write(kKeyDiameter, diameter, "m");
      foundation = Foundation::circular(diameter);
    } else if (*shape == FoundationShape::kStrip) {
      foundation = Foundation::strip(require(width, context, "B", "MaxLoad"));
    } else {
      foundation = Foundation::rectangular(require(width, context, "B", "MaxLoad"),
                                           require(length, context, "L", "MaxLoad"));
    }
    if (depth) context.write(kKeyDepth, z, "m");
    const double load = max_load(q_f, *foundation, z);
    context.write(kKeyMaxLoad, load, "kN");
    return {fmt::format("Max. Load = {} kN", format_compact(load)),
            fmt::format("Spread q_f = {} kPa under the {} foundation to {} m width at {} m depth "
                        "(2:1 stress transfer).",
                        format_compact(q_f), to_string(foundation->shape()),
                        format_compact(stress_spread_width(foundation->width(), z)),
                        format_compact(z)),
            load, "kN"};
  };
  return spec;
}

ToolRegistry geotech_registry(const GeotechToolOptions& options,
                              const std::vector<std::string>& names) {
  std::vector<ToolSpec> all{soil_report_tool(options), bearing_capacity_tool(),
                            shape_factor_tool(options.shape_factors), max_load_tool()};
  ToolRegistry registry;
  if (names.empty()) {
    for (auto& t : all) registry.register_tool(std::move(t));
    return registry;
  }
  for (const auto& n : names) {
    auto it = std::find_if(all.begin(), all.end(), [&](const ToolSpec& t) { return t.name == n; });
    if (it == all.end()) {
      throw RegistrationError(fmt::format(
          "unknown tool '{}' (available: SoilReport, BearingCapacity, ShapeFactor, MaxLoad)", n));
    }
    registry.register_tool(*it);
  }
  return registry;
}

}  // namespace geollm::agent
