#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geollm/agent.hpp"
#include "geollm/geotech.hpp"

namespace geollm::agent {

// Memory keys written and read by the geotechnical tools.
inline constexpr const char* kKeySu = "Su";            // kPa
inline constexpr const char* kKeySc = "Sc";            // dimensionless
inline constexpr const char* kKeyQf = "q_f";           // kPa
inline constexpr const char* kKeyDiameter = "D";       // m
inline constexpr const char* kKeyDepth = "depth";      // m below ground
inline constexpr const char* kKeyMaxLoad = "max_load"; // kN
inline constexpr const char* kKeyPhi = "phi";          // degrees
inline constexpr const char* kKeyGamma = "gamma";      // kN/m^3

struct GeotechToolOptions {
  // Directories searched for soil reports named in an action input.
  std::vector<std::filesystem::path> report_dirs;
  ShapeFactorTable shape_factors;
};

// Resolves a report named by the model: the path itself, then each report
// directory joined with the name, then the same stem with a .profile or
// .json extension (so "pisa_report.pdf" finds pisa_report.profile).
std::optional<std::filesystem::path> resolve_report(std::string_view name,
                                                    const GeotechToolOptions& options);

// Value of the first named pair whose key matches one of the aliases.
std::optional<double> named_number(std::string_view text, const std::vector<std::string>& aliases);

// Depth of load transfer from "depth = 5", "at 5 m depth" or "depth of 5 m".
std::optional<double> transfer_depth_from_text(std::string_view text);

ToolSpec soil_report_tool(GeotechToolOptions options);
ToolSpec bearing_capacity_tool();
ToolSpec shape_factor_tool(ShapeFactorTable table = {});
ToolSpec max_load_tool();

// SoilReport, BearingCapacity, ShapeFactor and MaxLoad, or the named subset.
// Unknown names raise RegistrationError.
ToolRegistry geotech_registry(const GeotechToolOptions& options,
                              const std::vector<std::string>& names = {});

}  // namespace geollm::agent
