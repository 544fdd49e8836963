#pragma once

#include <optional>
#include <string>
#include <vector>

namespace geollm {

// Units are fixed per field: percent for sieve and Atterberg values, mm for
// grain diameters, m for elevations and dimensions, kPa for strength,
// kN/m^3 for unit weight and degrees for angles.

struct SoilSample {
  double pass_sieve4 = 100.0;
  double pass_sieve200 = 0.0;
  std::optional<double> d10;
  std::optional<double> d30;
  std::optional<double> d60;
  std::optional<double> liquid_limit;
  std::optional<double> plastic_limit;

  // Throws ValidationError on the first violated invariant.
  void validate() const;

  // 100 - pass_sieve4.
  double gravel_percent() const { return 100.0 - pass_sieve4; }
  // pass_sieve4 - pass_sieve200.
  double sand_percent() const { return pass_sieve4 - pass_sieve200; }

  bool operator==(const SoilSample&) const = default;
};

struct IndexProperties {
  std::optional<double> plasticity_index;
  std::optional<double> cu;
  std::optional<double> cc;
};

// Absent inputs give absent outputs. PL > LL or d10 == 0 are validation errors.
IndexProperties derive_index_properties(const SoilSample& sample);

// PI on the A-line for a given liquid limit. Negative below LL = 20.
constexpr double a_line(double liquid_limit) { return 0.73 * (liquid_limit - 20.0); }

struct SuPoint {
  double elevation = 0.0;
  double su = 0.0;

  bool operator==(const SuPoint&) const = default;
};

struct SoilLayer {
  double top_elevation = 0.0;
  double bottom_elevation = 0.0;
  std::string material;
  std::optional<double> undrained_strength;
  std::optional<double> unit_weight;
  std::optional<double> friction_angle;
  // Tabulated strength inside the layer; takes precedence over the uniform
  // value when present. Kept sorted by descending elevation.
  std::vector<SuPoint> su_points;

  double thickness() const { return top_elevation - bottom_elevation; }
  bool has_strength() const { return undrained_strength.has_value() || !su_points.empty(); }

  bool operator==(const SoilLayer&) const = default;
};

class SoilProfile {
 public:
  // Layers are sorted by descending top elevation; overlaps, gaps and
  // inverted layers are rejected.
  explicit SoilProfile(std::vector<SoilLayer> layers);

  const std::vector<SoilLayer>& layers() const { return layers_; }
  double top() const { return layers_.front().top_elevation; }
  double bottom() const { return layers_.back().bottom_elevation; }

  // Layer owning an elevation. A shared boundary belongs to the lower layer;
  // the profile's base belongs to the last layer. nullptr when outside.
  const SoilLayer* layer_at(double elevation) const;
  // First layer whose material matches case-insensitively.
  const SoilLayer* find_layer(const std::string& material) const;

  bool operator==(const SoilProfile&) const = default;

 private:
  std::vector<SoilLayer> layers_;
};

enum class FoundationShape { kCircular, kStrip, kRectangular };

const char* to_string(FoundationShape shape);
// Accepts "circular", "strip", "rectangular" (case-insensitive).
std::optional<FoundationShape> parse_shape(const std::string& name);

class Foundation {
 public:
  static Foundation circular(double diameter, double founding_depth = 0.0);
  static Foundation strip(double width, double founding_depth = 0.0);
  static Foundation rectangular(double width, double length, double founding_depth = 0.0);

  FoundationShape shape() const { return shape_; }
  // Diameter for circular foundations, B otherwise.
  double width() const { return width_; }
  // Equal to width for circular, 0 for strip.
  double length() const { return length_; }
  double founding_depth() const { return founding_depth_; }
  double plan_area() const;

 private:
  Foundation(FoundationShape shape, double width, double length, double depth)
      : shape_(shape), width_(width), length_(length), founding_depth_(depth) {}

  FoundationShape shape_;
  double width_;
  double length_;
  double founding_depth_;
};

}  // namespace geollm
