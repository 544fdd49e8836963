#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geollm/soil.hpp"

namespace geollm {

// Undrained bearing factor. Kept at the rounded 5.14 rather than 2 + pi.
inline constexpr double kUndrainedNc = 5.14;
inline constexpr double kDefaultRequiredFos = 1.25;
inline constexpr double kDefaultAuditTolerance = 0.01;

enum class BearingMethod { kUndrained, kGeneral };

const char* to_string(BearingMethod method);

struct BearingFactors {
  double nc = 0.0;
  double nq = 0.0;
  double ngamma = 0.0;
  double sc = 1.0;
};

struct BearingInputs {
  std::optional<double> su;
  std::optional<double> cohesion;
  std::optional<double> friction_angle;  // degrees
  std::optional<double> unit_weight;
  std::optional<double> width;
  std::optional<double> surcharge;
};

struct BearingResult {
  double q_f = 0.0;  // kPa
  BearingMethod method = BearingMethod::kUndrained;
  BearingInputs inputs;
  BearingFactors factors;
};

// q_f = Nc * Sc * Su.
BearingResult bearing_capacity_undrained(double su, double shape_factor);

// Nq = e^(pi tan phi) tan^2(45 + phi/2); Nc = (Nq - 1) cot phi, or 5.14 at phi = 0;
// Ngamma = 2 (Nq + 1) tan phi.
BearingFactors general_bearing_factors(double friction_angle_deg);

// q_ult = c Nc + sigma_v Nq + 0.5 gamma B Ngamma. Requires phi < 60 degrees.
BearingResult bearing_capacity_general(double cohesion, double friction_angle_deg,
                                       double unit_weight, double width, double surcharge);

// Shape factors are stored constants, not derived.
struct ShapeFactorTable {
  double circular = 1.11;
  double strip = 1.00;
  double rectangular = 1.11;
};

double shape_factor(FoundationShape shape, const ShapeFactorTable& table = {});

// 2:1 spread: the loaded dimension grows by the depth (depth/2 per side).
double stress_spread_width(double surface_dimension, double depth);

// Load carried over the spread area at transfer_depth:
// circular pi/4 (D + z)^2, rectangular (B + z)(L + z). Strip foundations are
// rejected with UnsupportedError; use max_load_per_unit_length.
double max_load(double q_f, const Foundation& foundation, double transfer_depth);
// kN per metre run of a strip: q_f (B + z).
double max_load_per_unit_length(double q_f, const Foundation& foundation, double transfer_depth);

// Su at an elevation. Uniform layers return their Su; layers with tabulated
// points interpolate linearly and hold the end values beyond the outermost
// points. RangeError outside the profile, MissingDataError for a layer with
// no strength data.
double interpolate_su(const SoilProfile& profile, double elevation);

// Thickness-weighted mean Su over one layer (exact for the piecewise-linear
// interpolant).
double layer_average_su(const SoilLayer& layer);

// ceil(volume (1 + loss) / capacity). Quotients within 1e-12 relative of an
// integer snap to it so 500 * 1.1 / 25 yields 22 regardless of rounding.
long long truck_count(double volume, double capacity, double loss_fraction);

// Rankine active coefficient (1 - sin phi) / (1 + sin phi).
double active_pressure_coefficient(double friction_angle_deg);

struct SlidingInputs {
  double vertical_load = 0.0;        // sum V, kN/m
  std::optional<double> base_friction_coefficient;
  std::optional<double> base_friction_angle;  // degrees; mu = tan(delta)
  double backfill_friction_angle = 0.0;       // degrees
  double backfill_unit_weight = 0.0;          // kN/m^3
  double wall_height = 0.0;                   // m
  double required_fos = kDefaultRequiredFos;
};

struct SlidingResult {
  double ka = 0.0;
  double active_thrust = 0.0;  // kN/m
  double resisting_force = 0.0;
  double fos = 0.0;
  bool ok = false;
};

// FoS = mu * sum V / Pa with Pa = 0.5 Ka gamma H^2; passive resistance ignored.
SlidingResult wall_sliding_fos(const SlidingInputs& in);
// Same check from an already computed thrust.
SlidingResult wall_sliding_fos(double resisting_force, double active_thrust,
                               double required_fos = kDefaultRequiredFos);

struct EccentricityResult {
  double e = 0.0;
  bool middle_third_ok = false;
};

// e = M_net / V about the base centre; ok iff |e| <= B/6.
EccentricityResult wall_eccentricity(double net_moment, double vertical_load, double base_width);

struct WallBearingResult {
  double effective_width = 0.0;
  double q = 0.0;
  double allowable = 0.0;
  bool ok = false;
};

// Meyerhof reduced width: q = V / (B - 2|e|), ok iff q <= q_ult / FoS.
WallBearingResult wall_bearing_check(double vertical_load, double base_width, double e,
                                     double q_ult, double required_fos = kDefaultRequiredFos);

struct WallCheckInputs {
  SlidingInputs sliding;
  double net_moment = 0.0;  // about the base centre, kN m/m
  double base_width = 0.0;
  double q_ult = 0.0;
};

struct WallCheckReport {
  SlidingResult sliding;
  EccentricityResult eccentricity;
  std::optional<WallBearingResult> bearing;  // absent if B - 2|e| <= 0
  std::string bearing_error;
  double required_fos = kDefaultRequiredFos;

  double sliding_fos() const { return sliding.fos; }
  bool all_ok() const { return sliding.ok && eccentricity.middle_third_ok && bearing && bearing->ok; }
};

WallCheckReport check_wall(const WallCheckInputs& in);

struct AuditResult {
  double recomputed = 0.0;
  double claimed = 0.0;
  double difference = 0.0;
  bool matches = false;
};

// Recomputes sum(coefficient * factor) and compares it with a claimed value.
AuditResult audit_linear_claim(const std::vector<std::pair<double, double>>& terms,
                               double claimed, double tolerance = kDefaultAuditTolerance);

}  // namespace geollm
