#include "geollm/geotech.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geollm/error.hpp"

namespace geollm {

namespace {

constexpr double kPi = std::numbers::pi;

double radians(double degrees) { return degrees * kPi / 180.0; }

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{} must be >= 0, got {}", name, v));
  }
}

// Interpolant over a layer's tabulated points (sorted by descending elevation).
double su_from_points(const std::vector<SuPoint>& pts, double elevation) {
  if (elevation >= pts.front().elevation) return pts.front().su;
  if (elevation <= pts.back().elevation) return pts.back().su;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& upper = pts[i - 1];
    const auto& lower = pts[i];
    if (elevation >= lower.elevation) {
      const double span = upper.elevation - lower.elevation;
      if (span == 0.0) return lower.su;
      const double t = (upper.elevation - elevation) / span;
      return upper.su + t * (lower.su - upper.su);
    }
  }
  return pts.back().su;
}

}  // namespace

const char* to_string(BearingMethod method) {
  return method == BearingMethod::kUndrained ? "undrained" : "general";
}

BearingResult bearing_capacity_undrained(double su, double shape_factor) {
  if (!(su >= 0.0) || !std::isfinite(su)) {
    throw ValidationError(fmt::format("Su must be >= 0, got {}", su));
  }
  if (!(shape_factor > 0.0) || !std::isfinite(shape_factor)) {
    throw ValidationError(fmt::format("shape factor must be > 0, got {}", shape_factor));
  }
  BearingResult r;
  r.method = BearingMethod::kUndrained;
  r.inputs.su = su;
  r.factors = {kUndrainedNc, 1.0, 0.0, shape_factor};
  r.q_f = kUndrainedNc * shape_factor * su;
  return r;
}

BearingFactors general_bearing_factors(double phi_deg) {
  if (!(phi_deg >= 0.0)) throw ValidationError("friction angle must be >= 0");
  if (phi_deg >= 60.0) {
    throw RangeError(fmt::format("friction angle {} outside the supported range [0, 60)", phi_deg));
  }
  BearingFactors f;
  if (phi_deg == 0.0) {
    f.nq = 1.0;
    f.nc = kUndrainedNc;
    f.ngamma = 0.0;
    return f;
  }
  const double phi = radians(phi_deg);
  const double t = std::tan(kPi / 4.0 + phi / 2.0);
  f.nq = std::exp(kPi * std::tan(phi)) * t * t;
  f.nc = (f.nq - 1.0) / std::tan(phi);
  f.ngamma = 2.0 * (f.nq + 1.0) * std::tan(phi);
  return f;
}

BearingResult bearing_capacity_general(double cohesion, double phi_deg, double unit_weight,
                                       double width, double surcharge) {
  require_non_negative(cohesion, "cohesion");
  require_non_negative(unit_weight, "unit weight");
  require_non_negative(width, "width");
  require_non_negative(surcharge, "surcharge");
  BearingResult r;
  r.method = BearingMethod::kGeneral;
  r.factors = general_bearing_factors(phi_deg);
  r.inputs.cohesion = cohesion;
  r.inputs.friction_angle = phi_deg;
  r.inputs.unit_weight = unit_weight;
  r.inputs.width = width;
  r.inputs.surcharge = surcharge;
  r.q_f = cohesion * r.factors.nc + surcharge * r.factors.nq +
          0.5 * unit_weight * width * r.factors.ngamma;
  return r;
}

double shape_factor(FoundationShape shape, const ShapeFactorTable& table) {
  switch (shape) {
    case FoundationShape::kCircular: return table.circular;
    case FoundationShape::kStrip: return table.strip;
    case FoundationShape::kRectangular: return table.rectangular;
  }
  return table.strip;
}

double stress_spread_width(double surface_dimension, double depth) {
  require_non_negative(surface_dimension, "surface dimension");
  require_non_negative(depth, "depth");
  return surface_dimension + depth;
}

double max_load(double q_f, const Foundation& foundation, double transfer_depth) {
  require_non_negative(q_f, "q_f");
  require_non_negative(transfer_depth, "transfer depth");
  switch (foundation.shape()) {
    case FoundationShape::kCircular: {
      const double d = stress_spread_width(foundation.width(), transfer_depth);
      return q_f * kPi / 4.0 * d * d;
    }
    case FoundationShape::kRectangular:
      return q_f * stress_spread_width(foundation.width(), transfer_depth) *
             stress_spread_width(foundation.length(), transfer_depth);
    case FoundationShape::kStrip:
      throw UnsupportedError(fmt::format(
          "strip foundations carry load per unit length ({} kN/m); total load is undefined",
          max_load_per_unit_length(q_f, foundation, transfer_depth)));
  }
  return 0.0;
}

double max_load_per_unit_length(double q_f, const Foundation& foundation, double transfer_depth) {
  require_non_negative(q_f, "q_f");
  return q_f * stress_spread_width(foundation.width(), transfer_depth);
}

double interpolate_su(const SoilProfile& profile, double elevation) {
  const SoilLayer* layer = profile.layer_at(elevation);
  if (layer == nullptr) {
    throw RangeError(fmt::format("elevation {} m lies outside the profile [{}, {}]", elevation,
                                 profile.bottom(), profile.top()));
  }
  if (!layer->su_points.empty()) return su_from_points(layer->su_points, elevation);
  if (layer->undrained_strength) return *layer->undrained_strength;
  throw MissingDataError(fmt::format("layer '{}' has no undrained strength data", layer->material));
}

double layer_average_su(const SoilLayer& layer) {
  if (layer.su_points.empty()) {
    if (layer.undrained_strength) return *layer.undrained_strength;
    throw MissingDataError(fmt::format("layer '{}' has no undrained strength data", layer.material));
  }
  const auto& pts = layer.su_points;
  double area = pts.front().su * (layer.top_elevation - pts.front().elevation);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += 0.5 * (pts[i - 1].su + pts[i].su) * (pts[i - 1].elevation - pts[i].elevation);
  }
  area += pts.back().su * (pts.back().elevation - layer.bottom_elevation);
  return area / layer.thickness();
}

long long truck_count(double volume, double capacity, double loss_fraction) {
  if (!(capacity > 0.0)) throw ValidationError("truck capacity must be > 0");
  require_non_negative(loss_fraction, "loss fraction");
  require_non_negative(volume, "volume");
  const double loads = volume * (1.0 + loss_fraction) / capacity;
  const double nearest = std::round(loads);
  if (std::abs(loads - nearest) <= 1e-12 * std::max(1.0, std::abs(loads))) {
    return static_cast<long long>(nearest);
  }
  return static_cast<long long>(std::ceil(loads));
}

double active_pressure_coefficient(double phi_deg) {
  if (!(phi_deg >= 0.0 && phi_deg < 90.0)) {
    throw RangeError(fmt::format("friction angle {} outside [0, 90)", phi_deg));
  }
  const double s = std::sin(radians(phi_deg));
  return (1.0 - s) / (1.0 + s);
}

SlidingResult wall_sliding_fos(double resisting_force, double active_thrust, double required_fos) {
  if (!(active_thrust > 0.0)) {
    throw ValidationError("active thrust must be > 0 to form a sliding factor of safety");
  }
  require_non_negative(resisting_force, "resisting force");
  SlidingResult r;
  r.active_thrust = active_thrust;
  r.resisting_force = resisting_force;
  r.fos = resisting_force / active_thrust;
  r.ok = r.fos >= required_fos;
  return r;
}

SlidingResult wall_sliding_fos(const SlidingInputs& in) {
  double mu = 0.0;
  if (in.base_friction_coefficient) {
    mu = *in.base_friction_coefficient;
  } else if (in.base_friction_angle) {
    mu = std::tan(radians(*in.base_friction_angle));
  } else {
    throw ValidationError("sliding check needs a base friction coefficient or angle");
  }
  require_non_negative(mu, "base friction coefficient");
  require_non_negative(in.vertical_load, "vertical load");
  const double ka = active_pressure_coefficient(in.backfill_friction_angle);
  const double pa = 0.5 * ka * in.backfill_unit_weight * in.wall_height * in.wall_height;
  auto r = wall_sliding_fos(mu * in.vertical_load, pa, in.required_fos);
  r.ka = ka;
  return r;
}

EccentricityResult wall_eccentricity(double net_moment, double vertical_load, double base_width) {
  if (!(vertical_load > 0.0)) throw ValidationError("vertical load must be > 0");
  if (!(base_width > 0.0)) throw ValidationError("base width must be > 0");
  EccentricityResult r;
  r.e = net_moment / vertical_load;
  r.middle_third_ok = std::abs(r.e) <= base_width / 6.0;
  return r;
}

WallBearingResult wall_bearing_check(double vertical_load, double base_width, double e,
                                     double q_ult, double required_fos) {
  WallBearingResult r;
  r.effective_width = base_width - 2.0 * std::abs(e);
  if (!(r.effective_width > 0.0)) {
    throw GeometryError(fmt::format(
        "effective base width B - 2|e| = {} m is not positive; resultant lies outside the base",
        r.effective_width));
  }
  require_non_negative(vertical_load, "vertical load");
  require_non_negative(q_ult, "ultimate bearing capacity");
  r.q = vertical_load / r.effective_width;
  r.allowable = q_ult / required_fos;
  r.ok = r.q <= r.allowable;
  return r;
}

WallCheckReport check_wall(const WallCheckInputs& in) {
  WallCheckReport report;
  report.required_fos = in.sliding.required_fos;
  report.sliding = wall_sliding_fos(in.sliding);
  report.eccentricity = wall_eccentricity(in.net_moment, in.sliding.vertical_load, in.base_width);
  try {
    report.bearing = wall_bearing_check(in.sliding.vertical_load, in.base_width,
                                        report.eccentricity.e, in.q_ult, in.sliding.required_fos);
  } catch (const GeometryError& e) {
    report.bearing_error = e.what();
  }
  return report;
}

AuditResult audit_linear_claim(const std::vector<std::pair<double, double>>& terms, double claimed,
                               double tolerance) {
  AuditResult r;
  for (const auto& [coefficient, factor] : terms) r.recomputed += coefficient * factor;
  r.claimed = claimed;
  r.difference = r.recomputed - claimed;
  r.matches = std::abs(r.difference) <= tolerance;
  return r;
}

}  // namespace geollm
