#include "geollm/soil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm {

namespace {

void require_percent(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0 || value > 100.0) {
    throw ValidationError(fmt::format("{} must lie in [0, 100], got {}", name, value));
  }
}

void require_finite(const std::optional<double>& value, const char* name) {
  if (value && !std::isfinite(*value)) {
    throw ValidationError(fmt::format("{} must be finite", name));
  }
}

}  // namespace

void SoilSample::validate() const {
  require_percent(pass_sieve4, "pass_sieve4");
  require_percent(pass_sieve200, "pass_sieve200");
  if (pass_sieve200 > pass_sieve4) {
    throw ValidationError(fmt::format("pass_sieve200 ({}) exceeds pass_sieve4 ({})",
                                      pass_sieve200, pass_sieve4));
  }
  require_finite(d10, "d10");
  require_finite(d30, "d30");
  require_finite(d60, "d60");
  for (const auto& [v, name] : {std::pair{d10, "d10"}, {d30, "d30"}, {d60, "d60"}}) {
    if (v && *v < 0.0) throw ValidationError(fmt::format("{} must be non-negative", name));
  }
  if (d10 && d30 && d60) {
    if (!(*d10 > 0.0 && *d10 <= *d30 && *d30 <= *d60)) {
      throw ValidationError(
          fmt::format("grain sizes must satisfy 0 < d10 <= d30 <= d60 (got {}, {}, {})", *d10,
                      *d30, *d60));
    }
  }
  require_finite(liquid_limit, "liquid_limit");
  require_finite(plastic_limit, "plastic_limit");
  if (liquid_limit && *liquid_limit < 0.0) throw ValidationError("liquid_limit must be >= 0");
  if (plastic_limit && *plastic_limit < 0.0) throw ValidationError("plastic_limit must be >= 0");
  if (liquid_limit && plastic_limit && *plastic_limit > *liquid_limit) {
    throw ValidationError(fmt::format("plastic_limit ({}) exceeds liquid_limit ({})",
                                      *plastic_limit, *liquid_limit));
  }
}

IndexProperties derive_index_properties(const SoilSample& sample) {
  IndexProperties props;
  if (sample.liquid_limit && sample.plastic_limit) {
    const double pi = *sample.liquid_limit - *sample.plastic_limit;
    if (pi < 0.0) {
      throw ValidationError(fmt::format("negative plasticity index: PL {} > LL {}",
                                        *sample.plastic_limit, *sample.liquid_limit));
    }
    props.plasticity_index = pi;
  }
  if (sample.d10 && *sample.d10 == 0.0) throw ValidationError("d10 must be non-zero");
  if (sample.d10 && sample.d60) props.cu = *sample.d60 / *sample.d10;
  if (sample.d10 && sample.d30 && sample.d60) {
    if (*sample.d60 == 0.0) throw ValidationError("d60 must be non-zero");
    props.cc = (*sample.d30 * *sample.d30) / (*sample.d10 * *sample.d60);
  }
  return props;
}

SoilProfile::SoilProfile(std::vector<SoilLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("soil profile needs at least one layer");
  std::stable_sort(layers_.begin(), layers_.end(), [](const SoilLayer& a, const SoilLayer& b) {
    return a.top_elevation > b.top_elevation;
  });
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& layer = layers_[i];
    if (!(layer.bottom_elevation < layer.top_elevation)) {
      throw ValidationError(fmt::format("layer '{}' has bottom {} not below top {}",
                                        layer.material, layer.bottom_elevation,
                                        layer.top_elevation));
    }
    if (layer.undrained_strength && *layer.undrained_strength < 0.0) {
      throw ValidationError(fmt::format("layer '{}' has negative Su", layer.material));
    }
    std::sort(layer.su_points.begin(), layer.su_points.end(),
              [](const SuPoint& a, const SuPoint& b) { return a.elevation > b.elevation; });
    for (const auto& p : layer.su_points) {
      if (p.elevation > layer.top_elevation || p.elevation < layer.bottom_elevation) {
        throw ValidationError(fmt::format("Su point at {} lies outside layer '{}'", p.elevation,
                                          layer.material));
      }
      if (p.su < 0.0) throw ValidationError("Su point must be non-negative");
    }
    if (i > 0) {
      const auto& above = layers_[i - 1];
      if (layer.top_elevation > above.bottom_elevation) {
        throw ValidationError(fmt::format("layers '{}' and '{}' overlap", above.material,
                                          layer.material));
      }
      if (layer.top_elevation < above.bottom_elevation) {
        throw ValidationError(fmt::format("gap between layers '{}' and '{}'", above.material,
                                          layer.material));
      }
    }
  }
}

const SoilLayer* SoilProfile::layer_at(double elevation) const {
  for (const auto& layer : layers_) {
    if (elevation <= layer.top_elevation && elevation > layer.bottom_elevation) return &layer;
  }
  if (elevation == bottom()) return &layers_.back();
  return nullptr;
}

const SoilLayer* SoilProfile::find_layer(const std::string& material) const {
  const auto wanted = to_lower(trim(material));
  for (const auto& layer : layers_) {
    if (to_lower(layer.material) == wanted) return &layer;
  }
  return nullptr;
}

const char* to_string(FoundationShape shape) {
  switch (shape) {
    case FoundationShape::kCircular: return "circular";
    case FoundationShape::kStrip: return "strip";
    case FoundationShape::kRectangular: return "rectangular";
  }
  return "unknown";
}

std::optional<FoundationShape> parse_shape(const std::string& name) {
  const auto n = to_lower(trim(name));
  if (n == "circular" || n == "circle") return FoundationShape::kCircular;
  if (n == "strip") return FoundationShape::kStrip;
  if (n == "rectangular" || n == "rectangle" || n == "square") return FoundationShape::kRectangular;
  return std::nullopt;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("foundation {} must be > 0, got {}", name, v));
  }
}

void require_depth(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("founding depth must be >= 0, got {}", v));
  }
}

}  // namespace

Foundation Foundation::circular(double diameter, double founding_depth) {
  require_positive(diameter, "diameter");
  require_depth(founding_depth);
  return Foundation(FoundationShape::kCircular, diameter, diameter, founding_depth);
}

Foundation Foundation::strip(double width, double founding_depth) {
  require_positive(width, "width");
  require_depth(founding_depth);
  return Foundation(FoundationShape::kStrip, width, 0.0, founding_depth);
}

Foundation Foundation::rectangular(double width, double length, double founding_depth) {
  require_positive(width, "width");
  require_positive(length, "length");
  require_depth(founding_depth);
  if (width > length) {
    throw ValidationError(fmt::format("rectangular foundation needs B <= L (B={}, L={})", width,
                                      length));
  }
  return Foundation(FoundationShape::kRectangular, width, length, founding_depth);
}

double Foundation::plan_area() const {
  switch (shape_) {
    case FoundationShape::kCircular: return std::numbers::pi / 4.0 * width_ * width_;
    case FoundationShape::kRectangular: return width_ * length_;
    case FoundationShape::kStrip: return width_;  // per metre run
  }
  return 0.0;
}

}  // namespace geollm
