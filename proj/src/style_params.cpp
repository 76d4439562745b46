#include "npr/style_params.hpp"

#include <cmath>
#include <sstream>

namespace npr {

namespace {

#define NPR_FIELD(name, lo, hi, lo_in, hi_in, integer, prov, desc)                              \
  ParamField {                                                                                    \
    #name, lo, hi, lo_in, hi_in, integer, Provenance::prov, desc,                                 \
        [](const StyleParams& p) { return static_cast<double>(p.name); },                         \
        [](StyleParams& p, double v) { p.name = static_cast<decltype(p.name)>(v); }                \
  }

const std::array<ParamField, 21> kFields{
    NPR_FIELD(ambient, 0.0, 1.0, true, true, false, measured, "ambient (shadow) brightness"),
    NPR_FIELD(kd, 0.0, 1.0, true, true, false, derived, "diffuse intensity weight"),
    NPR_FIELD(ks, 0.0, 1.0, true, true, false, placeholder, "specular weight"),
    NPR_FIELD(shininess, 1.0, 512.0, true, true, false, placeholder, "specular exponent"),
    NPR_FIELD(background_brightness, 0.0, 1.0, true, true, false, placeholder, "paper ground brightness"),
    NPR_FIELD(light_azimuth_deg, -360.0, 360.0, true, true, false, measured, "light azimuth, degrees"),
    NPR_FIELD(light_elevation_deg, 0.0, 90.0, false, true, false, measured, "light elevation, degrees"),
    NPR_FIELD(w_geom, 0.0, 1.0, true, true, false, measured, "geometry-line weight"),
    NPR_FIELD(w_nd, 0.0, 1.0, true, true, false, measured, "normal-depth-line weight"),
    NPR_FIELD(blur_radius_px, 0.0, 16.0, true, true, true, placeholder, "geometry-line blur radius, px"),
    NPR_FIELD(geometry_line_darkness, 0.0, 1.0, true, true, false, placeholder, "geometry stroke darkness"),
    NPR_FIELD(nd_k_depth, 0.0, 100.0, true, true, false, placeholder, "normal-depth operator depth gain"),
    NPR_FIELD(nd_k_normal, 0.0, 100.0, true, true, false, placeholder, "normal-depth operator normal gain"),
    NPR_FIELD(line_threshold, 0.0, 1.0, true, false, false, placeholder, "darkness below which no line is drawn"),
    NPR_FIELD(line_b_min, 0.0, 1.0, false, true, false, measured, "darkest line brightness"),
    NPR_FIELD(line_b_max, 0.0, 1.0, false, true, false, measured, "lightest line brightness"),
    NPR_FIELD(crease_threshold_deg, 0.0, 180.0, false, false, false, placeholder, "crease angle, degrees"),
    NPR_FIELD(shadow_bias, 0.0, 0.1, true, true, false, placeholder, "shadow depth bias, normalized"),
    NPR_FIELD(pcf_radius_px, 0.0, 16.0, true, true, true, placeholder, "PCF kernel radius, px"),
    NPR_FIELD(depth_offset, 0.0, 0.1, true, true, false, placeholder, "edge-vs-surface depth offset"),
    NPR_FIELD(samples_per_edge_min, 1.0, 1024.0, true, true, true, placeholder, "minimum HLR samples per edge"),
};

#undef NPR_FIELD

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string range_text(const ParamField& f) {
  std::ostringstream os;
  os << (f.min_inclusive ? '[' : '(') << f.min << ", " << f.max << (f.max_inclusive ? ']' : ')');
  if (f.integer) os << " integer";
  return os.str();
}

bool in_range(const ParamField& f, double v) {
  if (!std::isfinite(v)) return false;
  if (f.min_inclusive ? v < f.min : v <= f.min) return false;
  if (f.max_inclusive ? v > f.max : v >= f.max) return false;
  return !f.integer || v == std::floor(v);
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::measured:
      return "measured";
    case Provenance::derived:
      return "derived";
    case Provenance::placeholder:
      return "placeholder";
  }
  return "placeholder";
}

std::span<const ParamField> param_fields() { return kFields; }

std::vector<Violation> validate_params(const StyleParams& p) {
  std::vector<Violation> out;
  for (const auto& f : kFields) {
    const double v = f.get(p);
    if (!in_range(f, v)) out.push_back({f.name, fmt(v), range_text(f), std::string(f.name) + " out of range"});
  }
  for (int c = 0; c < 3; ++c) {
    const double v = p.paper_tint[c];
    if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
      out.push_back({std::string(kTintField) + "[" + std::to_string(c) + "]", fmt(v), "[0, 1]",
                     "paper_tint channel out of range"});
    }
  }
  if (p.w_geom + p.w_nd > 1.0 + 1e-9) {
    out.push_back({"w_geom+w_nd", fmt(p.w_geom + p.w_nd), "<= 1", "weights exceed 1"});
  }
  if (!(p.line_b_min < p.line_b_max)) {
    out.push_back({"line_b_min", fmt(p.line_b_min), "< line_b_max (" + fmt(p.line_b_max) + ")",
                   "line_b_min must be below line_b_max"});
  }
  if (p.ambient + p.kd > 1.0 + 1e-9) {
    out.push_back({"ambient+kd", fmt(p.ambient + p.kd), "<= 1", "ambient + kd exceeds 1"});
  }
  return out;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::invalid_argument(format_violations(violations)), violations_(std::move(violations)) {}

ParamsParse params_from_json(const nlohmann::json& doc) {
  ParamsParse result;
  if (!doc.is_object()) {
    result.violations.push_back({"<document>", doc.type_name(), "object", "params document must be a JSON object"});
    return result;
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == kTintField) {
      if (!value.is_array() || value.size() != 3 || !value[0].is_number() || !value[1].is_number() ||
          !value[2].is_number()) {
        result.violations.push_back({key, value.dump(), "array of 3 numbers", "paper_tint must be [r, g, b]"});
        continue;
      }
      for (int c = 0; c < 3; ++c) result.params.paper_tint[c] = value[c].get<double>();
      continue;
    }
    const ParamField* field = nullptr;
    for (const auto& f : kFields) {
      if (key == f.name) field = &f;
    }
    if (field == nullptr) {
      result.violations.push_back({key, value.dump(), "known field", "unknown key"});
      continue;
    }
    if (!value.is_number()) {
      result.violations.push_back({key, value.dump(), range_text(*field), std::string(key) + " must be a number"});
      continue;
    }
    const double v = value.get<double>();
    if (field->integer && v != std::floor(v)) {
      result.violations.push_back({key, fmt(v), range_text(*field), std::string(key) + " must be an integer"});
      continue;
    }
    field->set(result.params, v);
  }
  auto range = validate_params(result.params);
  result.violations.insert(result.violations.end(), range.begin(), range.end());
  return result;
}

nlohmann::json params_to_json(const StyleParams& p) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& f : kFields) {
    if (f.integer) doc[f.name] = static_cast<long long>(f.get(p));
    else doc[f.name] = f.get(p);
  }
  doc[kTintField] = {p.paper_tint[0], p.paper_tint[1], p.paper_tint[2]};
  return doc;
}

nlohmann::json params_schema() {
  const StyleParams defaults;
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : kFields) {
    nlohmann::json entry{{"name", f.name},
                         {"type", f.integer ? "integer" : "number"},
                         {"min", f.min},
                         {"max", f.max},
                         {"min_inclusive", f.min_inclusive},
                         {"max_inclusive", f.max_inclusive},
                         {"provenance", to_string(f.provenance)},
                         {"description", f.description}};
    if (f.integer) entry["default"] = static_cast<long long>(f.get(defaults));
    else entry["default"] = f.get(defaults);
    fields.push_back(entry);
  }
  fields.push_back({{"name", kTintField},
                    {"type", "rgb"},
                    {"min", 0.0},
                    {"max", 1.0},
                    {"min_inclusive", true},
                    {"max_inclusive", true},
                    {"provenance", to_string(Provenance::placeholder)},
                    {"description", "channel-wise multiply applied to the grayscale result"},
                    {"default", {1.0, 1.0, 1.0}}});
  return {{"fields", fields},
          {"constraints",
           {"w_geom + w_nd <= 1", "line_b_min < line_b_max", "ambient + kd <= 1"}}};
}

nlohmann::json violations_to_json(std::span<const Violation> violations) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : violations) {
    out.push_back({{"field", v.field}, {"value", v.value}, {"allowed", v.allowed}, {"message", v.message}});
  }
  return out;
}

std::string format_violations(std::span<const Violation> violations) {
  std::ostringstream os;
  for (const auto& v : violations) os << v.field << " = " << v.value << ": " << v.message << " (allowed " << v.allowed << ")\n";
  return os.str();
}

}  // namespace npr
