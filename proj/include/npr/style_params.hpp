#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace npr {

// Every tunable constant of the renderer. Defaults marked "measured" come from the
// reference drawing; the rest are placeholders sized to sit inside those measurements.
struct StyleParams {
  double ambient = 0.55;  // measured: darkest regions
  double kd = 0.25;       // ambient + kd = 0.8, the lit-band ceiling
  double ks = 0.10;
  double shininess = 24.0;
  double background_brightness = 0.62;
  double light_azimuth_deg = 45.0;    // measured
  double light_elevation_deg = 45.0;  // measured
  double w_geom = 0.3;                // measured
  double w_nd = 0.7;                  // measured
  int blur_radius_px = 1;
  double geometry_line_darkness = 0.6;
  double nd_k_depth = 6.0;
  double nd_k_normal = 0.5;
  double line_threshold = 0.05;
  double line_b_min = 0.4;  // measured
  double line_b_max = 0.8;  // measured
  double crease_threshold_deg = 40.0;
  double shadow_bias = 2e-3;
  int pcf_radius_px = 2;
  double depth_offset = 1e-3;
  int samples_per_edge_min = 8;
  std::array<double, 3> paper_tint{1.0, 1.0, 1.0};

  bool operator==(const StyleParams&) const = default;
};

enum class Provenance { measured, derived, placeholder };

const char* to_string(Provenance p);

// Reflection record for one scalar field.
struct ParamField {
  const char* name;
  double min;
  double max;
  bool min_inclusive;
  bool max_inclusive;
  bool integer;
  Provenance provenance;
  const char* description;
  double (*get)(const StyleParams&);
  void (*set)(StyleParams&, double);
};

// Scalar fields in declaration order; paper_tint is reported separately.
std::span<const ParamField> param_fields();
inline constexpr const char* kTintField = "paper_tint";

struct Violation {
  std::string field;
  std::string value;
  std::string allowed;
  std::string message;
};

// Returns every violation at once; empty means valid.
std::vector<Violation> validate_params(const StyleParams& params);

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Missing keys keep their defaults; unknown keys and type errors are violations.
struct ParamsParse {
  StyleParams params;
  std::vector<Violation> violations;
};

ParamsParse params_from_json(const nlohmann::json& doc);
nlohmann::json params_to_json(const StyleParams& params);
nlohmann::json params_schema();
nlohmann::json violations_to_json(std::span<const Violation> violations);
std::string format_violations(std::span<const Violation> violations);

}  // namespace npr
