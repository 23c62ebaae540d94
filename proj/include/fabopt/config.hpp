#pragma once

#include <optional>
#include <string>

#include "fabopt/optimize.hpp"
#include "fabopt/problems.hpp"
#include "json.hpp"

namespace fabopt {

inline constexpr int kConfigSchemaVersion = 1;

/// Optimization run description as stored in a JSON config file.
///
/// Required: "schema_version" (1), "problem" (benchmark name or a geometry
/// object), "brush". Optional: "pitch_nm" (20), "beta" (4),
/// "normalize_brush", "symmetry" (defaults to the problem's), "adam"
/// {"learning_rate", "beta1", "beta2", "epsilon"}, "budget" (300), "seed" (0),
/// "init_noise", "fixed_border", "tie_break" ("lowest_index" | "seeded"),
/// "stop_when_met", "output_dir". Unknown keys are rejected.
struct RunConfig {
  ProblemGeometry geometry;
  double pitch_nm = 20.0;
  OptimizeConfig optimize;
  std::string output_dir = "run";

  ProblemDefinition problem() const { return ProblemDefinition(geometry, pitch_nm); }
};

/// Throws std::invalid_argument with a message naming the offending field.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

}  // namespace fabopt
