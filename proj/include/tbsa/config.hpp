#pragma once

#include "tbsa/analysis.hpp"
#include "tbsa/drive.hpp"
#include "tbsa/glue.hpp"
#include "tbsa/model.hpp"
#include "tbsa/physics.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace tbsa {

struct ExperimentConfig {
  ReactorSpec reactor;
  SeedSpec seed;
  int free_tiles = 550;
  DriveSpec drive;
  PhysicsParams physics;
  MagnetParams magnets;
  AnalysisOptions analysis;
  double duration = 3600.0;      // s
  double snapshot_period = 10.0;  // s
  std::uint64_t rng_seed = 1;
  std::string output_dir = "out";

  // Throws ConfigError.
  void validate() const;

  std::int64_t total_steps() const;
  std::int64_t steps_per_snapshot() const;
};

// Config files are JSON objects mirroring ExperimentConfig; every key is
// optional and falls back to the default above. Unknown keys are rejected.
//
//   {
//     "reactor":  {"radius": 0.6, "wall_restitution": 0.2, "wall_friction": 0.25},
//     "seed":     {"bounding_size": 10, "arm_width": 2, "center": [0, 0]},
//     "free_tiles": 550,
//     "drive":    {"mode": "unicycle", "f_mag": 0.05, "t_mag": 0.0005, "frequency": 0.1},
//     "physics":  {"restitution": 0.2, "friction_tile_tile": 0.25, ..., "dt": 0.0020833, "solver_iterations": 8},
//     "magnets":  {"alpha": 0.18, "beta": -0.64, "inset": 0.00015, "cutoff": 0.03},
//     "analysis": {"gap_tol": 0.006, "angle_tol_deg": 15},
//     "duration": 3600, "snapshot_period": 10, "rng_seed": 1, "output_dir": "out"
//   }
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);

// Applies "dotted.key=value" (value parsed as JSON, or taken as a string).
void apply_override(ExperimentConfig& c, const std::string& assignment);

// FNV-1a 64 over the canonical JSON of everything except output_dir, as hex.
std::string config_digest(const ExperimentConfig& c);

}  // namespace tbsa
