#pragma once

#include "tbsa/drive.hpp"
#include "tbsa/glue.hpp"
#include "tbsa/model.hpp"
#include "tbsa/physics.hpp"
#include "tbsa/state.hpp"

#include <cstdint>
#include <vector>

namespace tbsa {

struct World {
  ReactorSpec reactor;
  Tileset tileset;
  std::vector<TileState> tiles;
  PhysicsParams params;
  MagnetParams magnets;
  DriveSpec drive;
  std::int64_t step_count = 0;

  // Derived from the step count so it never drifts.
  double clock() const { return static_cast<double>(step_count) * params.dt; }

  const TileKind& kind_of(const TileState& t) const { return tileset.kind(t.kind_id); }
};

}  // namespace tbsa
