#pragma once

#include "tbsa/geometry.hpp"

namespace tbsa {

struct TileState {
  int kind_id = 0;
  Vec2 position = Vec2::Zero();
  double orientation = 0.0;  // rad, counter-clockwise
  Vec2 linear_velocity = Vec2::Zero();
  double angular_velocity = 0.0;
  bool is_static = false;
};

}  // namespace tbsa
