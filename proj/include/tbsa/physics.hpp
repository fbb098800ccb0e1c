#pragma once

#include "tbsa/geometry.hpp"
#include "tbsa/model.hpp"
#include "tbsa/state.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tbsa {

inline constexpr double kGravity = 9.81;

// Mean distance of a uniform square's points from its center, per unit side.
// Lever arm of the floor's frictional torque.
inline constexpr double kSquareMeanRadius = 0.38259785823210635;

struct PhysicsParams {
  double restitution = 0.2;
  double friction_tile_tile = 0.25;
  double friction_tile_floor = 0.25;
  double angular_friction_floor = 0.25;
  double tile_mass = 0.016;   // kg
  double tile_width = 0.03;   // m
  double linear_damping = 0.8;   // 1/s
  double angular_damping = 0.5;  // 1/s
  // Resolves the lateral stiffness of a closed magnet pair (~300-800 rad/s).
  double dt = 1.0 / 480.0;
  int solver_iterations = 8;

  double max_speed = 100.0;              // m/s, divergence cap
  double contact_margin = 0.0005;        // m, speculative distance for tile pairs
  double linear_slop = 0.0001;           // m, penetration left uncorrected
  double baumgarte = 0.2;                // fraction of penetration removed per step
  double restitution_threshold = 0.01;   // m/s, slower impacts are inelastic

  double inertia() const { return tile_mass * tile_width * tile_width / 6.0; }
  double half_width() const { return 0.5 * tile_width; }
  double half_diagonal() const { return 0.5 * tile_width * std::numbers::sqrt2; }

  // Throws InvalidArgument on negative or inconsistent values.
  void validate() const;
};

struct ContactPoint {
  Vec2 position = Vec2::Zero();  // world, midway between the surfaces
  double separation = 0.0;       // negative when penetrating
};

// Contact between tile `a` and tile `b`, or between `a` and the reactor wall
// when b == kWall. The normal points from a towards b (outward for walls).
struct Contact {
  static constexpr int kWall = -1;

  int a = 0;
  int b = kWall;
  Vec2 normal = Vec2::Zero();
  int point_count = 0;
  std::array<ContactPoint, 2> points{};

  bool is_wall() const { return b == kWall; }
  double penetration() const;
};

// Oriented square used by the narrow phase.
struct Box {
  Vec2 center = Vec2::Zero();
  double angle = 0.0;
  double half = 0.015;
};

// Separating-axis test with reference-face clipping. Returns the manifold when
// the boxes are closer than `margin`; point_count == 0 otherwise.
Contact collide_boxes(const Box& a, const Box& b, double margin);

// Corner-based test against a circular wall of `radius` centered at the
// origin. Corners beyond radius - margin produce points (deepest two kept).
Contact collide_wall(const Box& box, double radius, double margin);

// Visits candidate pairs (i < j) whose grid cells are adjacent. Positions are
// binned on a dense uniform grid with cell size `cell_size`, so every pair
// closer than the cell size is visited. Visiting order is deterministic for a
// given input.
class SpatialHash {
 public:
  void build(std::span<const Vec2> positions, double cell_size);

  template <typename Fn>
  void for_each_pair(Fn&& fn) const;

 private:
  double cell_size_ = 1.0;
  std::int64_t min_x_ = 0;
  std::int64_t min_y_ = 0;
  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::vector<std::int64_t> cell_of_;  // per point, flat cell index
  std::vector<int> start_;             // per cell, offset into sorted_
  std::vector<int> sorted_;            // point indices grouped by cell
};

struct World;

// All tile-tile and tile-wall contacts; broad phase by spatial hash with cell
// size equal to the tile diagonal (plus margin).
std::vector<Contact> detect_contacts(const World& world);

// Advances the world by one fixed step. `external` holds one wrench per tile
// (may be empty for zero forces). Throws NumericalDivergence when a speed
// exceeds params.max_speed.
void step(World& world, std::span<const Wrench> external);

double kinetic_energy(const World& world);
Vec2 linear_momentum(const World& world);

// ---------------------------------------------------------------------------

template <typename Fn>
void SpatialHash::for_each_pair(Fn&& fn) const {
  for (std::size_t k = 0; k < cell_of_.size(); ++k) {
    const int i = static_cast<int>(k);
    const std::int64_t cx = cell_of_[k] % width_;
    const std::int64_t cy = cell_of_[k] / width_;
    for (std::int64_t y = std::max<std::int64_t>(cy - 1, 0); y <= std::min(cy + 1, height_ - 1); ++y) {
      for (std::int64_t x = std::max<std::int64_t>(cx - 1, 0); x <= std::min(cx + 1, width_ - 1); ++x) {
        const std::int64_t c = y * width_ + x;
        for (int e = start_[static_cast<std::size_t>(c)]; e < start_[static_cast<std::size_t>(c) + 1]; ++e) {
          const int j = sorted_[static_cast<std::size_t>(e)];
          if (j > i) fn(i, j);
        }
      }
    }
  }
}

}  // namespace tbsa
