#pragma once

#include "tbsa/geometry.hpp"
#include "tbsa/model.hpp"
#include "tbsa/state.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace tbsa {

enum class DriveMode { Unicycle, Shaking };

std::string_view to_string(DriveMode m);
std::optional<DriveMode> parse_drive_mode(std::string_view s);

struct DriveSpec {
  DriveMode mode = DriveMode::Unicycle;
  double f_mag = 0.05;     // N
  double t_mag = 5e-4;     // N m
  double frequency = 0.1;  // Hz

  void validate() const;
};

// u(t) = sin(2 pi f t)
template <typename Scalar>
Scalar excitation(Scalar t, Scalar frequency) {
  using std::sin;
  return sin(Scalar(2) * std::numbers::pi_v<Scalar> * frequency * t);
}

// Heading used by the drive force: [sin(phi), cos(phi)].
template <typename Scalar>
Vec2T<Scalar> drive_heading(Scalar phi) {
  using std::cos;
  using std::sin;
  return Vec2T<Scalar>(sin(phi), cos(phi));
}

// Body force u*a*F_mag*[sin(phi), cos(phi)] and torque u*omega*T_mag.
Wrench unicycle_drive(const TileState& tile, const TileKind& kind, double u, const DriveSpec& spec);

// Uniform rotating force F_mag*[sin(2 pi f t), cos(2 pi f t)], no torque.
Vec2 shaking_drive(double t, double f_mag, double frequency);

struct World;

// Drive wrench for every tile at the world's current clock (zero for static
// tiles). Overwrites `out`.
void accumulate_drive_forces(const World& world, std::vector<Wrench>& out);

}  // namespace tbsa
