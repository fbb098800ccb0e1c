#include "tbsa/drive.hpp"

#include "tbsa/error.hpp"
#include "tbsa/world.hpp"

namespace tbsa {

std::string_view to_string(DriveMode m) { return m == DriveMode::Unicycle ? "unicycle" : "shaking"; }

std::optional<DriveMode> parse_drive_mode(std::string_view s) {
  if (s == "unicycle") return DriveMode::Unicycle;
  if (s == "shaking") return DriveMode::Shaking;
  return std::nullopt;
}

void DriveSpec::validate() const {
  if (!(f_mag >= 0.0) || !(t_mag >= 0.0)) throw InvalidArgument("drive: magnitudes must be >= 0");
  if (!(frequency > 0.0)) throw InvalidArgument("drive: frequency must be positive");
}

Wrench unicycle_drive(const TileState& tile, const TileKind& kind, double u, const DriveSpec& spec) {
  if (tile.is_static) return {};
  Wrench w;
  w.force = (u * kind.drive.a * spec.f_mag) * drive_heading(tile.orientation);
  w.torque = u * kind.drive.omega * spec.t_mag;
  return w;
}

Vec2 shaking_drive(double t, double f_mag, double frequency) {
  const double phase = 2.0 * std::numbers::pi * frequency * t;
  return f_mag * Vec2(std::sin(phase), std::cos(phase));
}

void accumulate_drive_forces(const World& world, std::vector<Wrench>& out) {
  out.assign(world.tiles.size(), Wrench{});
  const double t = world.clock();
  const DriveSpec& spec = world.drive;
  if (spec.mode == DriveMode::Shaking) {
    const Vec2 f = shaking_drive(t, spec.f_mag, spec.frequency);
    for (std::size_t i = 0; i < world.tiles.size(); ++i)
      if (!world.tiles[i].is_static) out[i].force = f;
    return;
  }
  const double u = excitation(t, spec.frequency);
  for (std::size_t i = 0; i < world.tiles.size(); ++i) {
    const TileState& tile = world.tiles[i];
    out[i] = unicycle_drive(tile, world.kind_of(tile), u, spec);
  }
}

}  // namespace tbsa
