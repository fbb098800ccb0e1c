#pragma once

#include "tbsa/error.hpp"
#include "tbsa/geometry.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace tbsa {

// Sum of the drive forces acting on the tiles of an assembly.
template <typename Scalar>
Vec2T<Scalar> net_tile_force(std::span<const Vec2T<Scalar>> forces) {
  Vec2T<Scalar> sum = Vec2T<Scalar>::Zero();
  for (const auto& f : forces) sum += f;
  return sum;
}

// Combined holding force of the 2*n_s seed glues, along [1,1] in the
// seed-aligned frame. Magnitude 2*n_s*F_g.
template <typename Scalar>
Vec2T<Scalar> net_glue_force(int n_s, Scalar glue_force) {
  if (n_s < 1 || !(glue_force > Scalar(0)))
    throw InvalidArgument("net_glue_force: need n_s >= 1 and F_g > 0");
  const Scalar c = Scalar(2 * n_s) * glue_force * std::numbers::sqrt2_v<Scalar> / Scalar(2);
  return Vec2T<Scalar>(c, c);
}

enum class DetachmentMode {
  Quadrant,  // resultant tested against the seed quadrant
  Harmonic,  // ||F_ng|| < ||F_nt||, valid for cyclic shaking
};

enum class QuadrantConvention {
  TowardSeed,  // attached iff the resultant lies in the closed quadrant of F_ng
  AsWritten,   // attached iff the resultant lies in the closed third quadrant
};

template <typename Scalar>
bool is_detached(const Vec2T<Scalar>& net_tile, const Vec2T<Scalar>& net_glue,
                 DetachmentMode mode = DetachmentMode::Harmonic,
                 QuadrantConvention convention = QuadrantConvention::TowardSeed) {
  if (mode == DetachmentMode::Harmonic) return net_glue.norm() < net_tile.norm();
  const Vec2T<Scalar> r = net_tile + net_glue;
  if (convention == QuadrantConvention::AsWritten)
    return !(r.x() <= Scalar(0) && r.y() <= Scalar(0));
  // Quadrant spanned by the seed direction (sign pattern of F_ng).
  const Scalar sx = net_glue.x() >= Scalar(0) ? Scalar(1) : Scalar(-1);
  const Scalar sy = net_glue.y() >= Scalar(0) ? Scalar(1) : Scalar(-1);
  return !(sx * r.x() >= Scalar(0) && sy * r.y() >= Scalar(0));
}

// Seed side above which shaking detaches the assembly:
// sqrt(2 F_g / (m_t * |a|)).
template <typename Scalar>
Scalar critical_seed_size(Scalar glue_force, Scalar tile_mass, Scalar accel) {
  if (!(glue_force > Scalar(0)) || !(tile_mass > Scalar(0)) || !(accel > Scalar(0)))
    throw InvalidArgument("critical_seed_size: inputs must be positive");
  using std::sqrt;
  return sqrt(Scalar(2) * glue_force / (tile_mass * accel));
}

// The n_s at which the harmonic comparison 2 n_s F_g < n_s^2 m_t |a| flips:
// 2 F_g / (m_t * |a|). Differs from critical_seed_size by the square root.
template <typename Scalar>
Scalar harmonic_crossover_size(Scalar glue_force, Scalar tile_mass, Scalar accel) {
  if (!(glue_force > Scalar(0)) || !(tile_mass > Scalar(0)) || !(accel > Scalar(0)))
    throw InvalidArgument("harmonic_crossover_size: inputs must be positive");
  return Scalar(2) * glue_force / (tile_mass * accel);
}

// Shaking acceleration that places critical_seed_size at `n`.
template <typename Scalar>
Scalar accel_for_critical_size(Scalar glue_force, Scalar tile_mass, Scalar n) {
  return Scalar(2) * glue_force / (tile_mass * n * n);
}

// Empirical counterpart of net_tile_force: sums the given wrenches' forces over
// the tiles of a component (e.g. the seed component of a snapshot).
Vec2 measured_net_force(std::span<const Wrench> wrenches, std::span<const int> component);

}  // namespace tbsa
