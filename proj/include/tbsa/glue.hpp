#pragma once

#include "tbsa/geometry.hpp"
#include "tbsa/model.hpp"
#include "tbsa/state.hpp"

#include <array>
#include <span>
#include <vector>

namespace tbsa {

// Parameters of the approximate magnet model F = p * alpha / (d - beta)^2.
// alpha and beta live in the fitted unit system (d in cm, F in N); inset and
// cutoff are in meters like the rest of the engine.
struct MagnetParams {
  double alpha = 0.18;
  double beta = -0.64;
  double inset = 0.00015;
  double cutoff = 0.03;

  void validate() const;
};

inline constexpr double kCentimetersPerMeter = 100.0;
inline constexpr double kMinMagnetDistanceCm = 1e-6;

template <typename Scalar>
Scalar magnet_force_magnitude(Scalar distance_cm, Scalar alpha, Scalar beta) {
  const Scalar gap = distance_cm - beta;
  return alpha / (gap * gap);
}

struct MagnetInstance {
  int tile = 0;
  Edge edge = Edge::North;
  GlueLabel label;
  Vec2 position = Vec2::Zero();  // world, meters
};

// +1 for an attracting pair, -1 otherwise.
inline int polarity(GlueLabel a, GlueLabel b) { return glues_match(a, b) ? 1 : -1; }

// Force on the magnet at `ri` due to the magnet at `rj` (meters in, newtons
// out). Zero beyond the cutoff; the distance is clamped below at 1e-6 cm.
template <typename Scalar>
Vec2T<Scalar> magnet_pair_force(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& rj, int p,
                                const MagnetParams& params) {
  const Vec2T<Scalar> diff = rj - ri;
  const Scalar dist_m = diff.norm();
  if (dist_m > Scalar(params.cutoff)) return Vec2T<Scalar>::Zero();
  using std::max;
  const Scalar dist_cm = max(dist_m * Scalar(kCentimetersPerMeter), Scalar(kMinMagnetDistanceCm));
  const Scalar magnitude =
      Scalar(p) * magnet_force_magnitude(dist_cm, Scalar(params.alpha), Scalar(params.beta));
  return magnitude * diff / (dist_cm / Scalar(kCentimetersPerMeter));
}

// Force on g_i. Null labels yield zero.
Vec2 pair_force(const MagnetInstance& gi, const MagnetInstance& gj, const MagnetParams& params);

// World positions of the four edge magnets, in Edge order.
std::array<Vec2, 4> magnet_positions(const TileState& tile, double tile_width, double inset);

std::array<MagnetInstance, 4> magnets_of(int tile_index, const TileState& tile, const TileKind& kind,
                                         double tile_width, double inset);

struct World;

// Sums magnet forces over every magnet pair within the cutoff, one wrench per
// tile (torques about tile centers). Overwrites `out`.
void accumulate_glue_forces(const World& world, std::vector<Wrench>& out);

struct MagnetSample {
  double distance_cm = 0.0;
  double force_n = 0.0;
};

struct MagnetFit {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // sum of squared residuals
  int iterations = 0;
};

struct FitOptions {
  double alpha0 = 0.1;
  double beta0 = -0.5;
  int max_iterations = 200;
  double tolerance = 1e-14;
};

// Levenberg-Marquardt least squares of F = alpha / (d - beta)^2.
// Needs >= 3 samples with distinct distances; throws NonConvergence when the
// iteration cap is reached.
MagnetFit fit_magnet_params(std::span<const MagnetSample> samples, const FitOptions& options = {});

}  // namespace tbsa
