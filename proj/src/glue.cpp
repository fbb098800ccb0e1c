#include "tbsa/glue.hpp"

#include "tbsa/error.hpp"
#include "tbsa/physics.hpp"
#include "tbsa/world.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace tbsa {

void MagnetParams::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("magnet: alpha must be positive");
  if (!(cutoff > 0.0)) throw InvalidArgument("magnet: cutoff must be positive");
  if (!(inset >= 0.0)) throw InvalidArgument("magnet: inset must be non-negative");
  if (!std::isfinite(beta)) throw InvalidArgument("magnet: beta must be finite");
}

Vec2 pair_force(const MagnetInstance& gi, const MagnetInstance& gj, const MagnetParams& params) {
  if (gi.label.is_null() || gj.label.is_null()) return Vec2::Zero();
  return magnet_pair_force(gi.position, gj.position, polarity(gi.label, gj.label), params);
}

std::array<Vec2, 4> magnet_positions(const TileState& tile, double tile_width, double inset) {
  const double reach = 0.5 * tile_width - inset;
  std::array<Vec2, 4> out;
  for (Edge e : kEdges)
    out[static_cast<int>(e)] = tile.position + rotate(Vec2(reach * edge_normal(e)), tile.orientation);
  return out;
}

std::array<MagnetInstance, 4> magnets_of(int tile_index, const TileState& tile, const TileKind& kind,
                                         double tile_width, double inset) {
  const auto pos = magnet_positions(tile, tile_width, inset);
  std::array<MagnetInstance, 4> out;
  for (Edge e : kEdges) {
    const int k = static_cast<int>(e);
    out[k] = {tile_index, e, kind.glue(e), pos[k]};
  }
  return out;
}

void accumulate_glue_forces(const World& world, std::vector<Wrench>& out) {
  const auto& tiles = world.tiles;
  const double width = world.params.tile_width;
  const MagnetParams& mp = world.magnets;
  out.assign(tiles.size(), Wrench{});

  std::vector<std::array<MagnetInstance, 4>> magnets;
  std::vector<Vec2> centers;
  magnets.reserve(tiles.size());
  centers.reserve(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    magnets.push_back(magnets_of(static_cast<int>(i), tiles[i], world.kind_of(tiles[i]), width, mp.inset));
    centers.push_back(tiles[i].position);
  }

  // Two magnets within the cutoff have centers at most width + cutoff apart.
  const double reach = width + mp.cutoff;
  const double cutoff2 = mp.cutoff * mp.cutoff;
  SpatialHash hash;
  hash.build(centers, reach);
  hash.for_each_pair([&](int i, int j) {
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    if (tiles[ui].is_static && tiles[uj].is_static) return;
    if ((centers[ui] - centers[uj]).squaredNorm() > reach * reach) return;
    Wrench& wi = out[ui];
    Wrench& wj = out[uj];
    for (const MagnetInstance& gi : magnets[ui]) {
      if (gi.label.is_null()) continue;
      for (const MagnetInstance& gj : magnets[uj]) {
        if (gj.label.is_null()) continue;
        if ((gj.position - gi.position).squaredNorm() > cutoff2) continue;
        const Vec2 f = pair_force(gi, gj, mp);
        if (f.isZero(0.0)) continue;
        wi.force += f;
        wi.torque += cross2(gi.position - tiles[ui].position, f);
        wj.force -= f;
        wj.torque -= cross2(gj.position - tiles[uj].position, f);
      }
    }
  });
}

MagnetFit fit_magnet_params(std::span<const MagnetSample> samples, const FitOptions& options) {
  if (samples.size() < 3) throw InvalidArgument("fit_magnet_params: need at least 3 samples");
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (!std::isfinite(s.distance_cm) || !std::isfinite(s.force_n))
      throw InvalidArgument("fit_magnet_params: non-finite sample");
    distinct.insert(s.distance_cm);
  }
  if (distinct.size() != samples.size())
    throw InvalidArgument("fit_magnet_params: sample distances must be distinct");

  const double d_min = *distinct.begin();
  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::Vector2d x(options.alpha0, options.beta0);
  if (!(x[1] < d_min)) x[1] = d_min - 1.0;

  auto residuals = [&](const Eigen::Vector2d& q, Eigen::VectorXd& r) {
    r.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& s = samples[static_cast<std::size_t>(k)];
      r[k] = magnet_force_magnitude(s.distance_cm, q[0], q[1]) - s.force_n;
    }
  };
  auto jacobian = [&](const Eigen::Vector2d& q, Eigen::MatrixXd& j) {
    j.resize(m, 2);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double g = samples[static_cast<std::size_t>(k)].distance_cm - q[1];
      j(k, 0) = 1.0 / (g * g);
      j(k, 1) = 2.0 * q[0] / (g * g * g);
    }
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(x, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    jacobian(x, jac);
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= options.tolerance) return {x[0], x[1], cost, iter};

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector2d delta = a.ldlt().solve(-g);
      const Eigen::Vector2d trial = x + delta;
      // The model has a pole at d = beta; stay on the physical side.
      if (trial[1] < d_min) {
        Eigen::VectorXd r_trial;
        residuals(trial, r_trial);
        const double trial_cost = r_trial.squaredNorm();
        if (std::isfinite(trial_cost) && trial_cost <= cost) {
          const double step = delta.norm();
          const double scale = x.norm() + options.tolerance;
          const bool converged = cost - trial_cost <= options.tolerance * (cost + options.tolerance) &&
                                 step <= 1e-12 * scale;
          x = trial;
          r = std::move(r_trial);
          cost = trial_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          if (converged) return {x[0], x[1], cost, iter};
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) return {x[0], x[1], cost, iter};  // no descent direction left
  }
  throw NonConvergence("fit_magnet_params: no convergence within the iteration cap");
}

}  // namespace tbsa
