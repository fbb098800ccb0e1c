#include "tbsa/analysis.hpp"

#include "tbsa/error.hpp"
#include "tbsa/physics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace tbsa {

std::vector<std::vector<int>> BondGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count));
  for (const Bond& b : edges) {
    adj[static_cast<std::size_t>(b.a)].push_back(b.b);
    adj[static_cast<std::size_t>(b.b)].push_back(b.a);
  }
  return adj;
}

namespace {

// Edge of `tile` whose outward normal is closest to `dir` (world frame).
Edge facing_edge(const TileState& tile, const Vec2& dir) {
  const Vec2 local = rotate(dir, -tile.orientation);
  if (std::abs(local.x()) >= std::abs(local.y())) return local.x() >= 0.0 ? Edge::East : Edge::West;
  return local.y() >= 0.0 ? Edge::North : Edge::South;
}

Vec2 edge_midpoint(const TileState& tile, Edge e, double tile_width) {
  return tile.position + rotate(Vec2(0.5 * tile_width * edge_normal(e)), tile.orientation);
}

// Distance of an angle from the nearest multiple of 90 degrees.
double right_angle_deviation(double a) {
  constexpr double quarter = 0.5 * std::numbers::pi;
  const double r = std::remainder(a, quarter);
  return std::abs(r);
}

}  // namespace

BondGraph detect_bonds(std::span<const TileState> tiles, const Tileset& tileset, double tile_width,
                       const BondTolerance& tol) {
  BondGraph graph;
  graph.node_count = static_cast<int>(tiles.size());
  std::vector<Vec2> centers;
  centers.reserve(tiles.size());
  for (const auto& t : tiles) centers.push_back(t.position);

  // Bonded centers sit about one width apart; the cell covers the gap tolerance
  // and misalignment with room to spare.
  const double reach = tile_width * std::numbers::sqrt2 + tol.gap;
  SpatialHash hash;
  hash.build(centers, reach);
  hash.for_each_pair([&](int i, int j) {
    const TileState& ti = tiles[static_cast<std::size_t>(i)];
    const TileState& tj = tiles[static_cast<std::size_t>(j)];
    const Vec2 d = tj.position - ti.position;
    const double dist = d.norm();
    if (dist > reach || dist == 0.0) return;
    if (right_angle_deviation(tj.orientation - ti.orientation) > tol.angle) return;
    const Vec2 dir = d / dist;
    const Edge ei = facing_edge(ti, dir);
    const Edge ej = facing_edge(tj, -dir);
    const GlueLabel li = tileset.kind(ti.kind_id).glue(ei);
    const GlueLabel lj = tileset.kind(tj.kind_id).glue(ej);
    if (!glues_match(li, lj)) return;
    const double gap = (edge_midpoint(ti, ei, tile_width) - edge_midpoint(tj, ej, tile_width)).norm();
    if (gap >= tol.gap) return;
    graph.edges.push_back({i, j, li, lj});
  });
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Bond& l, const Bond& r) { return l.a != r.a ? l.a < r.a : l.b < r.b; });
  return graph;
}

std::vector<int> seed_component(const BondGraph& bonds, std::span<const int> seed_ids) {
  const auto adj = bonds.adjacency();
  std::vector<char> seen(static_cast<std::size_t>(bonds.node_count), 0);
  std::deque<int> queue;
  for (int s : seed_ids) {
    if (s < 0 || s >= bonds.node_count) throw InvalidArgument("seed_component: seed id out of range");
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      queue.push_back(w);
    }
  }
  std::vector<int> out;
  for (int v = 0; v < bonds.node_count; ++v)
    if (seen[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

SnapResult snap_to_lattice(std::span<const TileState> tiles, std::span<const int> ids,
                           const Lattice& lattice, SnapPolicy policy) {
  SnapResult out;
  for (int id : ids) {
    const TileState& t = tiles[static_cast<std::size_t>(id)];
    const Cell c = lattice.nearest(t.position);
    auto [it, inserted] = out.cells.emplace(c, id);
    if (inserted) continue;
    if (policy == SnapPolicy::Strict)
      throw LatticeSnapFailure("tiles " + std::to_string(it->second) + " and " + std::to_string(id) +
                               " snap to cell (" + std::to_string(c.i) + "," + std::to_string(c.j) + ")");
    ++out.conflicts;
    const Vec2 center = lattice.center_of(c);
    const double d_old = (tiles[static_cast<std::size_t>(it->second)].position - center).squaredNorm();
    if ((t.position - center).squaredNorm() < d_old) it->second = id;
  }
  return out;
}

int detect_holes(const Occupancy& occupied) {
  auto full = [&](Cell c) { return occupied.count(c) > 0; };
  std::set<Cell> candidates;
  for (Cell c : occupied)
    for (Cell n : {Cell{c.i + 1, c.j}, Cell{c.i - 1, c.j}, Cell{c.i, c.j + 1}, Cell{c.i, c.j - 1}})
      if (!full(n)) candidates.insert(n);
  int holes = 0;
  for (Cell c : candidates)
    if (full({c.i + 1, c.j}) && full({c.i - 1, c.j}) && full({c.i, c.j + 1}) && full({c.i, c.j - 1}))
      ++holes;
  return holes;
}

int classify_errors(const SnapResult& snapped, std::span<const TileState> tiles,
                    const Tileset& tileset) {
  int errors = 0;
  for (const auto& [cell, id] : snapped.cells) {
    const TileKind& kind = tileset.kind(tiles[static_cast<std::size_t>(id)].kind_id);
    if (kind.color != Tileset::ground_truth(cell)) ++errors;
  }
  return errors;
}

MetricsRow compute_metrics(const Snapshot& snapshot, const StreamHeader& header,
                           const AnalysisOptions& options) {
  const auto& tiles = snapshot.tiles;
  std::vector<int> seeds;
  for (std::size_t i = 0; i < tiles.size(); ++i)
    if (header.tileset.kind(tiles[i].kind_id).family == Family::Seed) seeds.push_back(static_cast<int>(i));

  MetricsRow row;
  row.time = snapshot.time;
  if (seeds.empty()) return row;

  const BondGraph bonds = detect_bonds(tiles, header.tileset, header.tile_width, options.tolerance);
  const std::vector<int> component = seed_component(bonds, seeds);
  const SnapResult snapped = snap_to_lattice(tiles, component, header.lattice, SnapPolicy::KeepNearest);
  Occupancy occupied;
  for (const auto& [cell, id] : snapped.cells) occupied.insert(cell);

  row.size = static_cast<int>(component.size());
  row.size_free = row.size - static_cast<int>(seeds.size());
  row.errors = classify_errors(snapped, tiles, header.tileset);
  row.holes = detect_holes(occupied);
  row.snap_conflicts = snapped.conflicts;
  row.error_pct = 100.0 * row.errors / row.size;
  row.hole_pct = 100.0 * row.holes / row.size;
  return row;
}

Stat mean_stddev(std::span<const double> values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<MetricsRow>>& runs) {
  if (runs.empty()) throw InvalidArgument("aggregate: no runs");
  const std::size_t len = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != len) throw InvalidArgument("aggregate: series lengths differ");
    for (std::size_t k = 0; k < len; ++k)
      if (r[k].time != runs.front()[k].time) throw InvalidArgument("aggregate: time grids differ");
  }
  std::vector<AggregateRow> out(len);
  std::vector<double> buf(runs.size());
  for (std::size_t k = 0; k < len; ++k) {
    AggregateRow& row = out[k];
    row.time = runs.front()[k].time;
    row.runs = static_cast<int>(runs.size());
    auto stat = [&](auto field) {
      for (std::size_t r = 0; r < runs.size(); ++r) buf[r] = field(runs[r][k]);
      return mean_stddev(buf);
    };
    row.size = stat([](const MetricsRow& m) { return static_cast<double>(m.size); });
    row.size_free = stat([](const MetricsRow& m) { return static_cast<double>(m.size_free); });
    row.error_pct = stat([](const MetricsRow& m) { return m.error_pct; });
    row.hole_pct = stat([](const MetricsRow& m) { return m.hole_pct; });
  }
  return out;
}

}  // namespace tbsa
