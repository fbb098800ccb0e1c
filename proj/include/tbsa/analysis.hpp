#pragma once

#include "tbsa/model.hpp"
#include "tbsa/state.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tbsa {

struct Snapshot {
  double time = 0.0;
  int run_id = 0;
  std::string digest;
  std::vector<TileState> tiles;
};

// Everything needed to analyze a snapshot stream on its own.
struct StreamHeader {
  int run_id = 0;
  std::string digest;
  std::string version;
  double tile_width = 0.03;
  Lattice lattice;
  Tileset tileset;
};

struct Bond {
  int a = 0;
  int b = 0;
  GlueLabel label_a;
  GlueLabel label_b;
};

struct BondGraph {
  int node_count = 0;
  std::vector<Bond> edges;

  std::vector<std::vector<int>> adjacency() const;
};

struct BondTolerance {
  double gap = 0.006;        // m, edge-midpoint distance
  double angle = 15.0 * std::numbers::pi / 180.0;  // rad, from a multiple of 90 deg
};

// Bonds between tiles whose facing edges carry matching glues, sit closer
// than tol.gap and are aligned to within tol.angle of a right angle multiple.
BondGraph detect_bonds(std::span<const TileState> tiles, const Tileset& tileset, double tile_width,
                       const BondTolerance& tol);

// Breadth-first closure of the seed ids over the bonds; sorted ascending.
std::vector<int> seed_component(const BondGraph& bonds, std::span<const int> seed_ids);

using Occupancy = std::set<Cell>;

enum class SnapPolicy {
  Strict,       // two tiles on one cell throws LatticeSnapFailure
  KeepNearest,  // keep the tile closest to the cell center
};

struct SnapResult {
  std::map<Cell, int> cells;  // cell -> tile index
  int conflicts = 0;
};

SnapResult snap_to_lattice(std::span<const TileState> tiles, std::span<const int> ids,
                           const Lattice& lattice, SnapPolicy policy = SnapPolicy::Strict);

// Empty cells whose four orthogonal neighbours are all occupied.
int detect_holes(const Occupancy& occupied);

// Tiles whose color disagrees with the chessboard parity of their cell.
int classify_errors(const SnapResult& snapped, std::span<const TileState> tiles,
                    const Tileset& tileset);

struct MetricsRow {
  double time = 0.0;
  int size = 0;       // component including seed
  int size_free = 0;  // component without seed tiles
  double error_pct = 0.0;
  double hole_pct = 0.0;
  int errors = 0;
  int holes = 0;
  int snap_conflicts = 0;
};

struct AnalysisOptions {
  BondTolerance tolerance;
};

MetricsRow compute_metrics(const Snapshot& snapshot, const StreamHeader& header,
                           const AnalysisOptions& options = {});

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct AggregateRow {
  double time = 0.0;
  int runs = 0;
  Stat size;
  Stat size_free;
  Stat error_pct;
  Stat hole_pct;
};

// Pointwise mean and population standard deviation. Throws InvalidArgument
// when the series do not share the time grid.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<MetricsRow>>& runs);

Stat mean_stddev(std::span<const double> values);

}  // namespace tbsa
