#pragma once

#include "tbsa/geometry.hpp"
#include "tbsa/rng.hpp"
#include "tbsa/state.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tbsa {

// Edge label carried by a magnet. Zero means the edge has no glue.
class GlueLabel {
 public:
  constexpr GlueLabel() = default;
  constexpr explicit GlueLabel(int value) : value_(value) {}

  static constexpr GlueLabel null() { return GlueLabel(); }

  constexpr int value() const { return value_; }
  constexpr bool is_null() const { return value_ == 0; }

  // The partner label that attracts this one.
  constexpr GlueLabel match() const { return GlueLabel(-value_); }

  constexpr bool operator==(const GlueLabel&) const = default;

 private:
  int value_ = 0;
};

// Two non-null labels attract iff they sum to zero.
constexpr bool glues_match(GlueLabel a, GlueLabel b) {
  return !a.is_null() && !b.is_null() && a.value() + b.value() == 0;
}

// Body-frame edge order used everywhere (glue arrays, magnets).
enum class Edge : int { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Edge, 4> kEdges{Edge::North, Edge::East, Edge::South, Edge::West};

// Outward unit normal of an edge in the tile body frame.
inline Vec2 edge_normal(Edge e) {
  switch (e) {
    case Edge::North: return {0.0, 1.0};
    case Edge::East: return {1.0, 0.0};
    case Edge::South: return {0.0, -1.0};
    case Edge::West: return {-1.0, 0.0};
  }
  return Vec2::Zero();
}

enum class Family { A, B, Seed };
enum class Color { Black, White };

std::string_view to_string(Family f);
std::string_view to_string(Color c);
std::optional<Family> parse_family(std::string_view s);
std::optional<Color> parse_color(std::string_view s);

// Per-kind coefficients of the extended unicycle model.
struct DriveParams {
  double a = 0.0;
  double b = 0.0;
  double omega = 0.0;
};

struct TileKind {
  int id = 0;
  std::array<GlueLabel, 4> glues{};  // indexed by Edge
  Family family = Family::A;
  Color color = Color::Black;
  DriveParams drive;

  GlueLabel glue(Edge e) const { return glues[static_cast<int>(e)]; }
};

struct ReactorSpec {
  double radius = 0.6;  // m
  double wall_restitution = 0.2;
  double wall_friction = 0.25;
};

struct SeedSpec {
  int bounding_size = 10;
  int arm_width = 2;
  Vec2 center = Vec2::Zero();
};

struct Cell {
  int i = 0;
  int j = 0;
  auto operator<=>(const Cell&) const = default;
};

// Square lattice aligned with the seed. Cell (0,0) is the lower-left cell of
// the seed's bounding box.
struct Lattice {
  Vec2 origin = Vec2::Zero();  // center of cell (0,0)
  double spacing = 0.03;

  Vec2 center_of(Cell c) const { return origin + spacing * Vec2(c.i, c.j); }
  Cell nearest(const Vec2& p) const;
};

Lattice seed_lattice(const SeedSpec& spec, double tile_width);

struct Tileset {
  std::vector<TileKind> kinds;

  // Expected color of the chessboard at a lattice cell.
  static Color ground_truth(Cell c) {
    const int parity = ((c.i + c.j) % 2 + 2) % 2;
    return parity == 0 ? Color::Black : Color::White;
  }

  const TileKind& kind(int id) const { return kinds.at(static_cast<std::size_t>(id)); }

  // Free kind (family A or B) of the given color; throws if absent.
  const TileKind& free_kind(Color color, Family family) const;
  const TileKind& seed_kind(Color color) const;
};

// Checks that every label appearing has its partner somewhere.
bool is_closed_under_match(const Tileset& tileset);

// Chessboard tileset: black/A, black/B, white/A, white/B, seed black, seed white.
// Vertical bonds use +-1, horizontal bonds use +-2. Kind ids equal their index.
Tileset build_chessboard_tileset(DriveParams family_a = {1.0, 1.0, 1.0});

struct SeedTile {
  int kind_id = 0;
  Cell cell;
  Vec2 position = Vec2::Zero();
  double orientation = 0.0;
};

// Cells of the plus shape inside an n x n box, row-major from the lower left.
std::vector<Cell> cross_cells(const SeedSpec& spec);

std::vector<SeedTile> build_cross_seed(const SeedSpec& spec, const Tileset& tileset,
                                       double tile_width);

struct ScatterOptions {
  double tile_width = 0.03;
  double clearance = 0.0005;     // extra gap kept between placed bodies (m)
  std::uint64_t attempts_per_tile = 20000;
};

// Random non-overlapping placement of `count` free tiles inside the reactor.
// Kinds cycle through (black/A, white/B, white/A, black/B), so families and
// colors stay balanced. Throws PlacementOverflow when the budget runs out.
std::vector<TileState> scatter_free_tiles(int count, const ReactorSpec& reactor,
                                          std::span<const SeedTile> seed, const Tileset& tileset,
                                          Rng& rng, const ScatterOptions& options = {});

}  // namespace tbsa
