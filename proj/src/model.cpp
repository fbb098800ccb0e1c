#include "tbsa/model.hpp"

#include "tbsa/error.hpp"
#include "tbsa/physics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace tbsa {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::Seed: return "seed";
  }
  return "?";
}

std::string_view to_string(Color c) { return c == Color::Black ? "black" : "white"; }

std::optional<Family> parse_family(std::string_view s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "seed") return Family::Seed;
  return std::nullopt;
}

std::optional<Color> parse_color(std::string_view s) {
  if (s == "black") return Color::Black;
  if (s == "white") return Color::White;
  return std::nullopt;
}

Cell Lattice::nearest(const Vec2& p) const {
  const Vec2 q = (p - origin) / spacing;
  return {static_cast<int>(std::lround(q.x())), static_cast<int>(std::lround(q.y()))};
}

Lattice seed_lattice(const SeedSpec& spec, double tile_width) {
  const double offset = 0.5 * (spec.bounding_size - 1) * tile_width;
  return {spec.center - Vec2(offset, offset), tile_width};
}

const TileKind& Tileset::free_kind(Color color, Family family) const {
  for (const auto& k : kinds)
    if (k.color == color && k.family == family) return k;
  throw InvalidArgument("tileset has no kind for the requested color/family");
}

const TileKind& Tileset::seed_kind(Color color) const { return free_kind(color, Family::Seed); }

bool is_closed_under_match(const Tileset& tileset) {
  std::map<int, bool> seen;
  for (const auto& k : tileset.kinds)
    for (auto g : k.glues)
      if (!g.is_null()) seen[g.value()] = true;
  return std::all_of(seen.begin(), seen.end(),
                     [&](const auto& kv) { return seen.count(-kv.first) > 0; });
}

Tileset build_chessboard_tileset(DriveParams family_a) {
  // Black carries only positive labels and white only negative ones, so every
  // black/white contact of equal magnitude attracts and every same-color
  // contact repels. Vertical contacts use magnitude 1, horizontal magnitude 2,
  // which makes a quarter-turned tile repel its neighbours as well.
  const std::array<GlueLabel, 4> black{GlueLabel(+1), GlueLabel(+2), GlueLabel(+1), GlueLabel(+2)};
  const std::array<GlueLabel, 4> white{GlueLabel(-1), GlueLabel(-2), GlueLabel(-1), GlueLabel(-2)};
  const DriveParams family_b{-family_a.a, -family_a.b, -family_a.omega};

  Tileset ts;
  auto add = [&](const std::array<GlueLabel, 4>& glues, Family fam, Color color, DriveParams d) {
    ts.kinds.push_back({static_cast<int>(ts.kinds.size()), glues, fam, color, d});
  };
  add(black, Family::A, Color::Black, family_a);
  add(black, Family::B, Color::Black, family_b);
  add(white, Family::A, Color::White, family_a);
  add(white, Family::B, Color::White, family_b);
  add(black, Family::Seed, Color::Black, {});
  add(white, Family::Seed, Color::White, {});
  return ts;
}

std::vector<Cell> cross_cells(const SeedSpec& spec) {
  const int n = spec.bounding_size;
  const int k = spec.arm_width;
  if (n < 1 || k < 1) throw InvalidArgument("seed: bounding_size and arm_width must be >= 1");
  if (k > n) throw InvalidArgument("seed: arm_width exceeds bounding_size");
  if ((n - k) % 2 != 0)
    throw InvalidArgument("seed: bounding_size - arm_width must be even for a centered cross");
  const int lo = (n - k) / 2;
  const int hi = lo + k;  // exclusive
  std::vector<Cell> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if ((i >= lo && i < hi) || (j >= lo && j < hi)) cells.push_back({i, j});
  return cells;
}

std::vector<SeedTile> build_cross_seed(const SeedSpec& spec, const Tileset& tileset,
                                       double tile_width) {
  const Lattice lattice = seed_lattice(spec, tile_width);
  std::vector<SeedTile> out;
  for (Cell c : cross_cells(spec)) {
    const TileKind& kind = tileset.seed_kind(Tileset::ground_truth(c));
    out.push_back({kind.id, c, lattice.center_of(c), 0.0});
  }
  return out;
}

namespace {

// Uniform grid over placed bodies for overlap queries during scattering.
class PlacementGrid {
 public:
  explicit PlacementGrid(double cell) : cell_(cell) {}

  void insert(const Box& b) {
    boxes_.push_back(b);
    grid_[key(b.center)].push_back(boxes_.size() - 1);
  }

  bool overlaps(const Box& b, double clearance) const {
    const auto [cx, cy] = coords(b.center);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find({cx + dx, cy + dy});
        if (it == grid_.end()) continue;
        for (std::size_t idx : it->second)
          if (collide_boxes(b, boxes_[idx], clearance).point_count > 0) return true;
      }
    return false;
  }

 private:
  std::pair<long, long> coords(const Vec2& p) const {
    return {std::lround(std::floor(p.x() / cell_)), std::lround(std::floor(p.y() / cell_))};
  }
  std::pair<long, long> key(const Vec2& p) const { return coords(p); }

  double cell_;
  std::vector<Box> boxes_;
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid_;
};

}  // namespace

std::vector<TileState> scatter_free_tiles(int count, const ReactorSpec& reactor,
                                          std::span<const SeedTile> seed, const Tileset& tileset,
                                          Rng& rng, const ScatterOptions& options) {
  if (count < 0) throw InvalidArgument("scatter: negative tile count");
  if (!(reactor.radius > 0.0)) throw InvalidArgument("scatter: reactor radius must be positive");
  std::vector<TileState> out;
  if (count == 0) return out;

  const double half = 0.5 * options.tile_width;
  const double half_diag = half * std::numbers::sqrt2;
  PlacementGrid grid(2.0 * half_diag + options.clearance);
  for (const auto& s : seed) grid.insert({s.position, s.orientation, half});

  const std::array<std::pair<Color, Family>, 4> cycle{{{Color::Black, Family::A},
                                                       {Color::White, Family::B},
                                                       {Color::White, Family::A},
                                                       {Color::Black, Family::B}}};
  const double r_max = reactor.radius - half - options.clearance;
  if (r_max <= 0.0) throw PlacementOverflow("scatter: reactor smaller than a tile");

  const std::uint64_t budget = options.attempts_per_tile * static_cast<std::uint64_t>(count);
  std::uint64_t attempts = 0;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    if (attempts++ >= budget)
      throw PlacementOverflow("scatter: placed " + std::to_string(out.size()) + " of " +
                              std::to_string(count) + " tiles before the attempt budget ran out");
    // Area-uniform point in the disc that can hold a tile center at all.
    const double r = r_max * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const Box box{Vec2(r * std::cos(theta), r * std::sin(theta)), phi, half};
    if (collide_wall(box, reactor.radius, options.clearance).point_count > 0) continue;
    if (grid.overlaps(box, options.clearance)) continue;

    const auto [color, family] = cycle[out.size() % cycle.size()];
    TileState t;
    t.kind_id = tileset.free_kind(color, family).id;
    t.position = box.center;
    t.orientation = phi;
    out.push_back(t);
    grid.insert(box);
  }
  return out;
}

}  // namespace tbsa
