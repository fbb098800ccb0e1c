#include "tbsa/error.hpp"
#include "tbsa/physics.hpp"
#include "tbsa/world.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace tbsa;

namespace {

World empty_world(double radius = 1.0) {
  World w;
  w.reactor.radius = radius;
  w.tileset = build_chessboard_tileset();
  return w;
}

TileState tile_at(Vec2 p, double phi = 0.0, Vec2 v = Vec2::Zero(), double omega = 0.0) {
  TileState t;
  t.kind_id = 0;
  t.position = p;
  t.orientation = phi;
  t.linear_velocity = v;
  t.angular_velocity = omega;
  return t;
}

void frictionless(PhysicsParams& p) {
  p.friction_tile_tile = 0.0;
  p.friction_tile_floor = 0.0;
  p.angular_friction_floor = 0.0;
  p.linear_damping = 0.0;
  p.angular_damping = 0.0;
}

}  // namespace

TEST_CASE("a tile at rest stays put") {
  World w = empty_world();
  w.tiles.push_back(tile_at(Vec2(0.1, -0.2), 0.3));
  const TileState before = w.tiles[0];
  for (int k = 0; k < 500; ++k) step(w, {});
  CHECK(w.tiles[0].position == before.position);
  CHECK(w.tiles[0].orientation == before.orientation);
  CHECK(w.tiles[0].linear_velocity == Vec2::Zero());
  CHECK(w.step_count == 500);
}

TEST_CASE("viscous damping follows the exponential") {
  World w = empty_world(5.0);
  frictionless(w.params);
  w.params.linear_damping = 0.8;
  w.params.angular_damping = 0.5;
  w.tiles.push_back(tile_at(Vec2::Zero(), 0.0, Vec2(0.2, 0.0), 3.0));
  const int n = 240;
  for (int k = 0; k < n; ++k) step(w, {});
  const double t = n * w.params.dt;
  CHECK(w.tiles[0].linear_velocity.x() == doctest::Approx(0.2 * std::exp(-0.8 * t)).epsilon(0.01));
  CHECK(w.tiles[0].angular_velocity == doctest::Approx(3.0 * std::exp(-0.5 * t)).epsilon(0.01));
}

TEST_CASE("floor friction stops a sliding tile without reversing it") {
  World w = empty_world(5.0);
  w.params.linear_damping = 0.0;
  w.params.angular_damping = 0.0;
  w.tiles.push_back(tile_at(Vec2::Zero(), 0.0, Vec2(0.1, 0.0), 0.0));
  // v0 / (mu g) = 0.0408 s, a few steps.
  for (int k = 0; k < 20; ++k) step(w, {});
  CHECK(w.tiles[0].linear_velocity.norm() == 0.0);
  CHECK(w.tiles[0].position.x() > 0.0);
  CHECK(w.tiles[0].position.x() < 0.1 * 0.1 / (2 * 0.25 * kGravity) + 0.1 * w.params.dt);
}

TEST_CASE("frictionless head-on collision conserves momentum") {
  World w = empty_world(5.0);
  frictionless(w.params);
  w.tiles.push_back(tile_at(Vec2(-0.05, 0.0), 0.0, Vec2(0.3, 0.0)));
  w.tiles.push_back(tile_at(Vec2(0.05, 0.0), 0.0, Vec2(-0.3, 0.0)));
  const Vec2 p0 = linear_momentum(w);
  const double scale = 2 * w.params.tile_mass * 0.3;
  bool touched = false;
  for (int k = 0; k < 120; ++k) {
    step(w, {});
    touched |= w.tiles[0].linear_velocity.x() < 0.0;
    CHECK((linear_momentum(w) - p0).norm() / scale < 1e-9);
  }
  CHECK(touched);
  // Restitution 0.2 leaves the pair separating.
  CHECK(w.tiles[0].linear_velocity.x() == doctest::Approx(-0.06).epsilon(0.05));
}

TEST_CASE("contact examples") {
  const double m = 0.0005;
  SUBCASE("touching squares") {
    const Contact c = collide_boxes({Vec2(0, 0), 0, 0.015}, {Vec2(0.03, 0), 0, 0.015}, m);
    REQUIRE(c.point_count == 2);
    CHECK(c.normal.isApprox(Vec2(1, 0)));
    CHECK(c.penetration() == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("separated squares") {
    CHECK(collide_boxes({Vec2(0, 0), 0, 0.015}, {Vec2(0.05, 0), 0, 0.015}, m).point_count == 0);
  }
  SUBCASE("overlap depth") {
    const Contact c = collide_boxes({Vec2(0, 0), 0, 0.015}, {Vec2(0.025, 0.01), 0, 0.015}, m);
    REQUIRE(c.point_count == 2);
    CHECK(c.penetration() == doctest::Approx(0.005));
  }
  SUBCASE("wall") {
    const Contact near = collide_wall({Vec2(0.6 - 0.01, 0), 0, 0.015}, 0.6, m);
    REQUIRE(near.point_count == 2);
    CHECK(near.normal.x() > 0.99);
    CHECK(near.penetration() > 0.0);
    CHECK(collide_wall({Vec2(0.3, 0), 0, 0.015}, 0.6, m).point_count == 0);
  }
}

TEST_CASE("box collision agrees with the polygon overlap oracle") {
  Rng rng(2024);
  int disagreements = 0, overlapping = 0;
  for (int k = 0; k < 20000; ++k) {
    const Box a{Vec2(0, 0), rng.uniform(-3.2, 3.2), 0.015};
    const Box b{Vec2(rng.uniform(-0.045, 0.045), rng.uniform(-0.045, 0.045)), rng.uniform(-3.2, 3.2), 0.015};
    const Contact c = collide_boxes(a, b, 0.0);
    const bool oracle = oracle::squares_overlap(a.center, a.angle, b.center, b.angle, 0.015);
    overlapping += oracle;
    const bool engine = c.point_count > 0 && c.penetration() > 1e-12;
    // Grazing configurations are ambiguous at round-off level.
    const bool grazing = c.point_count > 0 && c.penetration() < 1e-9;
    if (engine != oracle && !grazing) ++disagreements;
  }
  CHECK(overlapping > 1000);
  CHECK(disagreements == 0);
}

TEST_CASE("broad phase finds exactly the all-pairs contacts") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    World w = empty_world(0.3);
    Rng rng(seed);
    for (int k = 0; k < 50; ++k)
      w.tiles.push_back(tile_at(Vec2(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)), rng.uniform(0, 6.3)));
    w.tiles[3].is_static = true;
    w.tiles[7].is_static = true;

    std::set<std::pair<int, int>> expected;
    const double half = w.params.half_width();
    for (int i = 0; i < 50; ++i)
      for (int j = i + 1; j < 50; ++j) {
        const auto& a = w.tiles[static_cast<std::size_t>(i)];
        const auto& b = w.tiles[static_cast<std::size_t>(j)];
        if (a.is_static && b.is_static) continue;
        if (collide_boxes({a.position, a.orientation, half}, {b.position, b.orientation, half},
                          w.params.contact_margin)
                .point_count > 0)
          expected.insert({i, j});
      }
    std::set<std::pair<int, int>> found;
    for (const Contact& c : detect_contacts(w))
      if (!c.is_wall()) found.insert({c.a, c.b});
    CHECK(found == expected);
  }
}

TEST_CASE("kinetic energy never increases without forcing") {
  World w = empty_world(0.2);
  Rng rng(9);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j)
      w.tiles.push_back(tile_at(Vec2(0.0305 * (i - 2), 0.0305 * (j - 1.5)), rng.uniform(-0.05, 0.05),
                                Vec2(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)), rng.uniform(-5, 5)));
  double prev = kinetic_energy(w);
  int increases = 0;
  for (int k = 0; k < 2000; ++k) {
    step(w, {});
    const double e = kinetic_energy(w);
    if (e > prev * (1.0 + 1e-12)) ++increases;
    prev = e;
  }
  CHECK(increases == 0);
  CHECK(prev < 1e-12);
}

TEST_CASE("static tiles never move") {
  World w = empty_world(0.3);
  w.tiles.push_back(tile_at(Vec2(0, 0)));
  w.tiles[0].is_static = true;
  w.tiles.push_back(tile_at(Vec2(-0.1, 0), 0.2, Vec2(0.5, 0.0)));
  std::vector<Wrench> push(2);
  push[0].force = Vec2(1.0, 1.0);
  push[0].torque = 1.0;
  for (int k = 0; k < 300; ++k) step(w, push);
  CHECK(w.tiles[0].position == Vec2(0, 0));
  CHECK(w.tiles[0].orientation == 0.0);
  CHECK(w.tiles[1].position.x() < -0.029);
}

TEST_CASE("tiles stay inside the reactor under a hard push") {
  World w = empty_world(0.1);
  w.tiles.push_back(tile_at(Vec2(0, 0)));
  std::vector<Wrench> push(1);
  push[0].force = Vec2(0.5, 0.2);
  for (int k = 0; k < 2000; ++k) {
    step(w, push);
    for (const Vec2& c : oracle::corners(w.tiles[0].position, w.tiles[0].orientation, 0.015))
      REQUIRE(c.norm() < 0.1 + 0.0075);
  }
}

TEST_CASE("runaway speeds raise NumericalDivergence") {
  World w = empty_world(50.0);
  w.tiles.push_back(tile_at(Vec2(0, 0)));
  std::vector<Wrench> push(1);
  push[0].force = Vec2(1e6, 0.0);
  CHECK_THROWS_AS(step(w, push), NumericalDivergence);
}

TEST_CASE("parameter validation") {
  PhysicsParams p;
  CHECK_NOTHROW(p.validate());
  p.tile_mass = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
