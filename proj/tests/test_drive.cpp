#include "tbsa/drive.hpp"
#include "tbsa/error.hpp"
#include "tbsa/world.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace tbsa;

TEST_CASE("excitation") {
  CHECK(excitation(0.0, 0.1) == 0.0);
  CHECK(excitation(2.5, 0.1) == doctest::Approx(1.0));
  CHECK(excitation(7.5, 0.1) == doctest::Approx(-1.0));
  CHECK(std::abs(excitation(5.0, 0.1)) < 1e-12);
}

TEST_CASE("unicycle drive examples") {
  const Tileset ts = build_chessboard_tileset();
  const DriveSpec spec{DriveMode::Unicycle, 0.05, 5e-4, 0.1};
  TileState t;
  t.orientation = 0.0;
  const Wrench a = unicycle_drive(t, ts.free_kind(Color::Black, Family::A), 1.0, spec);
  CHECK(a.force.x() == 0.0);
  CHECK(a.force.y() == doctest::Approx(0.05));
  CHECK(a.torque == doctest::Approx(5e-4));

  t.orientation = std::numbers::pi / 2;
  const Wrench b = unicycle_drive(t, ts.free_kind(Color::White, Family::B), 0.5, spec);
  CHECK(b.force.x() == doctest::Approx(-0.025));
  CHECK(std::abs(b.force.y()) < 1e-15);
  CHECK(b.torque == doctest::Approx(-2.5e-4));

  CHECK(unicycle_drive(t, ts.free_kind(Color::Black, Family::A), 0.0, spec).force.isZero(0.0));
  t.is_static = true;
  CHECK(unicycle_drive(t, ts.free_kind(Color::Black, Family::A), 1.0, spec).force.isZero(0.0));
}

TEST_CASE("shaking drive examples") {
  CHECK(shaking_drive(0.0, 0.05, 0.1).isApprox(Vec2(0.0, 0.05)));
  CHECK(shaking_drive(2.5, 0.05, 0.1).isApprox(Vec2(0.05, 0.0), 1e-12));
  for (double t : {0.3, 1.7, 11.0}) CHECK(shaking_drive(t, 0.05, 0.1).norm() == doctest::Approx(0.05));
}

TEST_CASE("accumulated drive forces per mode") {
  World w;
  w.tileset = build_chessboard_tileset();
  w.params.dt = 0.5;
  w.step_count = 5;  // t = 2.5, u = 1
  TileState seed;
  seed.kind_id = 4;
  seed.is_static = true;
  TileState fa;
  fa.kind_id = 0;
  TileState fb;
  fb.kind_id = 1;
  w.tiles = {seed, fa, fb};
  std::vector<Wrench> out;

  w.drive.mode = DriveMode::Unicycle;
  accumulate_drive_forces(w, out);
  CHECK(out[0].force.isZero(0.0));
  CHECK(out[1].force.y() == doctest::Approx(w.drive.f_mag));
  CHECK((out[1].force + out[2].force).isZero(0.0));
  CHECK(out[1].torque + out[2].torque == 0.0);

  w.drive.mode = DriveMode::Shaking;
  accumulate_drive_forces(w, out);
  CHECK(out[0].force.isZero(0.0));
  CHECK(out[1].force == out[2].force);
  CHECK(out[1].force.x() == doctest::Approx(w.drive.f_mag));
  CHECK(out[1].torque == 0.0);
}

TEST_CASE("balanced families cancel torque exactly and force on average") {
  const Tileset ts = build_chessboard_tileset();
  const DriveSpec spec;
  Rng rng(77);
  const int n = 500;
  double ratio_sum = 0.0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const double u = rng.uniform(-1.0, 1.0);
    std::vector<double> fx, fy, tq, mags;
    for (int k = 0; k < n; ++k) {
      TileState t;
      t.orientation = rng.uniform(0.0, 2 * std::numbers::pi);
      const Family fam = k % 2 == 0 ? Family::A : Family::B;
      const Color col = (k / 2) % 2 == 0 ? Color::Black : Color::White;
      const Wrench w = unicycle_drive(t, ts.free_kind(col, fam), u, spec);
      fx.push_back(w.force.x());
      fy.push_back(w.force.y());
      tq.push_back(w.torque);
      mags.push_back(w.force.norm());
    }
    CHECK(oracle::fsum(tq) == 0.0);
    ratio_sum += std::hypot(oracle::fsum(fx), oracle::fsum(fy)) / oracle::fsum(mags);
  }
  CHECK(ratio_sum / trials < 0.1);
}

TEST_CASE("drive mode names and validation") {
  CHECK(parse_drive_mode("unicycle") == DriveMode::Unicycle);
  CHECK(parse_drive_mode("shaking") == DriveMode::Shaking);
  CHECK_FALSE(parse_drive_mode("orbit").has_value());
  CHECK(to_string(DriveMode::Shaking) == "shaking");
  DriveSpec s;
  s.frequency = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}
