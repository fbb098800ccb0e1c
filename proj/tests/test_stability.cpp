#include "tbsa/error.hpp"
#include "tbsa/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace tbsa;

TEST_CASE("net tile force") {
  std::vector<Vec2> none;
  CHECK(net_tile_force<double>(none).isZero(0.0));
  std::vector<Vec2> pair{Vec2(1, 0), Vec2(-1, 0)};
  CHECK(net_tile_force<double>(pair).isZero(0.0));
  const Vec2 ma = 0.016 * Vec2(3.0, -4.0);
  std::vector<Vec2> many(49, ma);
  CHECK(net_tile_force<double>(many).isApprox(49.0 * ma));
}

TEST_CASE("net glue force") {
  CHECK(net_glue_force(1, 1.0).norm() == doctest::Approx(2.0));
  CHECK(net_glue_force(10, 0.44).norm() == doctest::Approx(8.8));
  const Vec2 f = net_glue_force(3, 0.2);
  CHECK(f.x() == f.y());
  CHECK(f.x() > 0.0);
  CHECK_THROWS_AS(net_glue_force(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(net_glue_force(2, 0.0), InvalidArgument);
}

TEST_CASE("detachment predicate") {
  const Vec2 glue = net_glue_force(6, 1.0);  // magnitude 12
  for (auto mode : {DetachmentMode::Harmonic, DetachmentMode::Quadrant})
    CHECK_FALSE(is_detached(Vec2(Vec2::Zero()), glue, mode));
  const Vec2 dir(std::sqrt(0.5), -std::sqrt(0.5));
  CHECK_FALSE(is_detached(Vec2(10.0 * dir), glue));
  CHECK(is_detached(Vec2(12.0 * dir), net_glue_force(5, 1.0)));

  // Quadrant test, seed-facing convention: pulling hard against the glue detaches.
  CHECK(is_detached(Vec2(-20.0, -20.0), glue, DetachmentMode::Quadrant));
  CHECK_FALSE(is_detached(Vec2(-5.0, -5.0), glue, DetachmentMode::Quadrant));
  CHECK(is_detached(Vec2(-9.0, 0.0), glue, DetachmentMode::Quadrant));

  // Literal third-quadrant reading flips the verdicts.
  CHECK_FALSE(is_detached(Vec2(-20.0, -20.0), glue, DetachmentMode::Quadrant, QuadrantConvention::AsWritten));
  CHECK(is_detached(Vec2(-5.0, -5.0), glue, DetachmentMode::Quadrant, QuadrantConvention::AsWritten));
}

TEST_CASE("critical seed size") {
  CHECK(critical_seed_size(0.8, 0.016, 6.25) == doctest::Approx(4.0));
  CHECK(critical_seed_size(3.2, 0.016, 6.25) == doctest::Approx(8.0));
  CHECK(critical_seed_size(0.8, 0.016, 1e12) < 1e-4);
  CHECK_THROWS_AS(critical_seed_size(0.0, 0.016, 1.0), InvalidArgument);
  CHECK_THROWS_AS(critical_seed_size(1.0, -0.016, 1.0), InvalidArgument);
  CHECK_THROWS_AS(critical_seed_size(1.0, 0.016, 0.0), InvalidArgument);
  for (int n = 2; n <= 6; ++n)
    CHECK(critical_seed_size(0.44, 0.016, accel_for_critical_size(0.44, 0.016, double(n))) ==
          doctest::Approx(n));
}

TEST_CASE("critical seed size is monotone") {
  double prev = 0.0;
  for (double fg = 0.1; fg < 2.0; fg += 0.1) {
    const double n = critical_seed_size(fg, 0.016, 5.0);
    CHECK(n > prev);
    prev = n;
  }
  prev = 1e9;
  for (double m = 0.005; m < 0.05; m += 0.005) {
    const double n = critical_seed_size(0.44, m, 5.0);
    CHECK(n < prev);
    prev = n;
  }
  prev = 1e9;
  for (double a = 0.5; a < 20.0; a += 0.5) {
    const double n = critical_seed_size(0.44, 0.016, a);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("harmonic comparison flips at the crossover size") {
  // Uniform shaking of an n x n assembly against 2n glues.
  const double m = 0.016;
  for (double fg : {0.1, 0.44, 0.8}) {
    for (double a : {2.0, 7.5, 30.0}) {
      const double crossover = harmonic_crossover_size(fg, m, a);
      for (int n = 1; n <= 200; ++n) {
        std::vector<Vec2> forces(static_cast<std::size_t>(n) * n, Vec2(m * a, 0.0));
        const bool detached = is_detached(net_tile_force<double>(forces), net_glue_force(n, fg));
        if (std::abs(n - crossover) > 1e-9) CHECK(detached == (n > crossover));
      }
      // The square-root form sits below the crossover whenever the crossover exceeds 1.
      if (crossover > 1.0) CHECK(critical_seed_size(fg, m, a) < crossover);
    }
  }
}

TEST_CASE("measured net force over a component") {
  std::vector<Wrench> w(4);
  w[0].force = Vec2(1, 0);
  w[1].force = Vec2(0, 2);
  w[2].force = Vec2(5, 5);
  w[3].force = Vec2(-1, -1);
  std::vector<int> ids{0, 1, 3};
  CHECK(measured_net_force(w, ids).isApprox(Vec2(0, 1)));
}
