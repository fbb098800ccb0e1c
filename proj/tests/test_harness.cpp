#include "tbsa/config.hpp"
#include "tbsa/error.hpp"
#include "tbsa/harness.hpp"
#include "tbsa/snapshot_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tbsa;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.reactor.radius = 0.15;
  c.seed.bounding_size = 2;
  c.seed.arm_width = 2;
  c.free_tiles = 16;
  c.duration = 30.0;
  c.snapshot_period = 10.0;
  c.rng_seed = 4;
  return c;
}

std::string stream_of(const ExperimentConfig& c) {
  std::ostringstream os;
  RunOptions opts;
  opts.snapshot_out = &os;
  run_experiment(c, 0, opts);
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tbsa-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("a run emits snapshots at every period including t = 0") {
  const ExperimentConfig c = small_config();
  RunOptions opts;
  opts.keep_snapshots = true;
  const RunResult r = run_experiment(c, 3, opts);
  REQUIRE(r.snapshots.size() == 4);
  REQUIRE(r.metrics.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(r.snapshots[static_cast<std::size_t>(k)].time == 10.0 * k);
    CHECK(r.metrics[static_cast<std::size_t>(k)].time == 10.0 * k);
    CHECK(r.metrics[static_cast<std::size_t>(k)].size >= 4);
    CHECK(r.snapshots[static_cast<std::size_t>(k)].run_id == 3);
  }
  CHECK(r.steps == c.total_steps());
  CHECK(r.digest == config_digest(c));
  CHECK(r.snapshots[0].tiles.size() == 20);
}

TEST_CASE("identical config and seed give byte-identical streams") {
  const ExperimentConfig c = small_config();
  const std::string a = stream_of(c);
  CHECK(a == stream_of(c));
  ExperimentConfig other = c;
  other.rng_seed = 5;
  CHECK(a != stream_of(other));
}

TEST_CASE("stored snapshots re-analyze to the same metrics") {
  const ExperimentConfig c = small_config();
  std::ostringstream os;
  RunOptions opts;
  opts.snapshot_out = &os;
  const RunResult r = run_experiment(c, 0, opts);
  std::istringstream is(os.str());
  const SnapshotStream s = read_snapshot_stream(is);
  CHECK(s.header.digest == r.digest);
  REQUIRE(s.snapshots.size() == r.metrics.size());
  for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
    const MetricsRow m = compute_metrics(s.snapshots[k], s.header, c.analysis);
    CHECK(m.time == r.metrics[k].time);
    CHECK(m.size == r.metrics[k].size);
    CHECK(m.errors == r.metrics[k].errors);
    CHECK(m.holes == r.metrics[k].holes);
  }
  // Round trip of the stream text itself.
  std::ostringstream again;
  write_stream_header(again, s.header);
  for (const auto& snap : s.snapshots) write_snapshot(again, snap);
  CHECK(again.str() == os.str());
}

TEST_CASE("malformed streams are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_snapshot_stream(empty), Error);
  std::istringstream wrong("not-a-stream 1\n");
  CHECK_THROWS_AS(read_snapshot_stream(wrong), Error);
}

TEST_CASE("batch results do not depend on the number of workers") {
  ExperimentConfig c = small_config();
  c.duration = 20.0;
  const BatchResult serial = run_batch(c, 3, 10, 1);
  const BatchResult parallel = run_batch(c, 3, 10, 4);
  REQUIRE(serial.ok());
  REQUIRE(parallel.ok());
  std::ostringstream a, b;
  write_aggregate_csv(a, serial.aggregate);
  write_aggregate_csv(b, parallel.aggregate);
  CHECK(a.str() == b.str());
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(serial.runs[k].run_id == static_cast<int>(k));
    CHECK(serial.runs[k].rng_seed == 10 + k);
  }

  const BatchResult single = run_batch(c, 1, 10, 2);
  REQUIRE(single.aggregate.size() == single.runs[0].metrics.size());
  for (std::size_t k = 0; k < single.aggregate.size(); ++k) {
    CHECK(single.aggregate[k].size.mean == single.runs[0].metrics[k].size);
    CHECK(single.aggregate[k].size.stddev == 0.0);
  }
  CHECK_THROWS_AS(run_batch(c, 0, 1, 1), InvalidArgument);
}

TEST_CASE("batch output directory layout") {
  ExperimentConfig c = small_config();
  c.duration = 10.0;
  const auto dir = scratch("batch");
  const BatchResult r = run_batch(c, 2, 1, 2, dir);
  REQUIRE(r.ok());
  for (const char* f : {"aggregate.csv", "manifest.json", "size.svg", "error_pct.svg", "hole_pct.svg",
                        "run_0/snapshots.tbsa", "run_0/metrics.csv", "run_1/manifest.json"})
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  std::ifstream in(dir / "aggregate.csv");
  const auto rows = read_aggregate_csv(in);
  CHECK(rows.size() == r.aggregate.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing, defaults and overrides") {
  const ExperimentConfig d = config_from_json(nlohmann::json::object());
  CHECK(d.free_tiles == 550);
  CHECK(d.reactor.radius == 0.6);
  CHECK(d.seed.bounding_size == 10);
  CHECK(d.duration == 3600.0);

  ExperimentConfig c = small_config();
  c.drive.mode = DriveMode::Shaking;
  c.seed.center = Vec2(0.01, -0.02);
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_digest(back) == config_digest(c));

  ExperimentConfig moved = c;
  moved.output_dir = "elsewhere";
  CHECK(config_digest(moved) == config_digest(c));
  moved.free_tiles = 17;
  CHECK(config_digest(moved) != config_digest(c));

  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"free_tile", 3}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"drive", {{"mode", "orbit"}}}}), ConfigError);

  apply_override(c, "drive.f_mag=0.2");
  apply_override(c, "drive.mode=unicycle");
  CHECK(c.drive.f_mag == 0.2);
  CHECK(c.drive.mode == DriveMode::Unicycle);
  CHECK_THROWS_AS(apply_override(c, "drive.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "=1"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.snapshot_period = 7.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.duration = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.seed.arm_width = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config files with comments load") {
  const auto dir = scratch("cfg");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << "{\n  // desk scale\n  \"free_tiles\": 12, \"reactor\": {\"radius\": 0.2}\n}\n";
  }
  const ExperimentConfig c = load_config((dir / "c.json").string());
  CHECK(c.free_tiles == 12);
  CHECK(c.reactor.radius == 0.2);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("failures carry run context") {
  ExperimentConfig c = small_config();
  c.free_tiles = 2000;  // cannot fit
  try {
    run_experiment(c, 7);
    FAIL("expected PlacementOverflow");
  } catch (const PlacementOverflow& e) {
    CHECK(std::string(e.what()).find("run 7") != std::string::npos);
  }
  c = small_config();
  c.drive.mode = DriveMode::Shaking;
  c.drive.f_mag = 1e4;
  try {
    run_experiment(c, 2);
    FAIL("expected NumericalDivergence");
  } catch (const NumericalDivergence& e) {
    CHECK(std::string(e.what()).find("run 2") != std::string::npos);
  }
  const BatchResult b = run_batch(c, 2, 1, 1);
  CHECK_FALSE(b.ok());
  CHECK(b.failures.size() == 2);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 0.1, -1.0 / 3.0, 6.02e23, 5e-324, 0.03})
    CHECK(parse_double(format_double(v)) == v);
}
