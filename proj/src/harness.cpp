#include "tbsa/harness.hpp"

#include "tbsa/error.hpp"
#include "tbsa/snapshot_io.hpp"
#include "tbsa/svg.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace tbsa {

World build_world(const ExperimentConfig& config) {
  config.validate();
  World w;
  w.reactor = config.reactor;
  w.tileset = build_chessboard_tileset();
  w.params = config.physics;
  w.magnets = config.magnets;
  w.drive = config.drive;

  const auto seed = build_cross_seed(config.seed, w.tileset, config.physics.tile_width);
  for (const SeedTile& s : seed) {
    TileState t;
    t.kind_id = s.kind_id;
    t.position = s.position;
    t.orientation = s.orientation;
    t.is_static = true;
    w.tiles.push_back(t);
  }
  Rng rng(config.rng_seed);
  ScatterOptions scatter;
  scatter.tile_width = config.physics.tile_width;
  auto free_tiles = scatter_free_tiles(config.free_tiles, config.reactor, seed, w.tileset, rng, scatter);
  w.tiles.insert(w.tiles.end(), free_tiles.begin(), free_tiles.end());
  return w;
}

StreamHeader stream_header(const ExperimentConfig& config, int run_id) {
  StreamHeader h;
  h.run_id = run_id;
  h.digest = config_digest(config);
  h.version = kVersion;
  h.tile_width = config.physics.tile_width;
  h.lattice = seed_lattice(config.seed, config.physics.tile_width);
  h.tileset = build_chessboard_tileset();
  return h;
}

namespace {

std::string context(const ExperimentConfig& config, int run_id) {
  return "run " + std::to_string(run_id) + " (rng seed " + std::to_string(config.rng_seed) + "): ";
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, int run_id, const RunOptions& options) {
  RunResult result;
  result.run_id = run_id;
  result.rng_seed = config.rng_seed;
  try {
    World world = build_world(config);
    const StreamHeader header = stream_header(config, run_id);
    result.digest = header.digest;
    if (options.snapshot_out) write_stream_header(*options.snapshot_out, header);

    const std::int64_t total = config.total_steps();
    const std::int64_t per_snapshot = config.steps_per_snapshot();
    std::vector<Wrench> drive;
    std::vector<Wrench> glue;
    std::int64_t snapshot_index = 0;
    for (std::int64_t k = 0;; ++k) {
      if (k % per_snapshot == 0) {
        Snapshot snap;
        snap.time = static_cast<double>(snapshot_index++) * config.snapshot_period;
        snap.run_id = run_id;
        snap.digest = header.digest;
        snap.tiles = world.tiles;
        const MetricsRow row = compute_metrics(snap, header, config.analysis);
        result.metrics.push_back(row);
        if (options.snapshot_out) write_snapshot(*options.snapshot_out, snap);
        if (options.on_snapshot) options.on_snapshot(world, row);
        if (options.keep_snapshots) result.snapshots.push_back(std::move(snap));
      }
      if (k == total) break;
      accumulate_drive_forces(world, drive);
      accumulate_glue_forces(world, glue);
      for (std::size_t i = 0; i < drive.size(); ++i) drive[i] += glue[i];
      step(world, drive);
    }
    result.steps = world.step_count;
  } catch (const NumericalDivergence& e) {
    throw NumericalDivergence(context(config, run_id) + e.what());
  } catch (const PlacementOverflow& e) {
    throw PlacementOverflow(context(config, run_id) + e.what());
  }
  return result;
}

namespace {

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config, const nlohmann::json& extra) {
  nlohmann::json m = {{"software", "tbsa"},
                      {"version", kVersion},
                      {"config_digest", config_digest(config)},
                      {"config", to_json(config)}};
  m.update(extra);
  std::ofstream f(path);
  f << m.dump(2) << '\n';
}

void write_metrics_file(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream f(path);
  write_metrics_csv(f, rows);
}

}  // namespace

RunResult run_experiment_to_dir(const ExperimentConfig& config, int run_id, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream stream(dir / "snapshots.tbsa");
  if (!stream) throw Error("cannot write " + (dir / "snapshots.tbsa").string());
  RunOptions opts;
  opts.snapshot_out = &stream;
  RunResult r = run_experiment(config, run_id, opts);
  write_metrics_file(dir / "metrics.csv", r.metrics);
  write_manifest(dir / "manifest.json", config,
                 {{"run_id", run_id}, {"rng_seed", config.rng_seed}, {"steps", r.steps}});
  return r;
}

void write_aggregate_charts(const std::filesystem::path& dir, const std::vector<AggregateRow>& rows,
                            const std::string& label) {
  struct Metric {
    const char* file;
    const char* title;
    const char* axis;
    Stat AggregateRow::*field;
  };
  const Metric metrics[] = {{"size.svg", "Assembly size", "tiles", &AggregateRow::size},
                            {"error_pct.svg", "Errors", "errors [%]", &AggregateRow::error_pct},
                            {"hole_pct.svg", "Holes", "holes [%]", &AggregateRow::hole_pct}};
  for (const Metric& m : metrics) {
    ChartSeries s;
    s.name = label;
    for (const AggregateRow& r : rows) {
      s.x.push_back(r.time);
      s.mean.push_back((r.*m.field).mean);
      s.stddev.push_back((r.*m.field).stddev);
    }
    std::ofstream f(dir / m.file);
    write_svg_chart(f, m.title, m.axis, {s});
  }
}

BatchResult run_batch(const ExperimentConfig& config, int n_runs, std::uint64_t base_seed, int jobs,
                      const std::optional<std::filesystem::path>& out_dir) {
  if (n_runs < 1) throw InvalidArgument("run_batch: need at least one run");
  config.validate();
  jobs = std::clamp(jobs, 1, n_runs);
  if (out_dir) std::filesystem::create_directories(*out_dir);

  std::vector<std::optional<RunResult>> results(static_cast<std::size_t>(n_runs));
  std::vector<std::optional<RunFailure>> failures(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n_runs; k = next++) {
      ExperimentConfig c = config;
      c.rng_seed = base_seed + static_cast<std::uint64_t>(k);
      try {
        if (out_dir) {
          results[static_cast<std::size_t>(k)] =
              run_experiment_to_dir(c, k, *out_dir / ("run_" + std::to_string(k)));
        } else {
          results[static_cast<std::size_t>(k)] = run_experiment(c, k);
        }
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(k)] = RunFailure{k, c.rng_seed, e.what()};
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  BatchResult batch;
  std::vector<std::vector<MetricsRow>> series;
  for (int k = 0; k < n_runs; ++k) {
    auto& r = results[static_cast<std::size_t>(k)];
    auto& f = failures[static_cast<std::size_t>(k)];
    if (f) batch.failures.push_back(*f);
    if (r) {
      series.push_back(r->metrics);
      batch.runs.push_back(std::move(*r));
    }
  }
  if (!series.empty()) batch.aggregate = aggregate(series);

  if (out_dir) {
    {
      std::ofstream f(*out_dir / "aggregate.csv");
      write_aggregate_csv(f, batch.aggregate);
    }
    write_aggregate_charts(*out_dir, batch.aggregate, std::string(to_string(config.drive.mode)));
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& f : batch.failures)
      failed.push_back({{"run_id", f.run_id}, {"rng_seed", f.rng_seed}, {"error", f.message}});
    ExperimentConfig c = config;
    c.rng_seed = base_seed;
    write_manifest(*out_dir / "manifest.json", c,
                   {{"runs", n_runs}, {"base_seed", base_seed}, {"completed", batch.runs.size()}, {"failures", failed}});
  }
  return batch;
}

}  // namespace tbsa
