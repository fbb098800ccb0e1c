#pragma once

#include "tbsa/analysis.hpp"
#include "tbsa/config.hpp"
#include "tbsa/world.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tbsa {

inline constexpr const char* kVersion = "0.1.0";

// Seed tiles first (static), then the scattered free tiles.
World build_world(const ExperimentConfig& config);

StreamHeader stream_header(const ExperimentConfig& config, int run_id);

struct RunOptions {
  std::ostream* snapshot_out = nullptr;  // receives the snapshot stream
  bool keep_snapshots = false;
  // Called at every snapshot instant with the live world.
  std::function<void(const World&, const MetricsRow&)> on_snapshot;
};

struct RunResult {
  int run_id = 0;
  std::uint64_t rng_seed = 0;
  std::string digest;
  std::vector<MetricsRow> metrics;
  std::vector<Snapshot> snapshots;  // only with keep_snapshots
  std::int64_t steps = 0;
};

// Drive forces, glue forces, physics step, repeated for config.duration;
// a snapshot (and metrics row) every snapshot_period including t = 0.
// NumericalDivergence and PlacementOverflow propagate with run context.
RunResult run_experiment(const ExperimentConfig& config, int run_id = 0, const RunOptions& options = {});

// Writes snapshots.tbsa, metrics.csv and manifest.json into `dir`.
RunResult run_experiment_to_dir(const ExperimentConfig& config, int run_id, const std::filesystem::path& dir);

struct RunFailure {
  int run_id = 0;
  std::uint64_t rng_seed = 0;
  std::string message;
};

struct BatchResult {
  std::vector<RunResult> runs;  // completed runs, ordered by run id
  std::vector<RunFailure> failures;
  std::vector<AggregateRow> aggregate;

  bool ok() const { return failures.empty(); }
};

// Runs n_runs experiments with seeds base_seed + k on up to `jobs` threads.
// With an output directory: run_<k>/ per run plus aggregate.csv, the three
// metric charts and manifest.json.
BatchResult run_batch(const ExperimentConfig& config, int n_runs, std::uint64_t base_seed, int jobs,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_aggregate_charts(const std::filesystem::path& dir, const std::vector<AggregateRow>& rows,
                            const std::string& label);

}  // namespace tbsa
