#include "tbsa/analysis.hpp"
#include "tbsa/config.hpp"
#include "tbsa/error.hpp"
#include "tbsa/glue.hpp"
#include "tbsa/harness.hpp"
#include "tbsa/snapshot_io.hpp"
#include "tbsa/stability.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace tbsa;

ExperimentConfig load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
  for (const auto& o : overrides) apply_override(c, o);
  return c;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides,
                 std::optional<std::uint64_t> seed, std::optional<std::string> out) {
  ExperimentConfig c = load_with_overrides(config_path, overrides);
  if (seed) c.rng_seed = *seed;
  const std::filesystem::path dir = out ? *out : c.output_dir;
  const RunResult r = run_experiment_to_dir(c, 0, dir);
  const MetricsRow& last = r.metrics.back();
  std::cout << "wrote " << dir.string() << " (" << r.metrics.size() << " snapshots, digest " << r.digest << ")\n"
            << "final: t=" << last.time << " size=" << last.size << " error_pct=" << last.error_pct
            << " hole_pct=" << last.hole_pct << '\n';
  return 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

int cmd_batch(const std::string& config_path, const std::vector<std::string>& overrides, int runs,
              std::uint64_t seed, int jobs, std::optional<std::string> out, std::optional<std::string> sweep) {
  const ExperimentConfig base = load_with_overrides(config_path, overrides);
  const std::filesystem::path root = out ? *out : base.output_dir;

  std::vector<std::pair<std::string, ExperimentConfig>> grid;
  if (sweep) {
    const auto eq = sweep->find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep expects key=v1,v2,...");
    const std::string key = sweep->substr(0, eq);
    for (const auto& v : split(sweep->substr(eq + 1), ',')) {
      ExperimentConfig c = base;
      apply_override(c, key + "=" + v);
      grid.emplace_back(key + "=" + v, c);
    }
  } else {
    grid.emplace_back("", base);
  }

  bool failed = false;
  for (const auto& [label, c] : grid) {
    const auto dir = label.empty() ? root : root / label;
    const BatchResult b = run_batch(c, runs, seed, jobs, dir);
    const AggregateRow& last = b.aggregate.back();
    std::cout << (label.empty() ? std::string("batch") : label) << ": " << b.runs.size() << "/" << runs
              << " runs, final size " << last.size.mean << " +- " << last.size.stddev << ", error_pct "
              << last.error_pct.mean << ", hole_pct " << last.hole_pct.mean << " -> " << dir.string() << '\n';
    for (const auto& f : b.failures) std::cerr << "run " << f.run_id << " failed: " << f.message << '\n';
    failed = failed || !b.ok();
  }
  return failed ? 1 : 0;
}

int cmd_analyze(const std::vector<std::string>& files, std::optional<std::string> out, double gap_tol,
                double angle_tol_deg) {
  AnalysisOptions opts;
  opts.tolerance.gap = gap_tol;
  opts.tolerance.angle = angle_tol_deg * std::numbers::pi / 180.0;
  std::vector<std::vector<MetricsRow>> all;
  for (const auto& path : files) {
    const SnapshotStream s = read_snapshot_file(path);
    std::vector<MetricsRow> rows;
    for (const Snapshot& snap : s.snapshots) rows.push_back(compute_metrics(snap, s.header, opts));
    if (out) {
      std::filesystem::create_directories(*out);
      std::ofstream f(std::filesystem::path(*out) / ("metrics_" + std::to_string(all.size()) + ".csv"));
      write_metrics_csv(f, rows);
    } else if (files.size() == 1) {
      write_metrics_csv(std::cout, rows);
    }
    all.push_back(std::move(rows));
  }
  if (files.size() > 1 || out) {
    const auto agg = aggregate(all);
    if (out) {
      std::ofstream f(std::filesystem::path(*out) / "aggregate.csv");
      write_aggregate_csv(f, agg);
      write_aggregate_charts(*out, agg, "analysis");
    } else {
      write_aggregate_csv(std::cout, agg);
    }
  }
  return 0;
}

int cmd_stability(double fg, double mt, double accel, bool sweep, double fg_max, double accel_max, int steps) {
  std::cout << "critical_seed_size " << format_double(critical_seed_size(fg, mt, accel)) << '\n';
  std::cout << "harmonic_crossover_size " << format_double(harmonic_crossover_size(fg, mt, accel)) << '\n';
  if (!sweep) return 0;
  std::cout << "glue_force,accel,critical_seed_size,harmonic_crossover_size\n";
  for (int i = 0; i < steps; ++i) {
    const double f = fg + (fg_max - fg) * (steps > 1 ? i / double(steps - 1) : 0.0);
    for (int j = 0; j < steps; ++j) {
      const double a = accel + (accel_max - accel) * (steps > 1 ? j / double(steps - 1) : 0.0);
      std::cout << format_double(f) << ',' << format_double(a) << ',' << format_double(critical_seed_size(f, mt, a))
                << ',' << format_double(harmonic_crossover_size(f, mt, a)) << '\n';
    }
  }
  return 0;
}

int cmd_fit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::vector<MagnetSample> samples;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw Error("expected two columns: distance_cm,force_N");
    try {
      samples.push_back({parse_double(cells[0]), parse_double(cells[1])});
    } catch (const Error&) {
      if (samples.empty()) continue;  // header row
      throw;
    }
  }
  const MagnetFit fit = fit_magnet_params(samples);
  std::cout << "alpha " << format_double(fit.alpha) << "\nbeta " << format_double(fit.beta) << "\nresidual "
            << format_double(fit.residual) << "\niterations " << fit.iterations << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-based simulator and analysis toolkit for tile-based self-assembly"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> out;

  auto* sim = app.add_subcommand("simulate", "Run one experiment");
  sim->add_option("config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sim->add_option("--seed", sim_seed, "RNG seed override");
  sim->add_option("--out", out, "Output directory");
  sim->add_option("--set", overrides, "Override a config key (dotted.key=value)");

  int runs = 1;
  std::uint64_t base_seed = 1;
  int jobs = 1;
  std::optional<std::string> sweep;
  auto* batch = app.add_subcommand("batch", "Run a batch of experiments and aggregate");
  batch->add_option("config", config_path, "JSON config file")->check(CLI::ExistingFile);
  batch->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  batch->add_option("--seed", base_seed, "Base RNG seed");
  batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--out", out, "Output directory");
  batch->add_option("--set", overrides, "Override a config key (dotted.key=value)");
  batch->add_option("--sweep", sweep, "Calibration sweep: key=v1,v2,...");

  std::vector<std::string> files;
  double gap_tol = BondTolerance{}.gap;
  double angle_tol = 15.0;
  auto* analyze = app.add_subcommand("analyze", "Recompute metrics from snapshot streams");
  analyze->add_option("snapshots", files, "Snapshot stream files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", out, "Output directory");
  analyze->add_option("--gap-tol", gap_tol, "Bond gap tolerance (m)");
  analyze->add_option("--angle-tol-deg", angle_tol, "Bond angle tolerance (deg)");

  double fg = 0.0, mt = 0.016, accel = 0.0, fg_max = 0.0, accel_max = 0.0;
  bool do_sweep = false;
  int sweep_steps = 5;
  auto* stab = app.add_subcommand("stability", "Critical seed size under shaking");
  stab->add_option("--fg", fg, "Single glue force (N)")->required();
  stab->add_option("--mt", mt, "Tile mass (kg)");
  stab->add_option("--accel", accel, "Shaking acceleration (m/s^2)")->required();
  stab->add_flag("--sweep", do_sweep, "Print a CSV grid from (fg, accel) to (fg-max, accel-max)");
  stab->add_option("--fg-max", fg_max, "Sweep upper glue force");
  stab->add_option("--accel-max", accel_max, "Sweep upper acceleration");
  stab->add_option("--steps", sweep_steps, "Grid points per axis")->check(CLI::PositiveNumber);

  std::string csv;
  auto* fit = app.add_subcommand("fit-magnet", "Fit alpha, beta to measured magnet forces");
  fit->add_option("csv", csv, "CSV with distance_cm,force_N")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config_path, overrides, sim_seed, out);
    if (*batch) return cmd_batch(config_path, overrides, runs, base_seed, jobs, out, sweep);
    if (*analyze) return cmd_analyze(files, out, gap_tol, angle_tol);
    if (*stab) {
      if (fg_max <= 0.0) fg_max = fg;
      if (accel_max <= 0.0) accel_max = accel;
      return cmd_stability(fg, mt, accel, do_sweep, fg_max, accel_max, sweep_steps);
    }
    if (*fit) return cmd_fit(csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
