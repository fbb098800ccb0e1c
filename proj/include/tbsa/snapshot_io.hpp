#pragma once

#include "tbsa/analysis.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tbsa {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

// Snapshot stream layout (line oriented, whitespace separated):
//
//   tbsa-snapshots 1
//   version <string>
//   run <id>
//   digest <hex>
//   tile_width <m>
//   lattice <origin x> <origin y> <spacing>
//   kinds <count>
//   kind <id> <family> <color> <N> <E> <S> <W> <a> <b> <omega>     (x count)
//   snapshot <time> <tile count>                                    (repeated)
//   <kind> <x> <y> <phi> <vx> <vy> <omega> <static 0|1>             (x tile count)
//   end
void write_stream_header(std::ostream& os, const StreamHeader& header);
void write_snapshot(std::ostream& os, const Snapshot& snapshot);

struct SnapshotStream {
  StreamHeader header;
  std::vector<Snapshot> snapshots;
};

// Throws Error on malformed input.
SnapshotStream read_snapshot_stream(std::istream& is);
SnapshotStream read_snapshot_file(const std::string& path);

// time,size,size_free,error_pct,hole_pct,errors,holes,snap_conflicts
void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows);

// time,runs,<metric>_mean,<metric>_std for size,size_free,error_pct,hole_pct
void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& is);

}  // namespace tbsa
