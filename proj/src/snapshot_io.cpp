#include "tbsa/snapshot_io.hpp"

#include "tbsa/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tbsa {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("expected a number, got '" + std::string(s) + "'");
  return v;
}

void write_stream_header(std::ostream& os, const StreamHeader& h) {
  os << "tbsa-snapshots 1\n";
  os << "version " << h.version << '\n';
  os << "run " << h.run_id << '\n';
  os << "digest " << h.digest << '\n';
  os << "tile_width " << format_double(h.tile_width) << '\n';
  os << "lattice " << format_double(h.lattice.origin.x()) << ' ' << format_double(h.lattice.origin.y())
     << ' ' << format_double(h.lattice.spacing) << '\n';
  os << "kinds " << h.tileset.kinds.size() << '\n';
  for (const TileKind& k : h.tileset.kinds) {
    os << "kind " << k.id << ' ' << to_string(k.family) << ' ' << to_string(k.color);
    for (GlueLabel g : k.glues) os << ' ' << g.value();
    os << ' ' << format_double(k.drive.a) << ' ' << format_double(k.drive.b) << ' '
       << format_double(k.drive.omega) << '\n';
  }
}

void write_snapshot(std::ostream& os, const Snapshot& s) {
  os << "snapshot " << format_double(s.time) << ' ' << s.tiles.size() << '\n';
  for (const TileState& t : s.tiles) {
    os << t.kind_id << ' ' << format_double(t.position.x()) << ' ' << format_double(t.position.y()) << ' '
       << format_double(t.orientation) << ' ' << format_double(t.linear_velocity.x()) << ' '
       << format_double(t.linear_velocity.y()) << ' ' << format_double(t.angular_velocity) << ' '
       << (t.is_static ? 1 : 0) << '\n';
  }
  os << "end\n";
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty line split into tokens; empty at end of input.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("snapshot stream line " + std::to_string(line_no_) + ": " + what);
  }

  std::vector<std::string> expect(std::string_view keyword, std::size_t arity) {
    auto tok = next();
    if (tok.empty() || tok[0] != keyword || tok.size() != arity + 1)
      fail("expected '" + std::string(keyword) + "' with " + std::to_string(arity) + " fields");
    return tok;
  }

  double num(const std::string& s) const {
    try {
      return parse_double(s);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  int integer(const std::string& s) const {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("expected an integer, got '" + s + "'");
    return v;
  }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

}  // namespace

SnapshotStream read_snapshot_stream(std::istream& is) {
  LineReader in(is);
  SnapshotStream out;
  StreamHeader& h = out.header;
  auto magic = in.expect("tbsa-snapshots", 1);
  if (magic[1] != "1") in.fail("unsupported stream version " + magic[1]);
  h.version = in.expect("version", 1)[1];
  h.run_id = in.integer(in.expect("run", 1)[1]);
  h.digest = in.expect("digest", 1)[1];
  h.tile_width = in.num(in.expect("tile_width", 1)[1]);
  auto lat = in.expect("lattice", 3);
  h.lattice = {Vec2(in.num(lat[1]), in.num(lat[2])), in.num(lat[3])};
  const int kinds = in.integer(in.expect("kinds", 1)[1]);
  for (int k = 0; k < kinds; ++k) {
    auto tok = in.expect("kind", 10);
    TileKind kind;
    kind.id = in.integer(tok[1]);
    if (kind.id != k) in.fail("kind ids must be dense and ordered");
    const auto fam = parse_family(tok[2]);
    const auto col = parse_color(tok[3]);
    if (!fam || !col) in.fail("bad family or color");
    kind.family = *fam;
    kind.color = *col;
    for (int e = 0; e < 4; ++e) kind.glues[static_cast<std::size_t>(e)] = GlueLabel(in.integer(tok[4 + static_cast<std::size_t>(e)]));
    kind.drive = {in.num(tok[8]), in.num(tok[9]), in.num(tok[10])};
    h.tileset.kinds.push_back(kind);
  }

  for (auto tok = in.next(); !tok.empty(); tok = in.next()) {
    if (tok[0] != "snapshot" || tok.size() != 3) in.fail("expected 'snapshot <time> <count>'");
    Snapshot s;
    s.time = in.num(tok[1]);
    s.run_id = h.run_id;
    s.digest = h.digest;
    const int count = in.integer(tok[2]);
    s.tiles.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      auto t = in.next();
      if (t.size() != 8) in.fail("tile line needs 8 fields");
      TileState st;
      st.kind_id = in.integer(t[0]);
      if (st.kind_id < 0 || st.kind_id >= kinds) in.fail("unknown kind id");
      st.position = Vec2(in.num(t[1]), in.num(t[2]));
      st.orientation = in.num(t[3]);
      st.linear_velocity = Vec2(in.num(t[4]), in.num(t[5]));
      st.angular_velocity = in.num(t[6]);
      st.is_static = in.integer(t[7]) != 0;
      s.tiles.push_back(st);
    }
    auto end = in.next();
    if (end.size() != 1 || end[0] != "end") in.fail("expected 'end'");
    out.snapshots.push_back(std::move(s));
  }
  return out;
}

SnapshotStream read_snapshot_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_snapshot_stream(f);
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows) {
  os << "time,size,size_free,error_pct,hole_pct,errors,holes,snap_conflicts\n";
  for (const MetricsRow& r : rows)
    os << format_double(r.time) << ',' << r.size << ',' << r.size_free << ',' << format_double(r.error_pct)
       << ',' << format_double(r.hole_pct) << ',' << r.errors << ',' << r.holes << ',' << r.snap_conflicts
       << '\n';
}

void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows) {
  os << "time,runs,size_mean,size_std,size_free_mean,size_free_std,error_pct_mean,error_pct_std,"
        "hole_pct_mean,hole_pct_std\n";
  for (const AggregateRow& r : rows) {
    os << format_double(r.time) << ',' << r.runs;
    for (const Stat& s : {r.size, r.size_free, r.error_pct, r.hole_pct})
      os << ',' << format_double(s.mean) << ',' << format_double(s.stddev);
    os << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& is) {
  std::vector<AggregateRow> out;
  std::string line;
  if (!std::getline(is, line)) throw Error("aggregate csv: empty input");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw Error("aggregate csv: expected 10 columns");
    AggregateRow r;
    r.time = parse_double(f[0]);
    r.runs = static_cast<int>(parse_double(f[1]));
    Stat* stats[] = {&r.size, &r.size_free, &r.error_pct, &r.hole_pct};
    for (std::size_t k = 0; k < 4; ++k) *stats[k] = {parse_double(f[2 + 2 * k]), parse_double(f[3 + 2 * k])};
    out.push_back(r);
  }
  return out;
}

}  // namespace tbsa
