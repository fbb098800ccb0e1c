#include "tbsa/config.hpp"

#include "tbsa/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace tbsa {

using nlohmann::json;

void ExperimentConfig::validate() const {
  try {
    physics.validate();
    magnets.validate();
    drive.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(reactor.radius > 0.0)) throw ConfigError("reactor.radius must be positive");
  if (reactor.wall_restitution < 0.0 || reactor.wall_restitution > 1.0)
    throw ConfigError("reactor.wall_restitution must lie in [0,1]");
  if (reactor.wall_friction < 0.0) throw ConfigError("reactor.wall_friction must be >= 0");
  if (seed.arm_width < 1 || seed.arm_width > seed.bounding_size)
    throw ConfigError("seed.arm_width must lie in [1, bounding_size]");
  if (free_tiles < 0) throw ConfigError("free_tiles must be >= 0");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(snapshot_period > 0.0)) throw ConfigError("snapshot_period must be positive");
  auto integral = [](double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); };
  if (!integral(duration / snapshot_period))
    throw ConfigError("snapshot_period must divide duration");
  if (!integral(snapshot_period / physics.dt))
    throw ConfigError("physics.dt must divide snapshot_period");
}

std::int64_t ExperimentConfig::total_steps() const { return std::llround(duration / physics.dt); }

std::int64_t ExperimentConfig::steps_per_snapshot() const {
  return std::llround(snapshot_period / physics.dt);
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError("unknown config key " + where + "." + k);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j, {"reactor", "seed", "free_tiles", "drive", "physics", "magnets", "analysis",
                       "duration", "snapshot_period", "rng_seed", "output_dir"},
                   "config");
    if (j.contains("reactor")) {
      const json& r = j.at("reactor");
      reject_unknown(r, {"radius", "wall_restitution", "wall_friction"}, "reactor");
      read(r, "radius", c.reactor.radius);
      read(r, "wall_restitution", c.reactor.wall_restitution);
      read(r, "wall_friction", c.reactor.wall_friction);
    }
    if (j.contains("seed")) {
      const json& s = j.at("seed");
      reject_unknown(s, {"bounding_size", "arm_width", "center"}, "seed");
      read(s, "bounding_size", c.seed.bounding_size);
      read(s, "arm_width", c.seed.arm_width);
      if (s.contains("center")) {
        const auto v = s.at("center").get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError("seed.center must have two entries");
        c.seed.center = Vec2(v[0], v[1]);
      }
    }
    read(j, "free_tiles", c.free_tiles);
    if (j.contains("drive")) {
      const json& d = j.at("drive");
      reject_unknown(d, {"mode", "f_mag", "t_mag", "frequency"}, "drive");
      if (d.contains("mode")) {
        const auto mode = parse_drive_mode(d.at("mode").get<std::string>());
        if (!mode) throw ConfigError("drive.mode must be 'unicycle' or 'shaking'");
        c.drive.mode = *mode;
      }
      read(d, "f_mag", c.drive.f_mag);
      read(d, "t_mag", c.drive.t_mag);
      read(d, "frequency", c.drive.frequency);
    }
    if (j.contains("physics")) {
      const json& p = j.at("physics");
      reject_unknown(p, {"restitution", "friction_tile_tile", "friction_tile_floor", "angular_friction_floor",
                         "tile_mass", "tile_width", "linear_damping", "angular_damping", "dt",
                         "solver_iterations", "max_speed", "contact_margin", "linear_slop", "baumgarte",
                         "restitution_threshold"},
                     "physics");
      auto& q = c.physics;
      read(p, "restitution", q.restitution);
      read(p, "friction_tile_tile", q.friction_tile_tile);
      read(p, "friction_tile_floor", q.friction_tile_floor);
      read(p, "angular_friction_floor", q.angular_friction_floor);
      read(p, "tile_mass", q.tile_mass);
      read(p, "tile_width", q.tile_width);
      read(p, "linear_damping", q.linear_damping);
      read(p, "angular_damping", q.angular_damping);
      read(p, "dt", q.dt);
      read(p, "solver_iterations", q.solver_iterations);
      read(p, "max_speed", q.max_speed);
      read(p, "contact_margin", q.contact_margin);
      read(p, "linear_slop", q.linear_slop);
      read(p, "baumgarte", q.baumgarte);
      read(p, "restitution_threshold", q.restitution_threshold);
    }
    if (j.contains("magnets")) {
      const json& m = j.at("magnets");
      reject_unknown(m, {"alpha", "beta", "inset", "cutoff"}, "magnets");
      read(m, "alpha", c.magnets.alpha);
      read(m, "beta", c.magnets.beta);
      read(m, "inset", c.magnets.inset);
      read(m, "cutoff", c.magnets.cutoff);
    }
    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      reject_unknown(a, {"gap_tol", "angle_tol_deg"}, "analysis");
      read(a, "gap_tol", c.analysis.tolerance.gap);
      if (a.contains("angle_tol_deg"))
        c.analysis.tolerance.angle = a.at("angle_tol_deg").get<double>() * std::numbers::pi / 180.0;
    }
    read(j, "duration", c.duration);
    read(j, "snapshot_period", c.snapshot_period);
    read(j, "rng_seed", c.rng_seed);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& p = c.physics;
  return json{
      {"reactor",
       {{"radius", c.reactor.radius},
        {"wall_restitution", c.reactor.wall_restitution},
        {"wall_friction", c.reactor.wall_friction}}},
      {"seed",
       {{"bounding_size", c.seed.bounding_size},
        {"arm_width", c.seed.arm_width},
        {"center", {c.seed.center.x(), c.seed.center.y()}}}},
      {"free_tiles", c.free_tiles},
      {"drive",
       {{"mode", std::string(to_string(c.drive.mode))},
        {"f_mag", c.drive.f_mag},
        {"t_mag", c.drive.t_mag},
        {"frequency", c.drive.frequency}}},
      {"physics",
       {{"restitution", p.restitution},
        {"friction_tile_tile", p.friction_tile_tile},
        {"friction_tile_floor", p.friction_tile_floor},
        {"angular_friction_floor", p.angular_friction_floor},
        {"tile_mass", p.tile_mass},
        {"tile_width", p.tile_width},
        {"linear_damping", p.linear_damping},
        {"angular_damping", p.angular_damping},
        {"dt", p.dt},
        {"solver_iterations", p.solver_iterations},
        {"max_speed", p.max_speed},
        {"contact_margin", p.contact_margin},
        {"linear_slop", p.linear_slop},
        {"baumgarte", p.baumgarte},
        {"restitution_threshold", p.restitution_threshold}}},
      {"magnets",
       {{"alpha", c.magnets.alpha},
        {"beta", c.magnets.beta},
        {"inset", c.magnets.inset},
        {"cutoff", c.magnets.cutoff}}},
      {"analysis",
       {{"gap_tol", c.analysis.tolerance.gap},
        {"angle_tol_deg", c.analysis.tolerance.angle * 180.0 / std::numbers::pi}}},
      {"duration", c.duration},
      {"snapshot_period", c.snapshot_period},
      {"rng_seed", c.rng_seed},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  std::string pointer = "/" + key;
  for (auto& ch : pointer)
    if (ch == '.') ch = '/';
  json j = to_json(c);
  try {
    const json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw ConfigError("unknown config key " + key);
    j[ptr] = value;
  } catch (const json::exception& e) {
    throw ConfigError("override " + key + ": " + e.what());
  }
  c = config_from_json(j);
}

std::string config_digest(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tbsa
