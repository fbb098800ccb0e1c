#include "tbsa/physics.hpp"

#include "tbsa/error.hpp"
#include "tbsa/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tbsa {

void PhysicsParams::validate() const {
  const double values[] = {restitution, friction_tile_tile, friction_tile_floor,
                           angular_friction_floor, tile_mass, tile_width, linear_damping,
                           angular_damping, contact_margin, linear_slop, baumgarte};
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("physics: parameters must be non-negative");
  if (!(dt > 0.0)) throw InvalidArgument("physics: dt must be positive");
  if (restitution > 1.0) throw InvalidArgument("physics: restitution must lie in [0,1]");
  if (!(tile_mass > 0.0) || !(tile_width > 0.0))
    throw InvalidArgument("physics: tile mass and width must be positive");
  if (solver_iterations < 1) throw InvalidArgument("physics: need at least one solver iteration");
  if (!(max_speed > 0.0)) throw InvalidArgument("physics: max_speed must be positive");
}

double Contact::penetration() const {
  double deepest = 0.0;
  for (int k = 0; k < point_count; ++k) deepest = std::max(deepest, -points[k].separation);
  return deepest;
}

namespace {

struct Frame {
  Vec2 u;  // body x axis
  Vec2 v;  // body y axis
};

Frame frame_of(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {Vec2(c, s), Vec2(-s, c)};
}

// Outward face normals in order +x, +y, -x, -y.
std::array<Vec2, 4> face_normals(const Frame& f) { return {f.u, f.v, -f.u, -f.v}; }

// Largest separation of `other` from any face of `ref`, and that face index.
std::pair<double, int> max_face_separation(const Box& ref, const Frame& fr, const Box& other,
                                           const Frame& fo) {
  const auto normals = face_normals(fr);
  const Vec2 d = other.center - ref.center;
  double best = -1e300;
  int best_k = 0;
  for (int k = 0; k < 4; ++k) {
    const Vec2& n = normals[k];
    const double s = n.dot(d) - ref.half -
                     other.half * (std::abs(n.dot(fo.u)) + std::abs(n.dot(fo.v)));
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  return {best, best_k};
}

}  // namespace

Contact collide_boxes(const Box& a, const Box& b, double margin) {
  Contact out;
  const Frame fa = frame_of(a.angle);
  const Frame fb = frame_of(b.angle);
  const auto [sep_a, face_a] = max_face_separation(a, fa, b, fb);
  if (sep_a > margin) return out;
  const auto [sep_b, face_b] = max_face_separation(b, fb, a, fa);
  if (sep_b > margin) return out;

  // Prefer A as reference unless B's face is clearly better.
  const bool flip = sep_b > sep_a + 1e-7;
  const Box& ref = flip ? b : a;
  const Box& inc = flip ? a : b;
  const Frame& fr = flip ? fb : fa;
  const Frame& fi = flip ? fa : fb;
  const Vec2 n = face_normals(fr)[flip ? face_b : face_a];

  // Incident face: the one most anti-parallel to n.
  const auto inc_normals = face_normals(fi);
  int inc_face = 0;
  double most = 1e300;
  for (int k = 0; k < 4; ++k) {
    const double d = inc_normals[k].dot(n);
    if (d < most) {
      most = d;
      inc_face = k;
    }
  }
  const Vec2 in = inc_normals[inc_face];
  const Vec2 it(-in.y(), in.x());
  const Vec2 face_center = inc.center + inc.half * in;
  std::array<Vec2, 2> seg{face_center + inc.half * it, face_center - inc.half * it};

  // Clip against the reference face's side planes.
  const Vec2 t(-n.y(), n.x());
  const double t0 = t.dot(ref.center);
  auto clip = [&](const Vec2& dir, double offset) -> bool {
    const double d0 = dir.dot(seg[0]) - offset;
    const double d1 = dir.dot(seg[1]) - offset;
    if (d0 > 0.0 && d1 > 0.0) return false;
    if (d0 > 0.0) seg[0] = seg[0] + (d0 / (d0 - d1)) * (seg[1] - seg[0]);
    else if (d1 > 0.0) seg[1] = seg[1] + (d1 / (d1 - d0)) * (seg[0] - seg[1]);
    return true;
  };
  if (!clip(t, t0 + ref.half)) return out;
  if (!clip(-t, -t0 + ref.half)) return out;

  const double face_offset = n.dot(ref.center) + ref.half;
  for (const Vec2& p : seg) {
    const double s = n.dot(p) - face_offset;
    if (s > margin) continue;
    out.points[out.point_count++] = {p - 0.5 * s * n, s};
  }
  out.normal = flip ? Vec2(-n) : n;
  return out;
}

Contact collide_wall(const Box& box, double radius, double margin) {
  Contact out;
  const Frame f = frame_of(box.angle);
  std::array<std::pair<double, Vec2>, 4> corners;
  int k = 0;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      const Vec2 c = box.center + box.half * (sx * f.u + sy * f.v);
      corners[k++] = {radius - c.norm(), c};
    }
  std::sort(corners.begin(), corners.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  Vec2 dir = Vec2::Zero();
  for (int i = 0; i < 2; ++i) {
    const auto& [sep, c] = corners[i];
    if (sep >= margin) break;
    const double len = c.norm();
    const Vec2 radial = len > 0.0 ? Vec2(c / len) : Vec2(1.0, 0.0);
    out.points[out.point_count++] = {c + 0.5 * sep * radial, sep};
    dir += radial;
  }
  if (out.point_count > 0) out.normal = dir.normalized();
  return out;
}

void SpatialHash::build(std::span<const Vec2> positions, double cell_size) {
  if (!(cell_size > 0.0)) throw InvalidArgument("spatial hash: cell size must be positive");
  cell_size_ = cell_size;
  cell_of_.assign(positions.size(), 0);
  sorted_.assign(positions.size(), 0);
  if (positions.empty()) {
    width_ = height_ = 1;
    start_.assign(2, 0);
    return;
  }
  std::vector<std::array<std::int64_t, 2>> coords(positions.size());
  std::int64_t max_x = 0, max_y = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!positions[i].allFinite()) throw InvalidArgument("spatial hash: non-finite position");
    coords[i] = {static_cast<std::int64_t>(std::floor(positions[i].x() / cell_size)),
                 static_cast<std::int64_t>(std::floor(positions[i].y() / cell_size))};
    if (i == 0) {
      min_x_ = max_x = coords[i][0];
      min_y_ = max_y = coords[i][1];
    }
    min_x_ = std::min(min_x_, coords[i][0]);
    min_y_ = std::min(min_y_, coords[i][1]);
    max_x = std::max(max_x, coords[i][0]);
    max_y = std::max(max_y, coords[i][1]);
  }
  width_ = max_x - min_x_ + 1;
  height_ = max_y - min_y_ + 1;
  if (width_ * height_ > (std::int64_t{1} << 26))
    throw InvalidArgument("spatial hash: point spread too large for the cell size");

  // Counting sort by cell; points keep index order inside a cell.
  start_.assign(static_cast<std::size_t>(width_ * height_ + 1), 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    cell_of_[i] = (coords[i][1] - min_y_) * width_ + (coords[i][0] - min_x_);
    ++start_[static_cast<std::size_t>(cell_of_[i]) + 1];
  }
  for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < positions.size(); ++i)
    sorted_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of_[i])]++)] = static_cast<int>(i);
}

namespace {

Box box_of(const TileState& t, double half) { return {t.position, t.orientation, half}; }

// Speculative distance for the wall: how far a corner may travel in one step.
double wall_margin(const TileState& t, const PhysicsParams& p) {
  return p.contact_margin +
         p.dt * (t.linear_velocity.norm() + std::abs(t.angular_velocity) * p.half_diagonal());
}

}  // namespace

std::vector<Contact> detect_contacts(const World& world) {
  const auto& p = world.params;
  const auto& tiles = world.tiles;
  const double half = p.half_width();
  std::vector<Contact> contacts;

  std::vector<Vec2> centers;
  centers.reserve(tiles.size());
  for (const auto& t : tiles) centers.push_back(t.position);
  SpatialHash hash;
  hash.build(centers, 2.0 * p.half_diagonal() + p.contact_margin);
  hash.for_each_pair([&](int i, int j) {
    const TileState& ti = tiles[static_cast<std::size_t>(i)];
    const TileState& tj = tiles[static_cast<std::size_t>(j)];
    if (ti.is_static && tj.is_static) return;
    Contact c = collide_boxes(box_of(ti, half), box_of(tj, half), p.contact_margin);
    if (c.point_count == 0) return;
    c.a = i;
    c.b = j;
    contacts.push_back(c);
  });
  // Deterministic order independent of hash layout.
  std::sort(contacts.begin(), contacts.end(), [](const Contact& l, const Contact& r) {
    return l.a != r.a ? l.a < r.a : l.b < r.b;
  });

  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const TileState& t = tiles[i];
    if (t.is_static) continue;
    const double margin = wall_margin(t, p);
    // No corner can reach the wall band.
    if (t.position.norm() + p.half_diagonal() < world.reactor.radius - margin) continue;
    Contact c = collide_wall(box_of(t, half), world.reactor.radius, margin);
    if (c.point_count == 0) continue;
    c.a = static_cast<int>(i);
    c.b = Contact::kWall;
    contacts.push_back(c);
  }
  return contacts;
}

namespace {

struct Body {
  Vec2 v = Vec2::Zero();
  double w = 0.0;
  Vec2 pv = Vec2::Zero();  // pseudo velocity for position correction
  double pw = 0.0;
  double inv_mass = 0.0;
  double inv_inertia = 0.0;
};

struct SolverPoint {
  Vec2 ra = Vec2::Zero();
  Vec2 rb = Vec2::Zero();
  double normal_mass = 0.0;
  double tangent_mass = 0.0;
  double target = 0.0;  // minimum normal velocity
  double bias = 0.0;    // pseudo velocity target
  double pn = 0.0;
  double pt = 0.0;
  double pp = 0.0;
};

struct SolverContact {
  int a = 0;
  int b = Contact::kWall;
  Vec2 n = Vec2::Zero();
  double friction = 0.0;
  int count = 0;
  std::array<SolverPoint, 2> pts{};
};

Body& body_or(std::vector<Body>& bodies, Body& wall, int idx) {
  return idx == Contact::kWall ? wall : bodies[static_cast<std::size_t>(idx)];
}

double effective_mass(const Body& a, const Body& b, const Vec2& ra, const Vec2& rb,
                      const Vec2& dir) {
  const double rna = cross2(ra, dir);
  const double rnb = cross2(rb, dir);
  const double k =
      a.inv_mass + b.inv_mass + a.inv_inertia * rna * rna + b.inv_inertia * rnb * rnb;
  return k > 0.0 ? 1.0 / k : 0.0;
}

Vec2 relative_velocity(const Body& a, const Body& b, const Vec2& ra, const Vec2& rb) {
  return b.v + angular_cross(b.w, rb) - a.v - angular_cross(a.w, ra);
}

void apply(Body& a, Body& b, const Vec2& ra, const Vec2& rb, const Vec2& impulse) {
  a.v -= a.inv_mass * impulse;
  a.w -= a.inv_inertia * cross2(ra, impulse);
  b.v += b.inv_mass * impulse;
  b.w += b.inv_inertia * cross2(rb, impulse);
}

void apply_pseudo(Body& a, Body& b, const Vec2& ra, const Vec2& rb, const Vec2& impulse) {
  a.pv -= a.inv_mass * impulse;
  a.pw -= a.inv_inertia * cross2(ra, impulse);
  b.pv += b.inv_mass * impulse;
  b.pw += b.inv_inertia * cross2(rb, impulse);
}

// Removes up to `max_delta` of speed without reversing direction.
Vec2 coulomb_decay(const Vec2& v, double max_delta) {
  const double speed = v.norm();
  if (speed <= max_delta) return Vec2::Zero();
  return v * ((speed - max_delta) / speed);
}

double coulomb_decay(double w, double max_delta) {
  if (std::abs(w) <= max_delta) return 0.0;
  return w > 0.0 ? w - max_delta : w + max_delta;
}

}  // namespace

void step(World& world, std::span<const Wrench> external) {
  const PhysicsParams& p = world.params;
  auto& tiles = world.tiles;
  const std::size_t n = tiles.size();
  if (!external.empty() && external.size() != n)
    throw InvalidArgument("step: one wrench per tile expected");
  const double dt = p.dt;
  const double inertia = p.inertia();

  std::vector<Body> bodies(n);
  const double lin_decay = std::exp(-p.linear_damping * dt);
  const double ang_decay = std::exp(-p.angular_damping * dt);
  const double floor_dv = p.friction_tile_floor * kGravity * dt;
  const double floor_dw = p.angular_friction_floor * p.tile_mass * kGravity *
                          kSquareMeanRadius * p.tile_width * dt / inertia;

  for (std::size_t i = 0; i < n; ++i) {
    TileState& t = tiles[i];
    Body& b = bodies[i];
    if (t.is_static) {
      t.linear_velocity.setZero();
      t.angular_velocity = 0.0;
      continue;
    }
    b.inv_mass = 1.0 / p.tile_mass;
    b.inv_inertia = 1.0 / inertia;
    b.v = t.linear_velocity;
    b.w = t.angular_velocity;
    if (!external.empty()) {
      const Wrench& f = external[i];
      if (!f.force.allFinite() || !std::isfinite(f.torque))
        throw InvalidArgument("step: non-finite external force on tile " + std::to_string(i));
      b.v += dt * b.inv_mass * f.force;
      b.w += dt * b.inv_inertia * f.torque;
    }
    b.v = coulomb_decay(Vec2(b.v * lin_decay), floor_dv);
    b.w = coulomb_decay(b.w * ang_decay, floor_dw);
  }

  const std::vector<Contact> contacts = detect_contacts(world);
  Body wall;
  std::vector<SolverContact> solver;
  solver.reserve(contacts.size());
  for (const Contact& c : contacts) {
    SolverContact sc;
    sc.a = c.a;
    sc.b = c.b;
    sc.n = c.normal;
    sc.count = c.point_count;
    sc.friction = c.is_wall() ? world.reactor.wall_friction : p.friction_tile_tile;
    const double e = c.is_wall() ? world.reactor.wall_restitution : p.restitution;
    Body& ba = body_or(bodies, wall, c.a);
    Body& bb = body_or(bodies, wall, c.b);
    const Vec2 ca = tiles[static_cast<std::size_t>(c.a)].position;
    const Vec2 cb = c.is_wall() ? c.points[0].position : tiles[static_cast<std::size_t>(c.b)].position;
    const Vec2 tangent(-c.normal.y(), c.normal.x());
    for (int k = 0; k < c.point_count; ++k) {
      SolverPoint& sp = sc.pts[k];
      const ContactPoint& cp = c.points[k];
      sp.ra = cp.position - ca;
      sp.rb = c.is_wall() ? Vec2::Zero() : Vec2(cp.position - cb);
      sp.normal_mass = effective_mass(ba, bb, sp.ra, sp.rb, c.normal);
      sp.tangent_mass = effective_mass(ba, bb, sp.ra, sp.rb, tangent);
      const double vn = relative_velocity(ba, bb, sp.ra, sp.rb).dot(c.normal);
      if (cp.separation > 0.0) {
        sp.target = -cp.separation / dt;
      } else {
        sp.target = vn < -p.restitution_threshold ? -e * vn : 0.0;
        sp.bias = p.baumgarte / dt * std::max(-cp.separation - p.linear_slop, 0.0);
      }
    }
    solver.push_back(sc);
  }

  for (int it = 0; it < p.solver_iterations; ++it) {
    for (SolverContact& sc : solver) {
      Body& ba = body_or(bodies, wall, sc.a);
      Body& bb = body_or(bodies, wall, sc.b);
      const Vec2 tangent(-sc.n.y(), sc.n.x());
      for (int k = 0; k < sc.count; ++k) {
        SolverPoint& sp = sc.pts[k];
        const double vt = relative_velocity(ba, bb, sp.ra, sp.rb).dot(tangent);
        const double limit = sc.friction * sp.pn;
        const double pt = std::clamp(sp.pt - sp.tangent_mass * vt, -limit, limit);
        apply(ba, bb, sp.ra, sp.rb, (pt - sp.pt) * tangent);
        sp.pt = pt;
      }
      for (int k = 0; k < sc.count; ++k) {
        SolverPoint& sp = sc.pts[k];
        const double vn = relative_velocity(ba, bb, sp.ra, sp.rb).dot(sc.n);
        const double pn = std::max(sp.pn + sp.normal_mass * (sp.target - vn), 0.0);
        apply(ba, bb, sp.ra, sp.rb, (pn - sp.pn) * sc.n);
        sp.pn = pn;
      }
    }
  }

  // Split-impulse position correction: pseudo velocities move bodies apart
  // without entering the momentum state.
  for (int it = 0; it < p.solver_iterations; ++it) {
    for (SolverContact& sc : solver) {
      Body& ba = body_or(bodies, wall, sc.a);
      Body& bb = body_or(bodies, wall, sc.b);
      for (int k = 0; k < sc.count; ++k) {
        SolverPoint& sp = sc.pts[k];
        if (sp.bias <= 0.0) continue;
        const Vec2 dv = bb.pv + angular_cross(bb.pw, sp.rb) - ba.pv - angular_cross(ba.pw, sp.ra);
        const double pp = std::max(sp.pp + sp.normal_mass * (sp.bias - dv.dot(sc.n)), 0.0);
        apply_pseudo(ba, bb, sp.ra, sp.rb, (pp - sp.pp) * sc.n);
        sp.pp = pp;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Body& b = bodies[i];
    if (tiles[i].is_static) continue;
    if (!b.v.allFinite() || !std::isfinite(b.w) || b.v.norm() > p.max_speed ||
        std::abs(b.w) * p.half_diagonal() > p.max_speed)
      throw NumericalDivergence("step " + std::to_string(world.step_count) + ": tile " +
                                std::to_string(i) + " exceeded the speed cap");
  }

  const double radius = world.reactor.radius;
  const double half = p.half_width();
  for (std::size_t i = 0; i < n; ++i) {
    TileState& t = tiles[i];
    if (t.is_static) continue;
    const Body& b = bodies[i];
    t.linear_velocity = b.v;
    t.angular_velocity = b.w;
    t.position += dt * (b.v + b.pv);
    t.orientation = wrap_angle(t.orientation + dt * (b.w + b.pw));

    // Hard containment for anything the speculative wall contact missed.
    if (t.position.norm() + p.half_diagonal() < radius) continue;
    const Contact wc = collide_wall(box_of(t, half), radius, 0.0);
    if (wc.point_count > 0 && wc.penetration() > half) {
      const double excess = wc.penetration();
      t.position -= excess * wc.normal;
      const double outward = t.linear_velocity.dot(wc.normal);
      if (outward > 0.0) t.linear_velocity -= outward * wc.normal;
    }
  }
  ++world.step_count;
}

double kinetic_energy(const World& world) {
  const double m = world.params.tile_mass;
  const double inertia = world.params.inertia();
  double e = 0.0;
  for (const auto& t : world.tiles) {
    if (t.is_static) continue;
    e += 0.5 * m * t.linear_velocity.squaredNorm() + 0.5 * inertia * t.angular_velocity * t.angular_velocity;
  }
  return e;
}

Vec2 linear_momentum(const World& world) {
  Vec2 sum = Vec2::Zero();
  for (const auto& t : world.tiles)
    if (!t.is_static) sum += world.params.tile_mass * t.linear_velocity;
  return sum;
}

}  // namespace tbsa
