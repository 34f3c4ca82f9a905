#include "flux/classical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace flux {
namespace {

constexpr double kEventTol = 1e-13;

/// Exact motion over time tau in a uniform field B (straight line for B = 0).
/// The rotation runs in extended precision: the rounded result then carries
/// no systematic speed bias, so long runs hold |v| to ~1e-12.
ClassicalState propagate_uniform(const ClassicalState& s, double B, double tau,
                                 const PhysicalParams& p) {
  ClassicalState out = s;
  const double vx = s.px / p.m, vy = s.py / p.m;
  if (B == 0.0) {
    out.x = s.x + vx * tau;
    out.y = s.y + vy * tau;
    return out;
  }
  const long double w = static_cast<long double>(p.q) * B / p.m;
  const long double angle = w * static_cast<long double>(tau);
  const long double c = cosl(angle), sn = sinl(angle);
  const long double lvx = vx, lvy = vy;
  out.x = static_cast<double>(s.x + (lvx * sn - lvy * c + lvy) / w);
  out.y = static_cast<double>(s.y + (lvy * sn + lvx * c - lvx) / w);
  out.px = static_cast<double>(p.m * (lvx * c + lvy * sn));
  out.py = static_cast<double>(p.m * (-lvx * sn + lvy * c));
  return out;
}

/// Kick-or-reflect bookkeeping at a widthless wall. `direction` is the sign
/// of vx at the crossing. Returns the post-event state at the wall plane.
ClassicalState apply_wall_event(const ClassicalState& s, const KickWall& wall, int direction,
                                const PhysicalParams& p, bool* crossed) {
  ClassicalState out = s;
  const double kick = -direction * p.q * wall.phi_B;
  const double py_after = s.py + kick;
  const double p2 = s.px * s.px + s.py * s.py;
  if (py_after * py_after <= p2) {
    out.py = py_after;
    out.px = direction * std::sqrt(std::max(0.0, p2 - py_after * py_after));
    *crossed = true;
  } else {
    out.px = -s.px;  // reflected; py untouched
    *crossed = false;
  }
  // Move a few ulps off the plane in the outgoing direction so the detector
  // re-arms cleanly. A grazing exit (px = 0) stays on the plane.
  const double dir_out = out.px > 0.0 ? 1.0 : (out.px < 0.0 ? -1.0 : 0.0);
  out.x = wall.x0 + dir_out * 4e-16 * std::max(1.0, std::abs(wall.x0));
  return out;
}

struct Segment {
  const FieldRegion* region = nullptr;  // nullptr = field-free background
  double B() const { return region ? region->B : 0.0; }
};

}  // namespace

double ClassicalState::speed(const PhysicalParams& p) const {
  return std::hypot(px, py) / p.m;
}

void FieldRegionSet::validate() const {
  for (size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    if (!(r.x1 > r.x0) || !(r.y1 > r.y0))
      throw std::invalid_argument("FieldRegion: empty rectangle");
    for (size_t j = i + 1; j < regions.size(); ++j) {
      const auto& s = regions[j];
      const bool disjoint = r.x1 <= s.x0 || s.x1 <= r.x0 || r.y1 <= s.y0 || s.y1 <= r.y0;
      if (!disjoint) throw std::invalid_argument("FieldRegionSet: regions overlap");
    }
  }
}

const FieldRegion* FieldRegionSet::locate(double x, double y) const {
  for (const auto& r : regions)
    if (r.contains(x, y)) return &r;
  return nullptr;
}

void Trajectory::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "t,x,y,px,py\n";
  for (const auto& pt : points)
    out << pt.t << ',' << pt.state.x << ',' << pt.state.y << ',' << pt.state.px << ','
        << pt.state.py << '\n';
}

ClassicalState step_charge(const ClassicalState& state, const FieldRegionSet& fields, double dt,
                           const PhysicalParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_charge: dt must be > 0");
  params.validate();

  double min_width = std::numeric_limits<double>::infinity();
  for (const auto& r : fields.regions) min_width = std::min({min_width, r.x1 - r.x0, r.y1 - r.y0});

  ClassicalState cur = state;
  double remaining = dt;
  int guard = 0;
  while (remaining > kEventTol * dt) {
    if (++guard > 100000) throw std::runtime_error("step_charge: event resolution stalled");
    Segment seg{fields.locate(cur.x, cur.y)};
    const double speed = cur.speed(params);

    double h = remaining;
    if (speed > 0.0 && std::isfinite(min_width)) h = std::min(h, 0.4 * min_width / speed);
    if (seg.B() != 0.0) {
      const double period = 2.0 * std::numbers::pi * params.m / std::abs(params.q * seg.B());
      h = std::min(h, 0.05 * period);
    }

    // Arm wall detectors only when we are not sitting exactly on the plane
    // (which only happens for a grazing exit).
    std::vector<const KickWall*> armed;
    for (const auto& w : fields.walls)
      if (cur.x != w.x0) armed.push_back(&w);

    auto changed = [&](const ClassicalState& probe) -> const KickWall* {
      for (const KickWall* w : armed)
        if ((cur.x - w->x0) * (probe.x - w->x0) <= 0.0) return w;
      return nullptr;
    };
    auto region_changed = [&](const ClassicalState& probe) {
      return fields.locate(probe.x, probe.y) != seg.region;
    };

    // Scan sub-slices for the first event, then bisect inside it. The wall
    // identity is taken from the decisive slice-end probe; the converged
    // point itself can sit exactly on the plane.
    const int slices = 16;
    double event_t = -1.0;
    const KickWall* event_wall = nullptr;
    for (int s = 1; s <= slices; ++s) {
      const double t1 = h * s / slices;
      ClassicalState probe = propagate_uniform(cur, seg.B(), t1, params);
      const KickWall* w = changed(probe);
      if (w || region_changed(probe)) {
        double lo = h * (s - 1) / slices, hi = t1;
        for (int it = 0; it < 60 && (hi - lo) > kEventTol * h; ++it) {
          const double mid = 0.5 * (lo + hi);
          ClassicalState pm = propagate_uniform(cur, seg.B(), mid, params);
          if (changed(pm) || region_changed(pm)) hi = mid; else lo = mid;
        }
        event_t = hi;
        event_wall = w;
        break;
      }
    }

    if (event_t < 0.0) {
      cur = propagate_uniform(cur, seg.B(), h, params);
      remaining -= h;
      continue;
    }

    if (event_wall) {
      ClassicalState at_event = propagate_uniform(cur, seg.B(), event_t, params);
      remaining -= event_t;
      bool crossed = false;
      const int direction = at_event.px > 0.0 ? 1 : -1;
      at_event.x = event_wall->x0;
      cur = apply_wall_event(at_event, *event_wall, direction, params, &crossed);
    } else {
      // Step a hair past the boundary so the next pass starts with the new
      // region's propagator instead of stalling on the edge.
      const double t_adv = std::min(event_t + 1e-9 * h, h);
      cur = propagate_uniform(cur, seg.B(), t_adv, params);
      remaining -= t_adv;
    }
  }
  return cur;
}

double larmor_radius(double v, double phi_B, double w, const PhysicalParams& params) {
  if (phi_B == 0.0) throw std::domain_error("larmor_radius: unbounded for phi_B = 0");
  (void)w;
  return params.m * std::abs(v) * w / std::abs(params.q * phi_B);
}

bool reflects_normal(double px, double phi_B, const PhysicalParams& params) {
  return px < std::abs(params.q * phi_B);
}

bool reflects_any_angle(double px, double py, double phi_B, const PhysicalParams& params) {
  return std::hypot(px, py) < 0.5 * std::abs(params.q * phi_B);
}

double wall_crossing_kick(double phi_B, const PhysicalParams& params) {
  return -params.q * phi_B;
}

CavityRun simulate_cavity(double L_cav, double separation, double phi_B,
                          const ClassicalState& initial, double t_max,
                          const PhysicalParams& params, double sample_dt) {
  if (!(L_cav > 0.0) || !(separation > 0.0))
    throw std::invalid_argument("simulate_cavity: geometry must be positive");
  const double xw = 0.5 * separation, yw = 0.5 * L_cav;
  if (std::abs(initial.x) >= xw || std::abs(initial.y) >= yw)
    throw std::invalid_argument("simulate_cavity: initial state outside the inter-wall region");

  CavityRun run;
  ClassicalState s = initial;
  double t = 0.0;
  double next_sample = 0.0;
  auto record = [&](double tt, const ClassicalState& st) { run.trajectory.points.push_back({tt, st}); };
  record(t, s);

  const KickWall left{-xw, phi_B}, right{xw, phi_B};
  bool escaped = false;
  int guard = 0;
  while (t < t_max && !escaped) {
    if (++guard > 2000000) break;
    const double vx = s.px / params.m, vy = s.py / params.m;
    if (vx == 0.0 && vy == 0.0) { t = t_max; break; }

    // Earliest event among the two field walls and the specular side walls.
    double te = std::numeric_limits<double>::infinity();
    enum class Ev { None, WallL, WallR, SideLo, SideHi } ev = Ev::None;
    if (vx > 0.0) { const double c = (xw - s.x) / vx; if (c < te) { te = c; ev = Ev::WallR; } }
    if (vx < 0.0) { const double c = (-xw - s.x) / vx; if (c < te) { te = c; ev = Ev::WallL; } }
    if (vy > 0.0) { const double c = (yw - s.y) / vy; if (c < te) { te = c; ev = Ev::SideHi; } }
    if (vy < 0.0) { const double c = (-yw - s.y) / vy; if (c < te) { te = c; ev = Ev::SideLo; } }
    if (!std::isfinite(te)) { t = t_max; break; }

    const double t_event = t + te;
    if (sample_dt > 0.0) {
      while (next_sample + sample_dt < std::min(t_event, t_max)) {
        next_sample += sample_dt;
        ClassicalState mid = s;
        mid.x += vx * (next_sample - t);
        mid.y += vy * (next_sample - t);
        record(next_sample, mid);
      }
    }
    if (t_event >= t_max) {
      s.x += vx * (t_max - t);
      s.y += vy * (t_max - t);
      t = t_max;
      break;
    }

    s.x += vx * te;
    s.y += vy * te;
    t = t_event;
    switch (ev) {
      case Ev::SideLo:
      case Ev::SideHi:
        s.py = -s.py;
        break;
      case Ev::WallL:
      case Ev::WallR: {
        const KickWall& w = (ev == Ev::WallL) ? left : right;
        bool crossed = false;
        s = apply_wall_event(s, w, s.px > 0.0 ? 1 : -1, params, &crossed);
        if (crossed) escaped = true;
        break;
      }
      default:
        break;
    }
    record(t, s);
  }
  record(t, s);
  run.trapped = !escaped;
  run.t_end = t;
  return run;
}

}  // namespace flux
