#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flux/params.hpp"

namespace flux {

/// Point charge in the plane; px, py are kinematic momenta (mass * velocity).
struct ClassicalState {
  double x = 0.0, y = 0.0;
  double px = 0.0, py = 0.0;
  double speed(const PhysicalParams& p) const;
};

/// Axis-aligned rectangle with a uniform out-of-plane field B.
struct FieldRegion {
  double x0 = 0.0, x1 = 0.0;
  double y0 = 0.0, y1 = 0.0;
  double B = 0.0;
  bool contains(double x, double y) const { return x > x0 && x < x1 && y > y0 && y < y1; }
  double phi_B() const { return B * (x1 - x0); }  ///< flux per unit transverse length
};

/// Widthless field wall at x0: crossing it kicks the transverse momentum by
/// -q*phi_B (sign flips for right-to-left crossings). A charge that cannot
/// carry the post-kick momentum is reflected instead, with py unchanged.
struct KickWall {
  double x0 = 0.0;
  double phi_B = 0.0;
};

struct FieldRegionSet {
  std::vector<FieldRegion> regions;
  std::vector<KickWall> walls;
  void validate() const;  // regions must not overlap
  const FieldRegion* locate(double x, double y) const;
};

struct TrajectoryPoint {
  double t = 0.0;
  ClassicalState state;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  void write_csv(const std::string& path) const;  // columns t,x,y,px,py
};

/// Advance one step of length dt. Motion is exact inside each uniform region
/// (circular-arc update; straight lines where B = 0); region boundaries and
/// wall crossings are resolved internally, so speed is conserved to rounding.
ClassicalState step_charge(const ClassicalState& state, const FieldRegionSet& fields, double dt,
                           const PhysicalParams& params);

/// Radius of the circular arc inside a wall slab of width w carrying flux
/// per unit length phi_B: m*v*w / |q*phi_B|.
double larmor_radius(double v, double phi_B, double w, const PhysicalParams& params);

/// Normal incidence: the wall reflects the charge iff px < |q*phi_B|.
bool reflects_normal(double px, double phi_B, const PhysicalParams& params);

/// Any incidence: guaranteed reflection iff sqrt(px^2+py^2) < |q*phi_B| / 2.
bool reflects_any_angle(double px, double py, double phi_B, const PhysicalParams& params);

/// Transverse momentum change for a left-to-right crossing: exactly -q*phi_B,
/// independent of speed and angle.
double wall_crossing_kick(double phi_B, const PhysicalParams& params);

struct CavityRun {
  Trajectory trajectory;
  bool trapped = false;
  double t_end = 0.0;
};

/// Two widthless field walls at x = +-separation/2 inside a cavity of width
/// L_cav (specular side walls at y = +-L_cav/2). The charge is trapped when
/// it never leaves the inter-wall region before t_max.
CavityRun simulate_cavity(double L_cav, double separation, double phi_B,
                          const ClassicalState& initial, double t_max,
                          const PhysicalParams& params, double sample_dt = 0.0);

}  // namespace flux
