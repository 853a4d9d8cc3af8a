// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plexus/hand_model.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <sstream>
#include <vector>

#include "plexus/error.hpp"

namespace plexus {

namespace {

constexpr double kLimitTol = 1e-9;

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Distance from the thumb axis to the piston pin along the actuator line.
double pin_distance(const HandGeometry& g, double stroke) {
  return norm(g.thumb_axis - g.thumb_drive.actuator_mount) - stroke;
}

Vec2 actuator_dir(const HandGeometry& g) {
  return normalized(g.thumb_axis - g.thumb_drive.actuator_mount);
}

// Crank angle (palm frame) for a given stroke, without limit checks. The
// crank pin sits on the counter-clockwise side of the actuator line.
double crank_angle(const HandGeometry& g, double stroke) {
  const double r = g.thumb_drive.crank_radius;
  const double l = g.thumb_drive.rod_length;
  const double d = pin_distance(g, stroke);
  const double c = std::clamp((r * r + d * d - l * l) / (2.0 * r * d), -1.0, 1.0);
  return angle_of(-actuator_dir(g)) + std::acos(c);
}

double raw_thumb_angle(const HandGeometry& g, double stroke) {
  return crank_angle(g, stroke) - crank_angle(g, g.thumb_drive.reference_stroke);
}

// Closed-form inverse: crank pin position, then the piston pin that sits
// rod_length away on the actuator line.
double raw_stroke(const HandGeometry& g, double angle) {
  const double phi = angle + crank_angle(g, g.thumb_drive.reference_stroke);
  const Vec2 v = unit_from_angle(phi) * g.thumb_drive.crank_radius;
  const Vec2 u = actuator_dir(g);
  const double r = g.thumb_drive.crank_radius;
  const double l = g.thumb_drive.rod_length;
  const double vu = dot(v, u);
  const double d = -vu + std::sqrt(vu * vu - r * r + l * l);
  return norm(g.thumb_axis - g.thumb_drive.actuator_mount) - d;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidGeometry, what);
}

}  // namespace

void HandGeometry::validate() const {
  require(schema_version == 1, "unsupported schema_version " + std::to_string(schema_version));
  require(thumb_drive.crank_radius > 0 && thumb_drive.rod_length > 0, "piston-crank lengths must be positive");
  require(thumb_drive.rod_length > thumb_drive.crank_radius, "rod_length must exceed crank_radius");
  require(thumb_pad_half_length > 0, "thumb_pad_half_length must be positive");
  const FourBar& fb = index_fourbar;
  require(fb.crank_length > 0 && fb.coupler_length > 0 && fb.rocker_length > 0,
          "four-bar link lengths must be positive");
  require(norm(fb.rocker_pivot - fb.crank_pivot) > 0, "four-bar ground pivots coincide");
  require(index_tip.half_length > 0 && index_tip.half_thickness > 0 && index_tip.corner_radius >= 0,
          "fingertip extents must be positive");
  {
    const FingertipShape& t = index_tip;
    const Vec2 n = unit_from_angle(t.side_normal_angle);
    require(n.x > 0 && n.y < 0, "index side plane normal must point between +x and -y");
    const double x_pad = (t.side_offset + n.y * t.half_thickness) / n.x;
    const double y_front = (t.side_offset - n.x * t.half_length) / n.y;
    require(x_pad > -t.half_length && x_pad < t.half_length && y_front > -t.half_thickness &&
                y_front < t.half_thickness,
            "index side plane must cut the front pad corner of the fingertip core");
  }
  require(index_stroke_per_rad > 0, "index_stroke_per_rad must be positive");
  require(thumb_limits.min < thumb_limits.max, "thumb joint limits must satisfy min < max");
  require(index_limits.min < index_limits.max, "index joint limits must satisfy min < max");
  require(thumb_stroke.min < thumb_stroke.max, "thumb stroke limits must satisfy min < max");
  require(index_stroke.min < index_stroke.max, "index stroke limits must satisfy min < max");

  // The working stroke must stay strictly between the two dead centres.
  const double r = thumb_drive.crank_radius;
  const double l = thumb_drive.rod_length;
  for (double s : {thumb_stroke.min, thumb_stroke.max, thumb_drive.reference_stroke}) {
    const double d = pin_distance(*this, s);
    require(d > l - r && d < l + r, "thumb stroke " + fmt_num(s) + " mm reaches a piston-crank dead centre");
  }
  const double lo = raw_thumb_angle(*this, thumb_stroke.min);
  const double hi = raw_thumb_angle(*this, thumb_stroke.max);
  require(thumb_limits.contains(lo, kLimitTol) && thumb_limits.contains(hi, kLimitTol),
          "thumb stroke range maps outside the thumb joint limits");
  const double idx_lo = index_limits.min;
  const double idx_hi = index_limits.min + index_stroke.span() / index_stroke_per_rad;
  require(index_limits.contains(idx_lo, kLimitTol) && index_limits.contains(idx_hi, kLimitTol),
          "index stroke range maps outside the index joint limits");
  require(thumb_limits.contains(pregrasp_thumb_angle), "pregrasp_thumb_angle outside thumb joint limits");
}

double thumb_angle_from_stroke(const HandGeometry& geom, double stroke) {
  if (!geom.thumb_stroke.contains(stroke, kLimitTol)) {
    throw Error(ErrorCode::kStrokeOutOfRange, "thumb stroke " + fmt_num(stroke) + " mm outside [" +
                                                  fmt_num(geom.thumb_stroke.min) + ", " +
                                                  fmt_num(geom.thumb_stroke.max) + "]");
  }
  return raw_thumb_angle(geom, stroke);
}

double stroke_from_thumb_angle(const HandGeometry& geom, double angle) {
  const double lo = raw_thumb_angle(geom, geom.thumb_stroke.min);
  const double hi = raw_thumb_angle(geom, geom.thumb_stroke.max);
  if (!geom.thumb_limits.contains(angle, kLimitTol) || angle < lo - kLimitTol || angle > hi + kLimitTol) {
    throw Error(ErrorCode::kAngleUnreachable, "thumb angle " + fmt_num(angle) + " rad is not reachable");
  }
  return raw_stroke(geom, angle);
}

double index_angle_from_stroke(const HandGeometry& geom, double stroke) {
  if (!geom.index_stroke.contains(stroke, kLimitTol)) {
    throw Error(ErrorCode::kStrokeOutOfRange, "index stroke " + fmt_num(stroke) + " mm out of range");
  }
  return geom.index_limits.min + (stroke - geom.index_stroke.min) / geom.index_stroke_per_rad;
}

double stroke_from_index_angle(const HandGeometry& geom, double angle) {
  const double s = geom.index_stroke.min + (angle - geom.index_limits.min) * geom.index_stroke_per_rad;
  if (!geom.index_limits.contains(angle, kLimitTol) || !geom.index_stroke.contains(s, kLimitTol)) {
    throw Error(ErrorCode::kAngleUnreachable, "index angle " + fmt_num(angle) + " rad is not reachable");
  }
  return s;
}

Pose2 thumb_fingertip_pose(const HandGeometry& geom, double theta_T) {
  if (!geom.thumb_limits.contains(theta_T, kLimitTol)) {
    throw Error(ErrorCode::kAngleOutOfRange, "thumb angle " + fmt_num(theta_T) + " rad outside joint limits");
  }
  const Pose2& off = geom.thumb_tip_offset;
  return Pose2(geom.thumb_axis + rotate(off.position, theta_T), off.orientation + theta_T);
}

Pose2 index_fingertip_pose(const HandGeometry& geom, double theta_I) {
  if (!geom.index_limits.contains(theta_I, kLimitTol)) {
    throw Error(ErrorCode::kAngleOutOfRange, "index angle " + fmt_num(theta_I) + " rad outside joint limits");
  }
  const FourBar& fb = geom.index_fourbar;
  const Vec2 a = fb.crank_pivot;
  const Vec2 d = fb.rocker_pivot;
  const Vec2 b = a + unit_from_angle(fb.open_crank_angle - theta_I) * fb.crank_length;

  // C is the intersection of circle(B, coupler) and circle(D, rocker).
  const Vec2 bd = d - b;
  const double dist = norm(bd);
  const double rb = fb.coupler_length;
  const double rd = fb.rocker_length;
  if (dist > rb + rd || dist < std::abs(rb - rd) || dist == 0.0) {
    throw Error(ErrorCode::kFourBarAssemblyFailure,
                "four-bar cannot close at theta_I = " + fmt_num(theta_I) + " rad");
  }
  const double along = (rb * rb - rd * rd + dist * dist) / (2.0 * dist);
  const double h = std::sqrt(std::max(0.0, rb * rb - along * along));
  const Vec2 ex = bd / dist;
  const Vec2 mid = b + ex * along;
  const Vec2 c1 = mid + perp(ex) * h;
  const Vec2 c2 = mid - perp(ex) * h;
  // Open assembly: C and A on opposite sides of the diagonal BD.
  const double side_a = cross(bd, a - b);
  const Vec2 c = (cross(bd, c1 - b) * side_a < 0.0) ? c1 : c2;

  const Pose2 coupler(b, angle_of(c - b));
  return coupler.compose(fb.tip_offset);
}

GraspSurface thumb_pad_surface(const HandGeometry& geom, double theta_T) {
  const Pose2 pad = thumb_fingertip_pose(geom, theta_T);
  const Vec2 n = unit_from_angle(pad.orientation);
  const Vec2 t = perp(n);
  const double hl = geom.thumb_pad_half_length;
  return {{pad.position - t * hl, pad.position + t * hl}, n, pad.position};
}

namespace {

// Core polygon in the fingertip frame: rectangle with the (+x, -y) corner cut
// by the side plane. Vertex order is counter-clockwise starting at the rear
// pad corner; the pad face is vertices 0-1 and the side face vertices 1-2.
std::vector<Vec2> local_core(const FingertipShape& s) {
  const Vec2 n = unit_from_angle(s.side_normal_angle);
  // Points on the side line dot(p, n) = side_offset.
  const double x_pad = (s.side_offset + n.y * s.half_thickness) / n.x;
  const double y_front = (s.side_offset - n.x * s.half_length) / n.y;
  return {{-s.half_length, -s.half_thickness},
          {x_pad, -s.half_thickness},
          {s.half_length, y_front},
          {s.half_length, s.half_thickness},
          {-s.half_length, s.half_thickness}};
}

}  // namespace

ConvexPolygon index_tip_core(const HandGeometry& geom, double theta_I) {
  const Pose2 tip = index_fingertip_pose(geom, theta_I);
  ConvexPolygon poly;
  for (const Vec2& v : local_core(geom.index_tip)) poly.vertices.push_back(tip.transform(v));
  return poly;
}

GraspSurface index_grasp_surface(const HandGeometry& geom, double theta_I, GraspType type) {
  const Pose2 tip = index_fingertip_pose(geom, theta_I);
  const std::vector<Vec2> core = local_core(geom.index_tip);
  const std::size_t i0 = type == GraspType::kPrecision ? 0 : 1;
  const Vec2 a = tip.transform(core[i0]);
  const Vec2 b = tip.transform(core[i0 + 1]);
  const Vec2 n = type == GraspType::kPrecision ? tip.transform_dir({0.0, -1.0})
                                               : tip.transform_dir(unit_from_angle(geom.index_tip.side_normal_angle));
  return {{a, b}, n, (a + b) * 0.5};
}

std::vector<double> index_angles_on_thumb_line(const HandGeometry& geom, double theta_T) {
  const GraspSurface pad = thumb_pad_surface(geom, theta_T);
  const Vec2 t = perp(pad.normal);
  auto f = [&](double th) { return dot(index_fingertip_pose(geom, th).position - pad.center, t); };
  // Bracket sign changes on a fine grid, then polish each root.
  constexpr int kSamples = 400;
  const double lo = geom.index_limits.min;
  const double step = geom.index_limits.span() / kSamples;
  std::vector<double> roots;
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) roots.push_back(a);
  for (int i = 1; i <= kSamples; ++i) {
    const double b = i == kSamples ? geom.index_limits.max : lo + i * step;
    const double fb = f(b);
    if (fb == 0.0) {
      roots.push_back(b);
    } else if (fa != 0.0 && (fa > 0.0) != (fb > 0.0)) {
      std::uintmax_t iters = 200;
      const auto [r0, r1] = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(std::abs(f(r0)) <= std::abs(f(r1)) ? r0 : r1);
    }
    a = b;
    fa = fb;
  }
  return roots;
}

double index_angle_on_thumb_line(const HandGeometry& geom, double theta_T) {
  const std::vector<double> roots = index_angles_on_thumb_line(geom, theta_T);
  if (roots.empty()) {
    throw Error(ErrorCode::kNoIntersectionInRange,
                "index fingertip never crosses the thumb line of action at theta_T = " + fmt_num(theta_T) + " rad");
  }
  return roots.back();
}

double fingertip_gap(const HandGeometry& geom, double theta_T, double theta_I, GraspType type) {
  const GraspSurface pad = thumb_pad_surface(geom, theta_T);
  const GraspSurface face = index_grasp_surface(geom, theta_I, type);
  // The rounded face is the core edge swept by the corner radius; its
  // distance to the pad line is set by the nearer edge endpoint.
  const double d0 = dot(face.segment.a - pad.center, pad.normal);
  const double d1 = dot(face.segment.b - pad.center, pad.normal);
  return std::min(d0, d1) - geom.index_tip.corner_radius;
}

double solve_index_contact_angle(const HandGeometry& geom, double theta_T_P, double width) {
  const double lo = geom.index_limits.min;
  const double hi = geom.index_limits.max;
  auto f = [&](double th) { return fingertip_gap(geom, theta_T_P, th, GraspType::kPrecision) - width; };
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo < 0.0 || f_hi > 0.0) {
    throw Error(ErrorCode::kWidthUnreachable, "width " + fmt_num(width) + " mm outside reachable gap [" +
                                                  fmt_num(f_hi + width) + ", " + fmt_num(f_lo + width) + "]");
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

HandGeometry default_geometry() {
  HandGeometry g;
  g.name = "default (non-physical, adult-size proportions)";
  // Palm frame: the thumb pad centre sits at the origin with its normal
  // along +y at theta_T = 0. The thumb is an L-shaped lever, so the pad
  // travels both across and along its normal while it rotates.
  g.thumb_axis = {36.0, 26.0};
  g.thumb_drive.actuator_mount = {36.0, -34.0};
  g.thumb_drive.crank_radius = 12.0;
  g.thumb_drive.rod_length = 40.0;
  g.thumb_drive.reference_stroke = 12.0;
  g.thumb_tip_offset = Pose2({-36.0, -26.0}, std::numbers::pi / 2.0);
  g.thumb_pad_half_length = 14.0;

  // Parallelogram four-bar: the fingertip translates without rotating.
  FourBar& fb = g.index_fourbar;
  fb.crank_pivot = {-53.56, 24.5};
  fb.rocker_pivot = {-53.56, 9.5};
  fb.crank_length = 55.0;
  fb.coupler_length = 15.0;
  fb.rocker_length = 55.0;
  fb.open_crank_angle = 0.30;
  // Coupler x axis points along palm -y; the fingertip centre is B itself
  // with zero orientation in the palm frame.
  fb.tip_offset = Pose2({0.0, 0.0}, std::numbers::pi / 2.0);

  g.index_tip.half_length = 6.0;
  g.index_tip.half_thickness = 3.0;
  g.index_tip.corner_radius = 4.0;
  g.index_tip.side_normal_angle = -std::numbers::pi / 3.0;
  g.index_tip.side_offset = 4.0;
  g.index_limits = {0.0, 0.72};
  g.index_stroke = {0.0, 20.0};
  g.index_stroke_per_rad = 20.0 / 0.72;

  g.thumb_limits = {-0.5, 2.0};
  g.pregrasp_thumb_angle = 0.0;
  // Stroke limits are the preimage of the joint limits.
  g.thumb_stroke = {raw_stroke(g, g.thumb_limits.min), raw_stroke(g, g.thumb_limits.max)};
  return g;
}

}  // namespace plexus
