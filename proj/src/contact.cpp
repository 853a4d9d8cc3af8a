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

#include "plexus/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plexus/error.hpp"
#include "plexus/lp.hpp"

namespace plexus {

namespace {

constexpr double kStableTol = 1e-9;

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

ConvexPolygon object_outline(const ObjectSpec& object, const Pose2& pose) {
  if (object.shape == ObjectShape::kSquarePrism) {
    return make_rectangle(pose, object.half_width(), object.half_width());
  }
  return ConvexPolygon{{pose.position}};
}

// Radius swept around the outline (the whole disc for cylinders).
double outline_radius(const ObjectSpec& object) {
  return object.shape == ObjectShape::kCylinder ? object.half_width() : 0.0;
}

// Signed clearance between the object and the rounded index fingertip.
double index_clearance(const ObjectSpec& object, const Pose2& pose, const ConvexPolygon& core, double rho) {
  return proximity(object_outline(object, pose), core).distance - outline_radius(object) - rho;
}

struct Group {
  std::vector<std::size_t> members;
  Vec2 normal_sum;
};

// Groups contacts by finger; unassigned contacts each form their own group.
std::vector<Group> group_contacts(const std::vector<ContactPoint>& contacts) {
  std::vector<Group> groups;
  Group thumb, index;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const ContactPoint& c = contacts[i];
    Group* g = nullptr;
    if (c.finger == Finger::kThumb) {
      g = &thumb;
    } else if (c.finger == Finger::kIndex) {
      g = &index;
    } else {
      groups.push_back({{i}, c.normal});
      continue;
    }
    g->members.push_back(i);
    g->normal_sum = g->normal_sum + c.normal;
  }
  if (!thumb.members.empty()) groups.push_back(thumb);
  if (!index.members.empty()) groups.push_back(index);
  return groups;
}

struct LpResult {
  bool feasible = false;
  double slack = 0.0;
  std::vector<double> normal_forces;
};

// maximize t  s.t. force (and optionally torque) balance, per-group normal
// force caps, and t <= mu_i f_n,i - |f_t,i| for every contact.
LpResult solve_balance(const std::vector<ContactPoint>& contacts, double grip, double weight, Vec2 gdir,
                       Vec2 com, bool torque) {
  const std::size_t k = contacts.size();
  const std::size_t nv = 3 * k + 2;  // (fn, ft+, ft-) per contact, then t+, t-
  lp::Problem p;
  p.objective.assign(nv, 0.0);
  p.objective[3 * k] = 1.0;
  p.objective[3 * k + 1] = -1.0;

  double lever = 1.0;
  for (const ContactPoint& c : contacts) lever = std::max(lever, norm(c.position - com));

  std::vector<double> fx(nv, 0.0), fy(nv, 0.0), tz(nv, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2 n = contacts[i].normal;
    const Vec2 t = perp(n);
    const Vec2 r = contacts[i].position - com;
    fx[3 * i] = n.x;
    fy[3 * i] = n.y;
    fx[3 * i + 1] = t.x;
    fy[3 * i + 1] = t.y;
    fx[3 * i + 2] = -t.x;
    fy[3 * i + 2] = -t.y;
    tz[3 * i] = cross(r, n) / lever;
    tz[3 * i + 1] = cross(r, t) / lever;
    tz[3 * i + 2] = -cross(r, t) / lever;
  }
  p.eq_rows = {fx, fy};
  p.eq_rhs = {-weight * gdir.x, -weight * gdir.y};
  if (torque) {
    p.eq_rows.push_back(tz);
    p.eq_rhs.push_back(0.0);
  }

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> row(nv, 0.0);
    row[3 * i] = -contacts[i].mu;
    row[3 * i + 1] = 1.0;
    row[3 * i + 2] = 1.0;
    row[3 * k] = 1.0;
    row[3 * k + 1] = -1.0;
    p.ub_rows.push_back(std::move(row));
    p.ub_rhs.push_back(0.0);
  }
  for (const Group& g : group_contacts(contacts)) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t i : g.members) row[3 * i] = 1.0;
    const double n2 = norm(g.normal_sum);
    const double into = n2 > 0.0 ? std::max(0.0, -dot(gdir, g.normal_sum / n2)) : 0.0;
    p.ub_rows.push_back(std::move(row));
    p.ub_rhs.push_back(grip + weight * into);
  }

  const lp::Solution sol = lp::solve(p);
  LpResult out;
  if (sol.status != lp::Status::kOptimal) return out;
  out.feasible = true;
  out.slack = sol.value;
  out.normal_forces.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.normal_forces[i] = sol.x[3 * i];
  return out;
}

double normalised_margin(const LpResult& r, double grip, double weight) {
  if (!r.feasible) return -1.0;
  const double scale = grip + weight;
  double m = scale > 0.0 ? r.slack / scale : r.slack;
  if (m < 0.0 && m >= -kStableTol) m = 0.0;
  return std::max(m, -1.0);
}

bool touches_both_fingers(const std::vector<ContactPoint>& contacts) {
  bool thumb = false, index = false;
  for (const ContactPoint& c : contacts) {
    thumb = thumb || c.finger == Finger::kThumb;
    index = index || c.finger == Finger::kIndex;
  }
  return thumb && index;
}

}  // namespace

std::string_view to_string(ObjectShape shape) {
  return shape == ObjectShape::kCylinder ? "cylinder" : "square_prism";
}

ObjectShape object_shape_from_string(std::string_view name) {
  if (name == "cylinder") return ObjectShape::kCylinder;
  if (name == "square_prism" || name == "prism") return ObjectShape::kSquarePrism;
  throw Error(ErrorCode::kSchemaError, "unknown object shape '" + std::string(name) + "'");
}

std::string_view to_string(FailureMode mode) {
  switch (mode) {
    case FailureMode::kNone: return "none";
    case FailureMode::kSlip: return "slip";
    case FailureMode::kRotationEjection: return "rotation_ejection";
    case FailureMode::kNoContact: return "no_contact";
  }
  return "unknown";
}

void ObjectSpec::validate() const {
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kSchemaError, "object '" + label + "': " + what);
  };
  need(std::isfinite(width) && width > 0.0, "width must be > 0");
  need(std::isfinite(mass) && mass >= 0.0, "mass must be >= 0");
  need(std::isfinite(mu) && mu > 0.0 && mu < 2.0, "mu must lie in (0, 2)");
  need(std::isfinite(height) && height > 0.0, "height must be > 0");
}

void PhysicsParams::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, "physics: " + what);
  };
  need(gravity > 0.0, "gravity must be > 0");
  need(std::abs(norm(gravity_dir) - 1.0) < 1e-6, "gravity_dir must be a unit vector");
  need(contact_tolerance > 0.0, "contact_tolerance must be > 0");
  need(pad_compliance >= 0.0 && grip_travel >= 0.0, "pad_compliance and grip_travel must be >= 0");
  need(prism_min_overlap > 0.0, "prism_min_overlap must be > 0");
  need(max_step > 0.0, "max_step must be > 0");
  need(resettle_step > 0.0, "resettle_step must be > 0");
  need(max_mass > 0.0 && mass_tolerance > 0.0, "max_mass and mass_tolerance must be > 0");
}

std::vector<ContactPoint> contact_set(const HandGeometry& geom, const JointState& joints,
                                      const ObjectSpec& object, GraspType grasp_type,
                                      const Pose2& object_pose, const PhysicsParams& params) {
  // Both grasp types consider the whole fingertip outline; the grasp type
  // only names which face is expected to carry the load.
  (void)grasp_type;
  const double tol = params.contact_tolerance;
  const double rho = geom.index_tip.corner_radius;
  std::vector<ContactPoint> out;

  // Index fingertip (rigid).
  const ConvexPolygon core = index_tip_core(geom, joints.theta_I);
  const ConvexPolygon outline = object_outline(object, object_pose);
  const Proximity prox = proximity(outline, core);
  const double d_index = prox.distance - outline_radius(object) - rho;
  if (d_index < -tol) {
    throw Error(ErrorCode::kInterpenetration,
                "object overlaps the index fingertip by " + fmt_num(-d_index) + " mm");
  }
  const bool index_touch = d_index <= tol;
  if (index_touch) {
    for (const Vec2& p : prox.patch_on_b) {
      out.push_back({p + prox.normal * rho, prox.normal, 0.0, object.mu, Finger::kIndex});
    }
  }

  // Thumb pad (compliant along its normal).
  const GraspSurface pad = thumb_pad_surface(geom, joints.theta_T);
  const Vec2 n = pad.normal;
  const Vec2 t = perp(n);
  const double L = geom.thumb_pad_half_length;
  double lowest = std::numeric_limits<double>::infinity();
  for (const Vec2& v : outline.vertices) lowest = std::min(lowest, dot(v - pad.center, n));
  lowest -= outline_radius(object);
  if (lowest < -(params.pad_compliance + tol)) {
    throw Error(ErrorCode::kInterpenetration,
                "object overlaps the thumb pad by " + fmt_num(-lowest) + " mm");
  }
  const bool thumb_touch = lowest <= tol || (index_touch && lowest <= params.grip_travel + tol);
  if (!thumb_touch) return out;

  auto add_thumb = [&](double u) {
    out.push_back({pad.center + t * u + n * lowest, n, 0.0, object.mu, Finger::kThumb});
  };
  if (object.shape == ObjectShape::kCylinder) {
    const double u = dot(object_pose.position - pad.center, t);
    if (std::abs(u) <= L + 1e-9) add_thumb(std::clamp(u, -L, L));
    return out;
  }
  std::vector<double> bottom;
  for (const Vec2& v : outline.vertices) {
    if (dot(v - pad.center, n) - lowest <= 1e-6) bottom.push_back(dot(v - pad.center, t));
  }
  if (bottom.size() >= 2) {
    const double lo = std::max(-L, *std::min_element(bottom.begin(), bottom.end()));
    const double hi = std::min(L, *std::max_element(bottom.begin(), bottom.end()));
    if (hi - lo > 1e-9) {
      add_thumb(lo);
      add_thumb(hi);
    } else if (hi - lo >= -1e-9) {
      add_thumb(lo);
    }
  } else if (bottom.size() == 1 && std::abs(bottom.front()) <= L + 1e-9) {
    add_thumb(bottom.front());
  }
  return out;
}

GraspAssessment quasi_static_stability(const std::vector<ContactPoint>& contacts, double grip_force,
                                       double mass_g, Vec2 gravity_dir, const StabilityOptions& options) {
  GraspAssessment a;
  a.contacts = contacts;
  const double weight = mass_g * 1e-3 * options.gravity;
  if (contacts.empty()) {
    a.stable = weight <= 0.0;
    a.margin = a.stable ? 0.0 : -1.0;
    a.failure_mode = a.stable ? FailureMode::kNone : FailureMode::kNoContact;
    return a;
  }
  Vec2 com;
  if (options.center_of_mass) {
    com = *options.center_of_mass;
  } else {
    for (const ContactPoint& c : contacts) com = com + c.position;
    com = com / static_cast<double>(contacts.size());
  }
  const Vec2 gdir = normalized(gravity_dir);
  const LpResult r = solve_balance(contacts, grip_force, weight, gdir, com, options.torque_balance);
  a.margin = normalised_margin(r, grip_force, weight);
  a.stable = a.margin >= 0.0;
  if (r.feasible) {
    for (std::size_t i = 0; i < contacts.size(); ++i) a.contacts[i].normal_force = r.normal_forces[i];
  }
  if (a.stable) {
    a.failure_mode = FailureMode::kNone;
  } else if (!options.torque_balance) {
    a.failure_mode = FailureMode::kSlip;
  } else {
    const LpResult f = solve_balance(contacts, grip_force, weight, gdir, com, false);
    a.failure_mode = normalised_margin(f, grip_force, weight) >= 0.0 ? FailureMode::kRotationEjection
                                                                      : FailureMode::kSlip;
  }
  return a;
}

namespace {

// Tangential pad coordinate of the object centre under the pose rule.
double pose_rule_position(const HandGeometry& geom, const JointState& joints, const ObjectSpec& object,
                          double tangential_offset, const PhysicsParams& params, double* u_tip_out) {
  const GraspSurface pad = thumb_pad_surface(geom, joints.theta_T);
  const Vec2 t = perp(pad.normal);
  const double L = geom.thumb_pad_half_length;
  const double R = object.half_width();
  const Vec2 tip = index_fingertip_pose(geom, joints.theta_I).position;
  const double u_tip = dot(tip - pad.center, t);
  if (u_tip_out) *u_tip_out = u_tip;
  const double s_max = object.shape == ObjectShape::kSquarePrism ? L + R - params.prism_min_overlap : L;
  return std::clamp(u_tip + tangential_offset, -s_max, s_max);
}

}  // namespace

Pose2 resting_object_pose(const HandGeometry& geom, const JointState& joints, const ObjectSpec& object,
                          double tangential_offset, const PhysicsParams& params) {
  const GraspSurface pad = thumb_pad_surface(geom, joints.theta_T);
  const double s = pose_rule_position(geom, joints, object, tangential_offset, params, nullptr);
  return Pose2(pad.center + perp(pad.normal) * s + pad.normal * object.half_width(),
               angle_of(pad.normal) - std::numbers::pi / 2.0);
}

double pinch_clearance(const HandGeometry& geom, const JointState& joints, const ObjectSpec& object,
                       double tangential_offset, const PhysicsParams& params) {
  return index_clearance(object, resting_object_pose(geom, joints, object, tangential_offset, params),
                         index_tip_core(geom, joints.theta_I), geom.index_tip.corner_radius);
}

std::optional<SettledPose> settle_object_pose(const HandGeometry& geom, const JointState& joints,
                                              const ObjectSpec& object, double tangential_offset,
                                              const PhysicsParams& params) {
  const GraspSurface pad = thumb_pad_surface(geom, joints.theta_T);
  const Vec2 n = pad.normal;
  const Vec2 t = perp(n);
  const double R = object.half_width();
  double u_tip = 0.0;
  const double s = pose_rule_position(geom, joints, object, tangential_offset, params, &u_tip);
  const double orientation = angle_of(n) - std::numbers::pi / 2.0;

  const ConvexPolygon core = index_tip_core(geom, joints.theta_I);
  const double rho = geom.index_tip.corner_radius;
  auto pose_at = [&](double h) { return Pose2(pad.center + t * s + n * h, orientation); };
  auto clearance = [&](double h) { return index_clearance(object, pose_at(h), core, rho); };

  const double tol = params.contact_tolerance;
  const double h_lo = R - params.pad_compliance;
  const double h_hi = R + params.grip_travel;
  double a = h_lo;
  double fa = clearance(a);
  if (fa < -tol) return std::nullopt;  // the pinch would crush the pad
  double h = h_lo;
  if (fa > 0.0) {
    // March towards the fingertip to the first touch, then bisect.
    constexpr double kStep = 1.0;
    double b = a;
    double fb = fa;
    bool bracketed = false;
    while (b < h_hi) {
      a = b;
      fa = fb;
      b = std::min(h_hi, b + kStep);
      fb = clearance(b);
      if (fb <= 0.0) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) return std::nullopt;
    for (int i = 0; i < 60 && b - a > 1e-9; ++i) {
      const double m = 0.5 * (a + b);
      if (clearance(m) > 0.0) {
        a = m;
      } else {
        b = m;
      }
    }
    h = b;
  }
  SettledPose out;
  out.pose = pose_at(h);
  out.tangential_offset = s - u_tip;
  out.pad_advance = h - R;
  return out;
}

TransitionOutcome simulate_transition(const HandGeometry& geom, const std::vector<TraceStep>& trace,
                                      const ObjectSpec& object, const PlacementSample& placement,
                                      const PhysicsParams& params) {
  if (trace.empty()) throw Error(ErrorCode::kInvalidTrace, "trace is empty");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const JointState& j = trace[i].joints;
    if (!geom.thumb_limits.contains(j.theta_T, 1e-9) || !geom.index_limits.contains(j.theta_I, 1e-9)) {
      throw Error(ErrorCode::kInvalidTrace, "step " + std::to_string(i) + ": joint angle outside limits");
    }
    if (!(trace[i].grip_force >= 0.0)) {
      throw Error(ErrorCode::kInvalidTrace, "step " + std::to_string(i) + ": negative grip force");
    }
    if (i > 0) {
      const JointState& p = trace[i - 1].joints;
      const double jump = std::max(std::abs(j.theta_T - p.theta_T), std::abs(j.theta_I - p.theta_I));
      if (jump > params.max_step + 1e-12) {
        throw Error(ErrorCode::kInvalidTrace, "step " + std::to_string(i) + ": joint jump of " +
                                                  fmt_num(jump) + " rad exceeds " + fmt_num(params.max_step));
      }
    }
  }

  ObjectSpec obj = object;
  obj.mu = std::clamp(object.mu * placement.friction_scale, 1e-6, 2.0 - 1e-6);
  const Vec2 gdir = rotate(params.gravity_dir, placement.tilt);
  double offset = placement.tangential_offset;

  TransitionOutcome out;
  out.min_margin = std::numeric_limits<double>::infinity();
  auto fail = [&](std::size_t i, FailureMode mode) {
    out.success = false;
    out.failure_mode = mode;
    out.failed_step = i;
    return out;
  };

  struct Evaluated {
    SettledPose settled;
    GraspAssessment assessment;
  };
  auto evaluate = [&](const TraceStep& step, double e, bool full) -> std::optional<Evaluated> {
    const auto settled = settle_object_pose(geom, step.joints, obj, e, params);
    if (!settled) return std::nullopt;
    std::vector<ContactPoint> contacts;
    try {
      contacts = contact_set(geom, step.joints, obj, GraspType::kLateral, settled->pose, params);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!touches_both_fingers(contacts)) return std::nullopt;
    StabilityOptions opt;
    opt.center_of_mass = settled->pose.position;
    opt.torque_balance = full;
    opt.gravity = params.gravity;
    return Evaluated{*settled, quasi_static_stability(contacts, step.grip_force, obj.mass, gdir, opt)};
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceStep& step = trace[i];
    const bool full = step.kind == StepKind::kHold || i + 1 == trace.size();
    auto ev = evaluate(step, offset, full);
    if (!ev) return fail(i, FailureMode::kNoContact);
    if (!ev->assessment.stable && !full) {
      // Re-settle: lowest-potential force-feasible pose along the pad, ties
      // broken by the smallest displacement.
      std::optional<Evaluated> best;
      double best_pot = 0.0, best_move = 0.0;
      const double R = obj.half_width();
      const int n = static_cast<int>(std::ceil(R / params.resettle_step));
      for (int k = -n; k <= n; ++k) {
        if (k == 0) continue;
        const double e = offset + k * params.resettle_step;
        auto cand = evaluate(step, e, false);
        if (!cand || !cand->assessment.stable) continue;
        const double pot = -dot(cand->settled.pose.position, gdir);
        const double move = std::abs(cand->settled.tangential_offset - offset);
        if (!best || pot < best_pot - 1e-9 || (std::abs(pot - best_pot) <= 1e-9 && move < best_move)) {
          best = cand;
          best_pot = pot;
          best_move = move;
        }
      }
      if (best) {
        ev = best;
        out.shifted = true;
      }
    }
    out.min_margin = std::min(out.min_margin, ev->assessment.margin);
    if (!ev->assessment.stable) return fail(i, ev->assessment.failure_mode);
    offset = ev->settled.tangential_offset;
    out.final_pose = ev->settled.pose;
  }
  out.success = true;
  out.failure_mode = FailureMode::kNone;
  return out;
}

double max_holdable_mass(const HandGeometry& geom, const JointState& posture, const ObjectSpec& object,
                         double grip_force, bool with_index_support, const PhysicsParams& params) {
  JointState j = posture;
  std::optional<SettledPose> settled;
  if (with_index_support) {
    // Most flexed support angle on the thumb line that still admits the object.
    const std::vector<double> roots = index_angles_on_thumb_line(geom, posture.theta_T);
    for (auto it = roots.rbegin(); it != roots.rend() && !settled; ++it) {
      j.theta_I = *it;
      settled = settle_object_pose(geom, j, object, 0.0, params);
    }
  } else {
    settled = settle_object_pose(geom, j, object, 0.0, params);
  }
  if (!settled) {
    throw Error(ErrorCode::kNoContactAtPosture, "object of width " + fmt_num(object.width) +
                                                    " mm cannot be pinched at this posture");
  }
  const std::vector<ContactPoint> contacts =
      contact_set(geom, j, object, GraspType::kLateral, settled->pose, params);
  if (!touches_both_fingers(contacts)) {
    throw Error(ErrorCode::kNoContactAtPosture, "object is not touched by both fingers at this posture");
  }
  StabilityOptions opt;
  opt.center_of_mass = settled->pose.position;
  opt.gravity = params.gravity;
  auto holds = [&](double m) {
    return quasi_static_stability(contacts, grip_force, m, params.gravity_dir, opt).stable;
  };
  if (!holds(params.mass_tolerance * 1e-3)) return 0.0;
  if (holds(params.max_mass)) return params.max_mass;
  double lo = 0.0, hi = params.max_mass;
  while (hi - lo > params.mass_tolerance) {
    const double m = 0.5 * (lo + hi);
    if (holds(m)) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return lo;
}

}  // namespace plexus
