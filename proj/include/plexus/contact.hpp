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

// Quasi-static planar contact model for an object pinched between the thumb
// pad and the index fingertip.
//
// Model summary:
//  * Objects are cylinders (disc cross-section) or square prisms. Forces are
//    in N, lengths in mm, masses in g.
//  * The index fingertip is rigid. The thumb pad is treated as compliant:
//    while the object is pressed against the index, "grip resolution"
//    advances the pad along its normal to meet the object (up to
//    `grip_travel`) or lets it yield (up to `pad_compliance`). Outside that
//    window the thumb does not touch the object.
//  * Stability is a linear program: find normal forces (bounded per finger
//    by the grip force plus the share of the weight pressing the object
//    into that finger) and tangential forces that balance gravity and, for
//    the full check, the torque about the centre of mass. The margin is the
//    largest achievable minimum friction-cone slack (mu*f_n - |f_t|),
//    normalised by (grip + weight).

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plexus/geometry.hpp"
#include "plexus/hand_model.hpp"

namespace plexus {

enum class ObjectShape { kCylinder, kSquarePrism };

std::string_view to_string(ObjectShape shape);
// Throws Error(kSchemaError) for unknown names.
ObjectShape object_shape_from_string(std::string_view name);

struct ObjectSpec {
  ObjectShape shape = ObjectShape::kCylinder;
  double width = 0.0;    // mm, diameter or side length
  double height = 120.0; // mm, extent out of the plane (informational)
  double mass = 0.0;     // g
  double mu = 0.5;       // friction coefficient against the fingertips
  std::string label;

  double half_width() const { return 0.5 * width; }
  // Throws Error(kSchemaError) naming the violated invariant.
  void validate() const;
};

enum class Finger { kUnassigned, kThumb, kIndex };

struct ContactPoint {
  Vec2 position;             // palm frame, on the object surface
  Vec2 normal;               // unit, pointing from the finger into the object
  double normal_force = 0.0; // N, filled in by the stability check
  double mu = 0.0;
  Finger finger = Finger::kUnassigned;
};

enum class FailureMode { kNone, kSlip, kRotationEjection, kNoContact };

std::string_view to_string(FailureMode mode);

struct GraspAssessment {
  bool stable = false;
  double margin = -1.0;  // in [-1, mu_max]; stable <=> margin >= 0
  FailureMode failure_mode = FailureMode::kNoContact;
  std::vector<ContactPoint> contacts;  // with the normal forces of the best solution
};

struct PhysicsParams {
  double gravity = 9.81;            // m/s^2
  // Unit, palm frame. Default 220 deg: along the thumb pad at the lateral
  // posture, pressing the object into the pad at the precision posture.
  Vec2 gravity_dir{-0.766044443118978, -0.6427876096865393};
  double contact_tolerance = 0.1;   // mm, touch / interpenetration tolerance
  double pad_compliance = 2.0;      // mm the thumb pad may yield
  double grip_travel = 25.0;        // mm the pad may advance to keep the pinch
  double prism_min_overlap = 1.0;   // mm of prism face that must stay on the pad
  double max_step = 0.05;           // rad, largest joint change between trace steps
  double resettle_step = 0.5;       // mm, grid for the re-settling search
  double max_mass = 10000.0;        // g, upper end of the holdable-mass search
  double mass_tolerance = 0.1;      // g, bisection tolerance
  void validate() const;
};

struct StabilityOptions {
  // Point gravity acts on; defaults to the centroid of the contact points.
  std::optional<Vec2> center_of_mass;
  // false: force balance only (used while fingers are moving, where a
  // torque imbalance re-seats the object instead of ejecting it).
  bool torque_balance = true;
  double gravity = 9.81;
};

// Contacts between the fingers and an object at `object_pose` (palm frame;
// for prisms the orientation is that of the square's local axes).
// Throws Error(kInterpenetration) when the object overlaps the index
// fingertip by more than the tolerance, or the thumb pad by more than the
// pad compliance plus tolerance.
std::vector<ContactPoint> contact_set(const HandGeometry& geom, const JointState& joints,
                                      const ObjectSpec& object, GraspType grasp_type,
                                      const Pose2& object_pose, const PhysicsParams& params = {});

GraspAssessment quasi_static_stability(const std::vector<ContactPoint>& contacts, double grip_force,
                                       double mass_g, Vec2 gravity_dir,
                                       const StabilityOptions& options = {});

// Pinch pose rule: the object lies on the thumb pad (prisms flush, cylinders
// tangent), its centre offset `tangential_offset` mm along the pad tangent
// from the index fingertip centre (clamped so it stays on the pad), and is
// pressed along the pad normal until it touches the index fingertip.
// Returns nullopt when no such pose exists (fingertip out of reach within
// the grip travel, or the pinch would overlap the pad beyond its compliance).
struct SettledPose {
  Pose2 pose;
  double tangential_offset = 0.0;  // after clamping
  double pad_advance = 0.0;        // mm; > 0 pad advanced, < 0 pad yielded
};
std::optional<SettledPose> settle_object_pose(const HandGeometry& geom, const JointState& joints,
                                              const ObjectSpec& object, double tangential_offset,
                                              const PhysicsParams& params = {});

// The pose-rule object placement with the pad rigid (object resting on the
// pad, not pressed): same tangential position as settle_object_pose.
Pose2 resting_object_pose(const HandGeometry& geom, const JointState& joints, const ObjectSpec& object,
                          double tangential_offset, const PhysicsParams& params = {});

// Signed clearance (mm) between the index fingertip and the object at
// resting_object_pose: > 0 open gap, <= 0 the fingers pinch the object.
double pinch_clearance(const HandGeometry& geom, const JointState& joints, const ObjectSpec& object,
                       double tangential_offset, const PhysicsParams& params = {});

// Realised placement perturbation for one trial.
struct PlacementSample {
  double tangential_offset = 0.0;  // mm, object centre relative to the index fingertip
  double tilt = 0.0;               // rad, hand tilt relative to gravity
  double friction_scale = 1.0;     // multiplies the object's mu
};

enum class StepKind { kMotion, kHold };

struct TraceStep {
  JointState joints;
  double grip_force = 0.0;  // N
  StepKind kind = StepKind::kMotion;
};

struct TransitionOutcome {
  bool success = false;
  FailureMode failure_mode = FailureMode::kNone;
  Pose2 final_pose;
  std::size_t failed_step = 0;  // valid when !success
  double min_margin = 0.0;      // smallest margin seen over the checked steps
  bool shifted = false;         // the object re-settled at least once
};

// Steps the object through a controller trace. Motion steps use the
// force-only check (re-settling along the pad when it fails), hold steps and
// the final step use the full force/torque check.
// Throws Error(kInvalidTrace) for empty traces, joint jumps above
// params.max_step, or joints outside their limits.
TransitionOutcome simulate_transition(const HandGeometry& geom, const std::vector<TraceStep>& trace,
                                      const ObjectSpec& object, const PlacementSample& placement,
                                      const PhysicsParams& params = {});

// Largest mass (g) held at `posture` with the given grip, object centred on
// the index fingertip. With index support the index is moved onto the thumb
// line of action for posture.theta_T; without it stays at posture.theta_I.
// Throws Error(kNoContactAtPosture) when the object cannot be pinched there.
double max_holdable_mass(const HandGeometry& geom, const JointState& posture, const ObjectSpec& object,
                         double grip_force, bool with_index_support, const PhysicsParams& params = {});

}  // namespace plexus
