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

// Planar kinematics of the thumb (single CM axis, piston-crank drive) and the
// index finger (four-bar linkage), plus the fingertip-gap geometry used for
// width estimation.
//
// Conventions:
//  * theta_T rotates the thumb counter-clockwise about `thumb_axis`; the
//    thumb link frame coincides with the palm frame at theta_T = 0.
//  * theta_I = 0 is the fully open index; flexion turns the four-bar crank
//    clockwise (crank angle = open_crank_angle - theta_I).
//  * The index fingertip is a rounded convex core swept by a disc of
//    `corner_radius`. The core is a rectangle in the fingertip frame whose
//    lower front corner is cut by the side plane; the pad face is the local
//    -y face (precision contacts) and the side plane carries lateral
//    contacts.
//  * The four-bar is always assembled in the open (non-crossed) mode: the
//    coupler/rocker joint C lies on the opposite side of diagonal BD from A.

#pragma once

#include <string>
#include <vector>

#include "plexus/geometry.hpp"

namespace plexus {

struct Interval {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v, double tol = 0.0) const { return v >= min - tol && v <= max + tol; }
  double span() const { return max - min; }
};

struct PistonCrank {
  Vec2 actuator_mount;          // pivot of the actuator body, palm frame
  double crank_radius = 0.0;    // axis to crank pin
  double rod_length = 0.0;      // piston pin to crank pin
  double reference_stroke = 0.0;  // stroke at which theta_T = 0
};

struct FourBar {
  Vec2 crank_pivot;   // A, driven
  Vec2 rocker_pivot;  // D
  double crank_length = 0.0;    // |AB|
  double coupler_length = 0.0;  // |BC|
  double rocker_length = 0.0;   // |DC|
  double open_crank_angle = 0.0;  // direction of AB at theta_I = 0
  Pose2 tip_offset;  // fingertip centre in the coupler frame (origin B, x along BC)
};

struct FingertipShape {
  double half_length = 0.0;     // core half extent along the fingertip x axis
  double half_thickness = 0.0;  // core half extent along the fingertip y axis
  double corner_radius = 0.0;
  // Side plane: outward normal direction (fingertip frame, must point into
  // the open quadrant between +x and -y) and its distance from the fingertip
  // centre. It has to cut the (+x, -y) corner of the core rectangle.
  double side_normal_angle = -std::numbers::pi / 4.0;
  double side_offset = 0.0;
};

struct HandGeometry {
  int schema_version = 1;
  std::string name;

  Vec2 thumb_axis;
  PistonCrank thumb_drive;
  Pose2 thumb_tip_offset;  // pad centre and outward pad normal at theta_T = 0
  double thumb_pad_half_length = 0.0;

  FourBar index_fourbar;
  FingertipShape index_tip;
  double index_stroke_per_rad = 0.0;  // linear lever of the index actuator

  Interval thumb_limits;   // rad
  Interval index_limits;   // rad
  Interval thumb_stroke;   // mm
  Interval index_stroke;   // mm

  // Default pre-grasp thumb angle. Calibration bundles record the value they
  // were built with; the controller reads it from the bundle.
  double pregrasp_thumb_angle = 0.0;

  // Throws Error(kInvalidGeometry) describing the first violated invariant.
  void validate() const;
};

enum class GraspType { kPrecision, kLateral };

struct JointState {
  double theta_T = 0.0;
  double theta_I = 0.0;
  double theta_M = 0.0;   // middle finger, mirrors the index drive
  double theta_RL = 0.0;  // ring/little differential, passive
};

// Built-in non-physical geometry scaled to an adult-size hand.
HandGeometry default_geometry();

double thumb_angle_from_stroke(const HandGeometry& geom, double stroke);
double stroke_from_thumb_angle(const HandGeometry& geom, double angle);
double index_angle_from_stroke(const HandGeometry& geom, double stroke);
double stroke_from_index_angle(const HandGeometry& geom, double angle);

Pose2 thumb_fingertip_pose(const HandGeometry& geom, double theta_T);
Pose2 index_fingertip_pose(const HandGeometry& geom, double theta_I);

// Thumb grasp surface as a segment plus inward normal (pointing from the pad
// towards the grasped object).
struct GraspSurface {
  Segment segment;
  Vec2 normal;
  Vec2 center;
};
GraspSurface thumb_pad_surface(const HandGeometry& geom, double theta_T);

// Core polygon of the index fingertip (before corner rounding), counter-
// clockwise, in the palm frame.
ConvexPolygon index_tip_core(const HandGeometry& geom, double theta_I);

// Index grasp surface for the given grasp type: the pad face (precision) or
// the side plane (lateral), as a core edge plus outward normal. Contact with
// it happens `corner_radius` outside the edge.
GraspSurface index_grasp_surface(const HandGeometry& geom, double theta_I, GraspType type);

// Index angles at which the fingertip centre lies on the thumb line of
// action (the pad normal through the pad centre) for thumb angle `theta_T`,
// in increasing order. The fingertip travels on an arc, so there can be two.
std::vector<double> index_angles_on_thumb_line(const HandGeometry& geom, double theta_T);

// The most flexed of index_angles_on_thumb_line. Throws
// Error(kNoIntersectionInRange) when there is none within the index limits.
double index_angle_on_thumb_line(const HandGeometry& geom, double theta_T);

double fingertip_gap(const HandGeometry& geom, double theta_T, double theta_I, GraspType type);

double solve_index_contact_angle(const HandGeometry& geom, double theta_T_P, double width);

}  // namespace plexus
