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

// Hand geometry file format (YAML, units mm / rad, schema_version 1):
//
//   schema_version: 1
//   name: text
//   thumb:
//     axis: [x, y]                 # CM rotation axis
//     actuator_mount: [x, y]       # piston-crank actuator body pivot
//     crank_radius: r
//     rod_length: l
//     reference_stroke: s          # stroke at theta_T = 0
//     tip_offset: {position: [x, y], orientation: a}   # pad centre / normal angle at theta_T = 0
//     pad_half_length: h
//     joint_limits: [min, max]
//     stroke_limits: [min, max]    # optional; defaults to the preimage of joint_limits
//     pregrasp_angle: a            # optional, default 0
//   index:
//     fourbar:                     # always assembled open (C opposite A across BD)
//       crank_pivot: [x, y]
//       rocker_pivot: [x, y]
//       crank_length: a
//       coupler_length: b
//       rocker_length: c
//       open_crank_angle: phi0
//       tip_offset: {position: [x, y], orientation: a}  # in the coupler frame
//     fingertip: {half_length, half_thickness, corner_radius, side_normal_angle, side_offset}
//     stroke_per_rad: k
//     joint_limits: [min, max]
//     stroke_limits: [min, max]

#pragma once

#include <string>

#include "plexus/hand_model.hpp"

namespace plexus {

// Throw Error(kSchemaError) with "<source>:<line>:<col>:" diagnostics, or
// Error(kInvalidGeometry) when the values violate geometric invariants.
HandGeometry parse_geometry(const std::string& text, const std::string& source = "<geometry>");
HandGeometry load_geometry(const std::string& path);

// Canonical serialisation (round-trips through parse_geometry exactly).
std::string geometry_to_yaml(const HandGeometry& geom);

// Hash of the canonical serialisation; identifies the geometry a
// calibration bundle was built for.
std::string geometry_hash(const HandGeometry& geom);

}  // namespace plexus
