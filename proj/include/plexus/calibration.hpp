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

// Lookup tables used by the current-feedback controller:
//   f: contact angle theta_I,c -> object width   (WidthTable)
//   g: object width -> lateral thumb angle theta_T,L   (LateralAngleTable)
// plus the fixed lateral index angle, bundled with the geometry hash they
// were built for.

#pragma once

#include <string>
#include <vector>

#include "plexus/contact.hpp"
#include "plexus/hand_model.hpp"

namespace plexus {

struct WidthEntry {
  double theta_I_c = 0.0;  // rad
  double width = 0.0;      // mm
};

struct WidthTable {
  double theta_T_P = 0.0;
  std::vector<WidthEntry> entries;  // increasing angle, decreasing width
  double offset_correction = 0.0;   // mm, added to every estimate

  // Throws Error(kInsufficientEntries) / Error(kInvalidConfig).
  void validate() const;
};

struct LateralEntry {
  double width = 0.0;      // mm
  double theta_T_L = 0.0;  // rad
};

struct LateralAngleTable {
  std::vector<LateralEntry> entries;  // increasing width
  void validate(const HandGeometry& geom) const;
};

// Interpolated lookup with the clamp-with-flag policy.
struct Lookup {
  double value = 0.0;
  bool clamped = false;
};

WidthTable build_width_table(const HandGeometry& geom, double theta_T_P, const std::vector<double>& width_grid,
                             double offset_correction = 0.0);
Lookup estimate_width(const WidthTable& table, double theta_I_c);

// Reference model used to rank lateral thumb angles: a massless square
// prism of the grid width resting flush on the rigid thumb pad, centred on
// the index fingertip, with the index at `theta_I_L_fixed`.
struct LateralTableOptions {
  double theta_I_L_fixed = 0.0;
  double sample_step = 0.002;  // rad
  double reference_grip = 1.0; // N (the margin is normalised, so only its sign matters)
  double reference_mu = 0.5;
  PhysicsParams physics;
};

// Lateral-grasp stability margin of the reference model at thumb angle
// theta_T; nullopt when the prism does not touch both fingers there (or
// would interpenetrate the fingertip).
std::optional<double> lateral_reference_margin(const HandGeometry& geom, double width, double theta_T,
                                               const LateralTableOptions& options);

// theta_T,L(w) = argmax of lateral_reference_margin over the thumb joint
// range sampled every options.sample_step from its lower limit; ties go to
// the smaller angle. Throws Error(kNoStableAngle) when no sample has a
// non-negative margin, Error(kInsufficientEntries) for an empty grid.
LateralAngleTable build_lateral_table(const HandGeometry& geom, const std::vector<double>& width_grid,
                                      const LateralTableOptions& options);
Lookup lookup_lateral_angle(const LateralAngleTable& table, double w_hat);
// Inverse of the table (thumb angle -> width); requires strictly increasing
// angles. Used to estimate the width of an object grasped laterally from
// rest.
Lookup lateral_width_from_angle(const LateralAngleTable& table, double theta_T);

// Index angle whose fingertip centre lies on the thumb line of action at the
// middle of `lateral_posture_range` (thumb angles). Throws
// Error(kNoIntersectionInRange).
double compute_fixed_index_angle(const HandGeometry& geom, const Interval& lateral_posture_range);

struct CalibrationParams {
  std::vector<double> width_grid{5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  std::vector<double> lateral_grid{5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  Interval lateral_posture_range{0.0, 1.396};
  double offset_correction = 0.0;
  double sample_step = 0.002;
  void validate() const;
};

struct CalibrationBundle {
  static constexpr int kSchemaVersion = 1;
  WidthTable width_table;
  LateralAngleTable lateral_table;
  double theta_T_P = 0.0;
  double theta_I_L_fixed = 0.0;
  std::string geometry_hash;
  CalibrationParams params;

  // Throws Error(kConfigMismatch) when built for a different geometry.
  void check_geometry(const HandGeometry& geom) const;
};

CalibrationBundle build_calibration(const HandGeometry& geom, const CalibrationParams& params = {});

std::string bundle_to_yaml(const CalibrationBundle& bundle);
CalibrationBundle parse_bundle(const std::string& text, const std::string& source = "<bundle>");
CalibrationBundle load_bundle(const std::string& path);
// Loads and checks the geometry hash (Error(kConfigMismatch) on mismatch).
CalibrationBundle load_bundle(const std::string& path, const HandGeometry& geom);

}  // namespace plexus
