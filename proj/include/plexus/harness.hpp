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

// Manipulation trial protocol:
//   S1 open the hand; S2 initial grasp through the controller (Stage 1 with
//   contact detection); S3 sample placement noise and check the initial
//   grasp (re-sampled up to max_resamples times, then a setup failure);
//   S4 issue the transition command, record the joint/grip trace and step
//   the object through it; S5 release.
//
// The plant couples the controller to the actuators: before the pinch the
// object rests on the thumb pad under the index fingertip and a closing
// finger stops when it reaches it (blocked actuator, current ramps to
// stall); during the transition phases the pad compliance keeps the pinch;
// the final closure is blocked immediately while the object is pinched.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plexus/actuation.hpp"
#include "plexus/calibration.hpp"
#include "plexus/contact.hpp"
#include "plexus/controller.hpp"

namespace plexus {

enum class Condition { kPLWithIndex, kPLWithoutIndex, kLPWithIndex };
std::string_view to_string(Condition c);
// Throws Error(kSchemaError).
Condition condition_from_string(std::string_view name);

struct PlacementNoise {
  double position_sigma = 1.0;                          // mm
  double orientation_sigma = 2.0 * std::numbers::pi / 180.0;  // rad
  double friction_sigma = 0.10;                         // relative
  double truncation = 3.0;  // samples are clipped to +-truncation sigma
  void validate() const;
};

struct TrialSpec {
  ObjectSpec object;
  std::string material;
  Condition condition = Condition::kPLWithIndex;
  int trials = 10;
  PlacementNoise noise;
  std::uint64_t seed = 0;
  void validate() const;
};

enum class TrialFailure { kNone, kSlip, kRotationEjection, kNoContact, kSetupFailure, kControllerFault };
inline constexpr int kTrialFailureCount = 6;
std::string_view to_string(TrialFailure f);
TrialFailure trial_failure_from(FailureMode mode);

struct HarnessParams {
  PhysicsParams physics;
  ActuatorParams thumb_actuator;  // stroke limits are taken from the geometry
  ActuatorParams index_actuator;
  ControllerConfig controller;    // postures are taken from the bundle
  double preload = 6.0;           // N, grip while fingers move with the object
  double grip = 7.0;              // N, grip after a current-threshold closure
  int max_resamples = 5;
  int max_ticks = 5000;           // per protocol stage
  void validate() const;
};

struct TrialResult {
  bool success = false;
  TrialFailure failure = TrialFailure::kNone;
  double w_hat = 0.0;
  double w_error = 0.0;  // |w_hat - width|
  bool clamped_estimate = false;
  std::uint64_t seed = 0;
  int trial_index = 0;
  int resamples = 0;
  PlacementSample placement;
  std::size_t trace_steps = 0;
  std::size_t failed_step = 0;
  double min_margin = 0.0;
  std::vector<std::string> log;  // JSONL records, filled when requested
};

// Per-trial random stream seed: FNV-1a of (seed, label, condition, index).
std::uint64_t trial_stream_seed(std::uint64_t seed, const std::string& label, Condition c, int trial_index);

// Throws Error(kSetupFailure) when no stable initial grasp was found and
// Error(kConfigMismatch) when the bundle does not belong to `geom`.
TrialResult run_trial(const TrialSpec& spec, const HandGeometry& geom, const CalibrationBundle& bundle,
                      const HarnessParams& params, int trial_index, bool record_log = false);

struct SuiteRow {
  std::string label;
  ObjectShape shape = ObjectShape::kCylinder;
  double width = 0.0;
  std::string material;
  double mass = 0.0;
  Condition condition = Condition::kPLWithIndex;
  int trials = 0;
  int successes = 0;
  double mean_abs_w_error = 0.0;
  std::array<int, kTrialFailureCount> failures{};
  double success_rate() const { return trials > 0 ? 100.0 * successes / trials : 0.0; }
};

struct SuiteReport {
  std::vector<SuiteRow> rows;  // in first-appearance order of (label, condition)
  std::vector<std::uint64_t> seeds;
};

// Runs every trial of every spec on `jobs` threads (0 = hardware
// concurrency). Setup failures are counted as failed trials. The report
// does not depend on `jobs` or scheduling.
SuiteReport run_suite(const std::vector<TrialSpec>& specs, const HandGeometry& geom,
                      const CalibrationBundle& bundle, const HarnessParams& params, unsigned jobs = 0);

}  // namespace plexus
