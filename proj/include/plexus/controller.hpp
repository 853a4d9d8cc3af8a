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

// Finite-state controller for precision <-> lateral in-hand manipulation.
//
// Closed loop (current feedback):
//   Idle --PrecisionGrasp--> S1_Closing: thumb to theta_T,P, index closes
//     until I_I > I_I_th for debounce_ticks readings; the index stops, the
//     contact angle theta_I,c is recorded and w_hat = f(theta_I,c).
//   HoldPrecision --TransitionToLateral--> S2_ThumbSweep (thumb to
//     g(w_hat)) -> S2_IndexReposition (index to theta_I,L,fixed; skipped
//     when index coordination is disabled) -> S2_FinalClosure (thumb closes
//     until I_T > I_T_th, debounced) -> HoldLateral.
//   HoldLateral --TransitionToPrecision--> LP_IndexReposition (index opens
//     to f^-1(w_hat); skipped without coordination) -> LP_ThumbSweep (thumb
//     to theta_T,P) -> HoldPrecisionFromLP. No final closure and no I_T
//     monitoring on this path.
//   Idle --LateralGrasp--> S1_Closing: thumb opens to the lateral open
//     angle, index moves to theta_I,L,fixed, then the thumb closes until
//     I_T > I_T_th; w_hat = g^-1(theta_T,c) -> HoldLateral.
//   Open (Idle or a hold phase) / Release (a hold phase) -> Opening -> Idle.
//
// Open loop (legacy): same graph, but every stop is a position target from
// the configured width (f'(w) = solve_index_contact_angle, g'(w) = thumb
// angle whose lateral fingertip gap equals w) and no current is monitored.
// The final closure is a timed squeeze.
//
// Targets are actuator strokes (mm); an absent target means "hold" (the
// drives are not backdrivable). Commands that do not apply to the current
// phase are rejected with an event and leave the phase unchanged.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plexus/calibration.hpp"
#include "plexus/hand_model.hpp"

namespace plexus {

enum class Phase {
  kIdle,
  kS1Closing,
  kHoldPrecision,
  kS2ThumbSweep,
  kS2IndexReposition,
  kS2FinalClosure,
  kHoldLateral,
  kLPThumbSweep,
  kLPIndexReposition,
  kHoldPrecisionFromLP,
  kOpening,
};
inline constexpr int kPhaseCount = 11;

std::string_view to_string(Phase phase);
// Throws Error(kCorruptLog) for unknown names.
Phase phase_from_string(std::string_view name);
// True when `to` may follow `from` in one tick (staying put is always legal).
bool is_valid_transition(Phase from, Phase to);
bool is_hold_phase(Phase phase);

enum class Command { kOpen, kPrecisionGrasp, kLateralGrasp, kTransitionToLateral, kTransitionToPrecision, kRelease };
std::string_view to_string(Command command);
// Throws Error(kSchemaError) for unknown names.
Command command_from_string(std::string_view name);

enum class ControlMode { kClosedLoop, kOpenLoop };

struct ControllerConfig {
  double I_I_th = 300.0;  // mA
  double I_T_th = 400.0;  // mA
  double theta_T_P = 0.0;
  double theta_I_L_fixed = 0.0;
  int debounce_ticks = 2;
  ControlMode mode = ControlMode::kClosedLoop;
  bool index_coordination = true;
  std::optional<double> open_loop_width;  // mm, required in open loop
  // Thumb angle the hand opens to before a lateral grasp from rest.
  double lateral_open_angle = 1.396;
  double position_tolerance = 1e-4;  // rad, "target reached"
  int motion_timeout_ticks = 600;    // budget for any positioning phase
  int closure_timeout_ticks = 300;   // budget for current-threshold closures
  int open_loop_squeeze_ticks = 10;  // duration of the open-loop final closure

  // Throws Error(kInvalidConfig); thresholds must lie strictly between the
  // free and stall currents.
  void validate(double free_current, double stall_current) const;
};

// Copies theta_T,P and theta_I,L,fixed from a calibration bundle.
ControllerConfig make_controller_config(const CalibrationBundle& bundle);

enum class GraspKind { kPrecision, kLateral };

struct ControllerState {
  Phase phase = Phase::kIdle;
  std::optional<double> theta_I_c;  // recorded contact angle
  std::optional<double> theta_T_c;  // thumb angle at lateral contact
  std::optional<double> w_hat;      // mm
  bool clamped_estimate = false;
  std::uint64_t tick = 0;
  int phase_ticks = 0;       // ticks spent in the current phase
  int debounce_count = 0;    // consecutive super-threshold readings
  GraspKind grasp = GraspKind::kPrecision;
  int stage = 0;             // sub-step of a lateral S1 closing
  std::optional<double> thumb_goal;  // rad, goal of the current thumb motion
  std::optional<double> index_goal;  // rad, goal of the current index motion
};

struct Sensors {
  double theta_T = 0.0;  // rad
  double theta_I = 0.0;  // rad
  double I_T = 0.0;      // mA
  double I_I = 0.0;      // mA
};

enum class EventType {
  kCommandAccepted,
  kCommandRejected,
  kContactDetected,
  kWidthEstimated,
  kEstimateClamped,
  kClosureStarted,
  kClosureComplete,
  kClosureTimeout,
  kMotionTimeout,
  kNoObject,
};
std::string_view to_string(EventType type);
EventType event_type_from_string(std::string_view name);

struct Event {
  EventType type = EventType::kCommandAccepted;
  std::string detail;               // command name, phase, ...
  std::optional<double> value;      // angle / width / current, when relevant
};

struct ControlOutput {
  std::optional<double> thumb_stroke;  // mm; nullopt = hold
  std::optional<double> index_stroke;
  std::vector<Event> events;
};

struct ControllerStep {
  ControllerState state;
  ControlOutput output;
};

// Dispatches on config.mode. Closed loop requires a bundle
// (Error(kCalibrationMissing) otherwise).
ControllerStep controller_step(const ControllerState& state, const ControllerConfig& config,
                               const CalibrationBundle* bundle, const HandGeometry& geom, const Sensors& sensors,
                               std::optional<Command> command);

// Legacy position-only mode. Throws Error(kMissingWidth) when
// config.open_loop_width is unset.
ControllerStep open_loop_step(const ControllerState& state, const ControllerConfig& config,
                              const HandGeometry& geom, const Sensors& sensors, std::optional<Command> command);

// g'(w): thumb angle at which the lateral fingertip gap (index at
// theta_I) equals w. Throws Error(kWidthUnreachable).
double lateral_thumb_angle_for_width(const HandGeometry& geom, double theta_I, double width);

// f^-1 of a width table: the contact angle interpolated for width w
// (clamped to the table range).
Lookup contact_angle_for_width(const WidthTable& table, double width);

// One line of the per-tick event log (JSON object, no trailing newline):
// {"tick":N,"phase":"...","command":null|"...","sensors":{"theta_T":..,
//  "theta_I":..,"I_T":..,"I_I":..},"targets":{"thumb":null|mm,"index":null|mm},
//  "w_hat":null|mm,"events":[{"type":"...","detail":"...","value":..}]}
// "phase" is the phase after the step.
std::string log_record(const ControllerState& after, const Sensors& sensors, std::optional<Command> command,
                       const ControlOutput& output);

struct LogRecord {
  std::uint64_t tick = 0;
  Phase phase = Phase::kIdle;
  std::optional<Command> command;
  Sensors sensors;
  std::optional<double> thumb_target;
  std::optional<double> index_target;
  std::optional<double> w_hat;
  std::vector<Event> events;
};
// Throws Error(kCorruptLog) naming the line on malformed input.
std::vector<LogRecord> parse_log(const std::string& text);

}  // namespace plexus
