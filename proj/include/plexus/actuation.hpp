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

// Discrete-time linear actuator: position control with bounded speed, a
// load-dependent current signal that ramps to stall when motion is blocked,
// and no backdrivability (a holding actuator keeps its position at zero
// current whatever the load).

#pragma once

#include <optional>

#include "plexus/hand_model.hpp"

namespace plexus {

struct ActuatorParams {
  double max_speed = 30.0;        // mm/s
  double free_current = 100.0;    // mA, current while moving unloaded
  double load_gain = 20.0;        // mA per N of opposing load while moving
  double stall_current = 600.0;   // mA
  double tick_dt = 0.01;          // s (100 Hz)
  double drivable_force = 7.0;    // N; larger opposing loads block the motion
  int ramp_ticks = 3;             // ticks from block onset to stall current
  Interval stroke_limits{0.0, 1.0};  // mm

  // Throws Error(kInvalidConfig) naming the violated invariant.
  void validate() const;
};

struct ActuatorState {
  double position = 0.0;          // mm
  std::optional<double> target;   // mm; absent = holding
  double current = 0.0;           // mA
  bool blocked = false;
  int blocked_ticks = 0;          // consecutive ticks spent blocked
};

// Advances one tick. `external_load` (N, >= 0) opposes the commanded motion.
ActuatorState step_actuator(const ActuatorState& state, const ActuatorParams& params, double external_load,
                            double dt);

// Current after `ticks` blocked ticks: free + (stall - free) * min(1, ticks / ramp_ticks).
double blocked_current(const ActuatorParams& params, int ticks);

}  // namespace plexus
