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

#include "plexus/actuation.hpp"

#include <algorithm>
#include <cmath>

#include "plexus/error.hpp"

namespace plexus {

void ActuatorParams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, std::string("actuator: ") + what);
  };
  need(max_speed > 0.0, "max_speed must be > 0");
  need(free_current > 0.0 && stall_current > 0.0, "currents must be > 0");
  need(free_current < stall_current, "free_current must be below stall_current");
  need(load_gain > 0.0, "load_gain must be > 0");
  need(tick_dt > 0.0 && tick_dt <= 0.05, "tick_dt must lie in (0, 0.05] s");
  need(drivable_force > 0.0, "drivable_force must be > 0");
  need(ramp_ticks >= 1, "ramp_ticks must be >= 1");
  need(stroke_limits.min < stroke_limits.max, "stroke limits must satisfy min < max");
}

double blocked_current(const ActuatorParams& params, int ticks) {
  const double frac = std::min(1.0, static_cast<double>(ticks) / params.ramp_ticks);
  return params.free_current + (params.stall_current - params.free_current) * frac;
}

ActuatorState step_actuator(const ActuatorState& state, const ActuatorParams& params, double external_load,
                            double dt) {
  ActuatorState next = state;
  next.position = std::clamp(state.position, params.stroke_limits.min, params.stroke_limits.max);
  if (!state.target) {
    // Low backdrivability: position holds with no sustained current.
    next.current = 0.0;
    next.blocked = false;
    next.blocked_ticks = 0;
    return next;
  }
  const double goal = std::clamp(*state.target, params.stroke_limits.min, params.stroke_limits.max);
  const double remaining = goal - next.position;
  if (remaining == 0.0) {
    next.current = 0.0;
    next.blocked = false;
    next.blocked_ticks = 0;
    return next;
  }
  const double load = std::max(0.0, external_load);
  if (load > params.drivable_force) {
    next.blocked = true;
    next.blocked_ticks = state.blocked ? state.blocked_ticks + 1 : 1;
    next.current = blocked_current(params, next.blocked_ticks);
    return next;
  }
  const double step = params.max_speed * dt;
  next.position += std::clamp(remaining, -step, step);
  next.position = std::clamp(next.position, params.stroke_limits.min, params.stroke_limits.max);
  next.blocked = false;
  next.blocked_ticks = 0;
  next.current = std::min(params.free_current + params.load_gain * load, params.stall_current);
  return next;
}

}  // namespace plexus
