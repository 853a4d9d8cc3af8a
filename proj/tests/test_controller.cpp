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

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plexus/actuation.hpp"
#include "plexus/calibration.hpp"
#include "plexus/controller.hpp"
#include "test_util.hpp"

using namespace plexus;
using testutil::error_code_of;
using P = Phase;

namespace {

struct Fixture {
  HandGeometry geom = default_geometry();
  CalibrationBundle bundle = build_calibration(geom);
  ControllerConfig config = make_controller_config(bundle);

  double contact_angle(double w) const { return solve_index_contact_angle(geom, bundle.theta_T_P, w); }
  double lateral_angle(double w) const { return lookup_lateral_angle(bundle.lateral_table, w).value; }
};

bool has_event(const std::vector<Event>& events, EventType t) {
  return std::any_of(events.begin(), events.end(), [&](const Event& e) { return e.type == t; });
}

int count_event(const std::vector<Event>& events, EventType t) {
  return static_cast<int>(std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.type == t; }));
}

// Runs a precision grasp of a `width` object from rest.
oracle::ScriptedRun grasp_precision(const Fixture& f, const ControllerConfig& cfg, oracle::ScriptedHand& hand,
                                    double width) {
  oracle::ScriptedRun run;
  oracle::run_command(run, hand, cfg, &f.bundle, f.geom, Command::kOpen, P::kIdle);
  hand.index_block = f.contact_angle(width);
  oracle::run_command(run, hand, cfg, &f.bundle, f.geom, Command::kPrecisionGrasp, P::kHoldPrecision);
  hand.index_block.reset();  // the object now moves with the fingers
  return run;
}

// Feeds `currents` (on the index or thumb channel) to a controller sitting
// in `state`; returns the number of readings consumed before the phase left
// state.phase, or -1.
int ticks_to_trigger(const Fixture& f, ControllerState state, const std::vector<double>& currents, bool thumb,
                     const ControllerConfig& cfg) {
  const Phase start = state.phase;
  for (std::size_t i = 0; i < currents.size(); ++i) {
    Sensors s{state.thumb_goal.value_or(0.0) + 0.3, 0.2, 0.0, 0.0};
    (thumb ? s.I_T : s.I_I) = currents[i];
    state = controller_step(state, cfg, &f.bundle, f.geom, s, std::nullopt).state;
    if (state.phase != start) return static_cast<int>(i) + 1;
  }
  return -1;
}

ControllerState in_s1_closing(const Fixture& f) {
  return controller_step({}, f.config, &f.bundle, f.geom, {}, Command::kPrecisionGrasp).state;
}

ControllerState in_final_closure(const Fixture& f) {
  ControllerState s;
  s.phase = P::kS2FinalClosure;
  s.w_hat = 20.0;
  s.thumb_goal = f.geom.thumb_limits.min;
  return s;
}

}  // namespace

TEST_SUITE("controller") {
  TEST_CASE("PL with index coordination follows Stage 1 then Stage 2 items 1-5") {
    Fixture f;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run = grasp_precision(f, f.config, hand, 20.0);
    REQUIRE(run.state.phase == P::kHoldPrecision);
    REQUIRE(run.state.w_hat.has_value());
    CHECK(std::abs(*run.state.w_hat - 20.0) <= 1e-6);
    CHECK(std::abs(*run.state.theta_I_c - f.contact_angle(20.0)) <= 1e-12);
    hand.thumb_block = f.lateral_angle(20.0);
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kTransitionToLateral, P::kHoldLateral);
    const std::vector<Phase> expected = {P::kOpening,       P::kIdle,           P::kS1Closing,
                                         P::kHoldPrecision, P::kS2ThumbSweep,   P::kS2IndexReposition,
                                         P::kS2FinalClosure, P::kHoldLateral};
    CHECK(run.phases == expected);
    CHECK(run.off_graph == 0);
    CHECK(count_event(run.events, EventType::kContactDetected) == 1);
    CHECK(has_event(run.events, EventType::kClosureComplete));
    CHECK(std::abs(hand.theta_I - f.bundle.theta_I_L_fixed) <= f.config.position_tolerance);
    CHECK(std::abs(hand.theta_T - f.lateral_angle(20.0)) <= 1e-9);
  }

  TEST_CASE("PL without index coordination skips the index reposition") {
    Fixture f;
    ControllerConfig cfg = f.config;
    cfg.index_coordination = false;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run = grasp_precision(f, cfg, hand, 12.0);
    hand.thumb_block = f.lateral_angle(*run.state.w_hat);
    oracle::run_command(run, hand, cfg, &f.bundle, f.geom, Command::kTransitionToLateral, P::kHoldLateral);
    const std::vector<Phase> expected = {P::kOpening,       P::kIdle,         P::kS1Closing,     P::kHoldPrecision,
                                         P::kS2ThumbSweep, P::kS2FinalClosure, P::kHoldLateral};
    CHECK(run.phases == expected);
    CHECK(std::find(run.phases.begin(), run.phases.end(), P::kS2IndexReposition) == run.phases.end());
    CHECK(std::abs(hand.theta_I - f.contact_angle(12.0)) <= 1e-9);  // index never moved
  }

  TEST_CASE("LP mirrors Stage 2 without a final closure") {
    Fixture f;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run;
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kOpen, P::kIdle);
    hand.thumb_block = f.lateral_angle(20.0);
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kLateralGrasp, P::kHoldLateral);
    REQUIRE(run.state.phase == P::kHoldLateral);
    CHECK(std::abs(*run.state.w_hat - 20.0) <= 1e-6);
    hand.thumb_block.reset();
    const std::size_t lp_start = run.events.size();
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kTransitionToPrecision,
                        P::kHoldPrecisionFromLP);
    const std::vector<Phase> expected = {P::kOpening,     P::kIdle,           P::kS1Closing,
                                         P::kHoldLateral, P::kLPIndexReposition, P::kLPThumbSweep,
                                         P::kHoldPrecisionFromLP};
    CHECK(run.phases == expected);
    CHECK(std::find(run.phases.begin(), run.phases.end(), P::kS2FinalClosure) == run.phases.end());
    const std::vector<Event> lp_events(run.events.begin() + static_cast<long>(lp_start), run.events.end());
    CHECK_FALSE(has_event(lp_events, EventType::kClosureStarted));
    CHECK(std::abs(hand.theta_T - f.bundle.theta_T_P) <= f.config.position_tolerance);
    CHECK(std::abs(hand.theta_I - f.contact_angle(20.0)) <= 1e-6);
  }

  TEST_CASE("LP without coordination goes straight to the thumb sweep") {
    Fixture f;
    ControllerConfig cfg = f.config;
    cfg.index_coordination = false;
    ControllerState s;
    s.phase = P::kHoldLateral;
    s.w_hat = 15.0;
    const ControllerStep step = controller_step(s, cfg, &f.bundle, f.geom, {}, Command::kTransitionToPrecision);
    CHECK(step.state.phase == P::kLPThumbSweep);
  }

  TEST_CASE("contact detection needs debounce_ticks consecutive readings above I_I,th") {
    Fixture f;
    const ControllerState s = in_s1_closing(f);
    CHECK(ticks_to_trigger(f, s, {250, 301, 250, 301, 301, 0}, false, f.config) == 5);
    CHECK(ticks_to_trigger(f, s, std::vector<double>(20, 300.0), false, f.config) == -1);  // strict >
    CHECK(ticks_to_trigger(f, s, {5000, 0, 0, 0, 0}, false, f.config) == -1);            // single spike
    CHECK(ticks_to_trigger(f, s, {301, 0, 301, 0, 301, 0, 301}, false, f.config) == -1);
    ControllerConfig three = f.config;
    three.debounce_ticks = 3;
    CHECK(ticks_to_trigger(f, s, {301, 301, 0, 301, 301, 301}, false, three) == 6);
    // The thumb channel does not trigger the index contact.
    CHECK(ticks_to_trigger(f, s, {600, 600, 600}, true, f.config) == -1);
  }

  TEST_CASE("final closure stops only after debounced I_T above I_T,th") {
    Fixture f;
    const ControllerState s = in_final_closure(f);
    CHECK(ticks_to_trigger(f, s, {450, 0, 450, 450}, true, f.config) == 4);
    CHECK(ticks_to_trigger(f, s, std::vector<double>(20, 400.0), true, f.config) == -1);
    CHECK(ticks_to_trigger(f, s, {9000, 0, 0, 0}, true, f.config) == -1);
    CHECK(ticks_to_trigger(f, s, {600, 600, 600}, false, f.config) == -1);  // index current ignored
  }

  TEST_CASE("contact is detected debounce ticks after the actuator blocks") {
    Fixture f;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run;
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kOpen, P::kIdle);
    hand.index_block = f.contact_angle(25.0);
    ControllerState s = run.state;
    std::optional<Command> cmd = Command::kPrecisionGrasp;
    int first_blocked = -1, detected = -1;
    for (int tick = 0; tick < 500 && detected < 0; ++tick) {
      const ControllerStep step = controller_step(s, f.config, &f.bundle, f.geom, hand.sensors(), cmd);
      cmd.reset();
      s = step.state;
      if (s.phase == P::kHoldPrecision) detected = tick;
      hand.apply(step.output);
      if (first_blocked < 0 && hand.sensors().I_I > ActuatorParams{}.free_current) first_blocked = tick;
    }
    REQUIRE(first_blocked >= 0);
    // Readings: 266.7 (below), 433.3, 600 -> the second super-threshold one fires.
    CHECK(blocked_current(ActuatorParams{}, 1) < f.config.I_I_th);
    CHECK(detected == first_blocked + 3);
  }

  TEST_CASE("commands outside their phase are rejected without a transition") {
    Fixture f;
    const ControllerStep a = controller_step({}, f.config, &f.bundle, f.geom, {}, Command::kTransitionToLateral);
    CHECK(a.state.phase == P::kIdle);
    CHECK(has_event(a.output.events, EventType::kCommandRejected));
    ControllerState s = in_s1_closing(f);
    const ControllerStep b = controller_step(s, f.config, &f.bundle, f.geom, {}, Command::kRelease);
    CHECK(b.state.phase == P::kS1Closing);
    CHECK(has_event(b.output.events, EventType::kCommandRejected));
  }

  TEST_CASE("release opens the hand from a hold phase") {
    Fixture f;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run = grasp_precision(f, f.config, hand, 20.0);
    oracle::run_command(run, hand, f.config, &f.bundle, f.geom, Command::kRelease, P::kIdle);
    CHECK(run.phases.back() == P::kIdle);
    CHECK(run.phases[run.phases.size() - 2] == P::kOpening);
  }

  TEST_CASE("closure timeout is reported instead of hanging") {
    Fixture f;
    ControllerState s = in_final_closure(f);
    ControllerStep step{s, {}};
    for (int i = 0; i < f.config.closure_timeout_ticks + 1 && step.state.phase == P::kS2FinalClosure; ++i) {
      step = controller_step(step.state, f.config, &f.bundle, f.geom, {0.1, 0.2, 150.0, 0.0}, std::nullopt);
    }
    CHECK(step.state.phase == P::kHoldLateral);
    CHECK(has_event(step.output.events, EventType::kClosureTimeout));
  }

  TEST_CASE("closed loop needs a calibration; open loop needs a width") {
    Fixture f;
    CHECK(error_code_of([&] { controller_step({}, f.config, nullptr, f.geom, {}, Command::kPrecisionGrasp); }) ==
          ErrorCode::kCalibrationMissing);
    ControllerConfig open = f.config;
    open.mode = ControlMode::kOpenLoop;
    CHECK(error_code_of([&] { open_loop_step({}, open, f.geom, {}, Command::kPrecisionGrasp); }) ==
          ErrorCode::kMissingWidth);
  }

  TEST_CASE("open loop stops at the configured width and never reads currents") {
    Fixture f;
    ControllerConfig open = f.config;
    open.mode = ControlMode::kOpenLoop;
    open.open_loop_width = 20.0;
    // Actual object 10 mm: the index stops at f'(20) and never reaches it.
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run;
    oracle::run_command(run, hand, open, nullptr, f.geom, Command::kOpen, P::kIdle);
    hand.index_block = f.contact_angle(10.0);
    oracle::run_command(run, hand, open, nullptr, f.geom, Command::kPrecisionGrasp, P::kHoldPrecision);
    REQUIRE(run.state.phase == P::kHoldPrecision);
    CHECK(*run.state.w_hat == 20.0);
    CHECK_FALSE(run.state.theta_I_c.has_value());
    CHECK(std::abs(hand.theta_I - f.contact_angle(20.0)) <= open.position_tolerance);
    CHECK(hand.theta_I < *hand.index_block);  // stopped short of the object
    CHECK(hand.sensors().I_I < open.I_I_th);
    // The timed squeeze ends the final closure regardless of the current.
    hand.index_block.reset();
    oracle::run_command(run, hand, open, nullptr, f.geom, Command::kTransitionToLateral, P::kHoldLateral);
    CHECK(run.state.phase == P::kHoldLateral);
    CHECK(run.off_graph == 0);
  }

  TEST_CASE("open loop with an undersized configured width times out against the object") {
    Fixture f;
    ControllerConfig open = f.config;
    open.mode = ControlMode::kOpenLoop;
    open.open_loop_width = 10.0;
    oracle::ScriptedHand hand(f.geom);
    oracle::ScriptedRun run;
    oracle::run_command(run, hand, open, nullptr, f.geom, Command::kOpen, P::kIdle);
    hand.index_block = f.contact_angle(20.0);
    oracle::run_command(run, hand, open, nullptr, f.geom, Command::kPrecisionGrasp, P::kHoldPrecision);
    CHECK(has_event(run.events, EventType::kMotionTimeout));
    CHECK(run.state.phase == P::kHoldPrecision);
  }

  TEST_CASE("random commands and sensors never leave the transition graph") {
    Fixture f;
    for (ControlMode mode : {ControlMode::kClosedLoop, ControlMode::kOpenLoop}) {
      ControllerConfig cfg = f.config;
      cfg.mode = mode;
      cfg.open_loop_width = 17.0;
      std::mt19937_64 rng(99);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      ControllerState s;
      std::uint64_t off_graph = 0;
      for (int i = 0; i < 100000; ++i) {
        std::optional<Command> cmd;
        if (u(rng) < 0.1) cmd = static_cast<Command>(static_cast<int>(u(rng) * 6) % 6);
        const Sensors sensors{f.geom.thumb_limits.min + u(rng) * f.geom.thumb_limits.span(),
                              f.geom.index_limits.min + u(rng) * f.geom.index_limits.span(), u(rng) * 700.0,
                              u(rng) * 700.0};
        const ControllerStep step = controller_step(s, cfg, &f.bundle, f.geom, sensors, cmd);
        if (!is_valid_transition(s.phase, step.state.phase)) ++off_graph;
        s = step.state;
      }
      CHECK(off_graph == 0);
    }
  }

  TEST_CASE("transition graph") {
    CHECK(is_valid_transition(P::kIdle, P::kS1Closing));
    CHECK(is_valid_transition(P::kS2ThumbSweep, P::kS2FinalClosure));
    CHECK_FALSE(is_valid_transition(P::kIdle, P::kHoldLateral));
    CHECK_FALSE(is_valid_transition(P::kLPThumbSweep, P::kS2FinalClosure));
    CHECK_FALSE(is_valid_transition(P::kHoldLateral, P::kS2FinalClosure));
    for (int i = 0; i < kPhaseCount; ++i) {
      const Phase p = static_cast<Phase>(i);
      CHECK(phase_from_string(to_string(p)) == p);
      CHECK(is_valid_transition(p, p));
    }
  }

  TEST_CASE("event logs round-trip and corrupt logs are rejected") {
    Fixture f;
    ControllerState s;
    std::string text;
    std::optional<Command> cmd = Command::kPrecisionGrasp;
    for (int i = 0; i < 5; ++i) {
      const ControllerStep step = controller_step(s, f.config, &f.bundle, f.geom, {0.0, 0.1, 120.0, 350.0}, cmd);
      text += log_record(step.state, {0.0, 0.1, 120.0, 350.0}, cmd, step.output) + "\n";
      cmd.reset();
      s = step.state;
    }
    const std::vector<LogRecord> records = parse_log(text);
    REQUIRE(records.size() == 5);
    CHECK(records[0].command == Command::kPrecisionGrasp);
    CHECK(records[0].phase == P::kS1Closing);
    CHECK(records[1].phase == P::kS1Closing);
    CHECK(records[2].phase == P::kHoldPrecision);
    CHECK(records[4].sensors.I_I == 350.0);
    CHECK(error_code_of([&] { parse_log(text.substr(0, text.size() - 20)); }) == ErrorCode::kCorruptLog);
    std::string bad = text;
    bad.replace(bad.find("S1_Closing"), 10, "S9_Closing");
    CHECK(error_code_of([&] { parse_log(bad); }) == ErrorCode::kCorruptLog);
  }
}
