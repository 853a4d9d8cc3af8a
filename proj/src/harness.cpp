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

#include "plexus/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "plexus/error.hpp"
#include "plexus/yaml_util.hpp"

namespace plexus {

namespace {

bool is_transition_motion(Phase p) {
  return p == Phase::kS2ThumbSweep || p == Phase::kS2IndexReposition || p == Phase::kLPIndexReposition ||
         p == Phase::kLPThumbSweep;
}

class Plant {
 public:
  Plant(const HandGeometry& geom, const ObjectSpec& object, const HarnessParams& params, ActuatorParams thumb,
        ActuatorParams index, JointState start)
      : geom_(geom), object_(object), params_(params), thumb_p_(thumb), index_p_(index) {
    thumb_.position = stroke_from_thumb_angle(geom, start.theta_T);
    index_.position = stroke_from_index_angle(geom, start.theta_I);
  }

  JointState joints() const { return joints_at(thumb_.position, index_.position); }

  Sensors sensors() const {
    const JointState j = joints();
    return {j.theta_T, j.theta_I, thumb_.current, index_.current};
  }

  const ActuatorState& thumb() const { return thumb_; }
  bool pinched() const { return pinched_; }

  void step(const ControlOutput& out, Phase phase) {
    thumb_.target = out.thumb_stroke;
    index_.target = out.index_stroke;
    const double dt = thumb_p_.tick_dt;
    if (phase == Phase::kOpening && pinched_) {
      // S5: the experimenter takes the object out as the hand opens.
      pinched_ = false;
      present_ = false;
    }
    const double base = pinched_ ? params_.preload : 0.0;
    const double blocking = 2.0 * std::max(thumb_p_.drivable_force, index_p_.drivable_force);

    if (pinched_ && phase == Phase::kS2FinalClosure) {
      thumb_ = step_actuator(thumb_, thumb_p_, blocking, dt);
      index_ = step_actuator(index_, index_p_, base, dt);
      return;
    }
    if (pinched_ && !is_transition_motion(phase)) {
      // A finger pressing further into the pinched object is blocked.
      const double c0 = clearance(joints());
      ActuatorState t1 = step_actuator(thumb_, thumb_p_, base, dt);
      if (t1.position != thumb_.position &&
          clearance(joints_at(t1.position, index_.position)) < std::min(0.0, c0) - 1e-12) {
        t1 = step_actuator(thumb_, thumb_p_, blocking, dt);
      }
      ActuatorState i1 = step_actuator(index_, index_p_, base, dt);
      if (i1.position != index_.position &&
          clearance(joints_at(thumb_.position, i1.position)) < std::min(0.0, c0) - 1e-12) {
        i1 = step_actuator(index_, index_p_, blocking, dt);
      }
      thumb_ = t1;
      index_ = i1;
      return;
    }

    ActuatorState t1 = step_actuator(thumb_, thumb_p_, base, dt);
    ActuatorState i1 = step_actuator(index_, index_p_, base, dt);
    if (present_ && !pinched_) {
      const double c1 = clearance(joints_at(t1.position, i1.position));
      if (c1 <= 0.0) {
        // Stop the moving fingers where they first touch the object.
        const double c0 = clearance(joints());
        double lo = 0.0, hi = 1.0;
        if (c0 <= 0.0) {
          hi = 0.0;
        } else {
          for (int k = 0; k < 60; ++k) {
            const double m = 0.5 * (lo + hi);
            if (clearance(joints_at(lerp(thumb_.position, t1.position, m), lerp(index_.position, i1.position, m))) >
                0.0) {
              lo = m;
            } else {
              hi = m;
            }
          }
        }
        auto stop = [&](ActuatorState& next, const ActuatorState& prev, const ActuatorParams& p) {
          if (next.position == prev.position) return;
          next.position = lerp(prev.position, next.position, hi);
          next.blocked = true;
          next.blocked_ticks = 1;
          next.current = blocked_current(p, 1);
        };
        stop(t1, thumb_, thumb_p_);
        stop(i1, index_, index_p_);
        pinched_ = true;
      }
    }
    thumb_ = t1;
    index_ = i1;
  }

 private:
  static double lerp(double a, double b, double t) { return a + (b - a) * t; }

  JointState joints_at(double thumb_stroke, double index_stroke) const {
    return {thumb_angle_from_stroke(geom_, thumb_stroke), index_angle_from_stroke(geom_, index_stroke), 0.0, 0.0};
  }

  double clearance(const JointState& j) const { return pinch_clearance(geom_, j, object_, 0.0, params_.physics); }

  const HandGeometry& geom_;
  const ObjectSpec& object_;
  const HarnessParams& params_;
  ActuatorParams thumb_p_;
  ActuatorParams index_p_;
  ActuatorState thumb_;
  ActuatorState index_;
  bool pinched_ = false;
  bool present_ = true;
};

class TrialRunner {
 public:
  TrialRunner(const TrialSpec& spec, const HandGeometry& geom, const CalibrationBundle& bundle,
              const HarnessParams& params, int trial_index, bool record_log)
      : spec_(spec),
        geom_(geom),
        bundle_(bundle),
        params_(params),
        record_log_(record_log),
        thumb_p_(with_limits(params.thumb_actuator, geom.thumb_stroke)),
        index_p_(with_limits(params.index_actuator, geom.index_stroke)),
        config_(make_config()),
        plant_(geom, spec.object, params, thumb_p_, index_p_, {bundle.theta_T_P, geom.index_limits.min, 0.0, 0.0}),
        rng_(trial_stream_seed(spec.seed, spec.object.label, spec.condition, trial_index)) {
    result_.seed = spec.seed;
    result_.trial_index = trial_index;
  }

  TrialResult run() {
    const bool lp = spec_.condition == Condition::kLPWithIndex;
    // S1: open hand.
    if (!run_stage(Command::kOpen, [](Phase p) { return p == Phase::kIdle; }) ||
        // S2: initial grasp (Stage 1).
        !run_stage(lp ? Command::kLateralGrasp : Command::kPrecisionGrasp,
                   [](Phase p) { return p != Phase::kS1Closing; }) ||
        state_.phase != (lp ? Phase::kHoldLateral : Phase::kHoldPrecision) || !state_.w_hat) {
      return fault();
    }
    result_.w_hat = *state_.w_hat;
    result_.w_error = std::abs(*state_.w_hat - spec_.object.width);
    result_.clamped_estimate = state_.clamped_estimate;

    // S3: placement noise with the experimenter's re-adjustment.
    const TraceStep initial{plant_.joints(), params_.grip, StepKind::kHold};
    bool placed = false;
    for (int attempt = 0; attempt <= params_.max_resamples; ++attempt) {
      result_.placement = sample_placement();
      result_.resamples = attempt;
      if (simulate_transition(geom_, {initial}, spec_.object, result_.placement, params_.physics).success) {
        placed = true;
        break;
      }
    }
    if (!placed) {
      result_.failure = TrialFailure::kSetupFailure;
      release();
      return result_;
    }

    // S4: transition.
    const Phase goal = lp ? Phase::kHoldPrecisionFromLP : Phase::kHoldLateral;
    std::vector<TraceStep> trace{initial};
    double grip = params_.grip;
    bool closure_failed = false;
    const bool reached = run_stage(lp ? Command::kTransitionToPrecision : Command::kTransitionToLateral,
                                   [&](Phase p) { return p == goal; },
                                   [&](Phase p, const ControlOutput& out) {
                                     for (const Event& e : out.events) {
                                       if (e.type == EventType::kClosureTimeout) closure_failed = true;
                                     }
                                     StepKind kind = StepKind::kHold;
                                     if (is_transition_motion(p)) {
                                       grip = params_.preload;
                                       kind = StepKind::kMotion;
                                     } else if (p == Phase::kS2FinalClosure) {
                                       const double frac = std::min(
                                           1.0, static_cast<double>(plant_.thumb().blocked_ticks) / thumb_p_.ramp_ticks);
                                       grip = params_.preload + (params_.grip - params_.preload) * frac;
                                     }
                                     trace.push_back({plant_.joints(), grip, kind});
                                   });
    if (!reached || closure_failed) return fault();
    result_.trace_steps = trace.size();
    const TransitionOutcome outcome =
        simulate_transition(geom_, trace, spec_.object, result_.placement, params_.physics);
    result_.success = outcome.success;
    result_.failure = trial_failure_from(outcome.failure_mode);
    result_.failed_step = outcome.failed_step;
    result_.min_margin = outcome.min_margin;

    // S5: release.
    release();
    return result_;
  }

 private:
  static ActuatorParams with_limits(ActuatorParams p, const Interval& limits) {
    p.stroke_limits = limits;
    return p;
  }

  ControllerConfig make_config() const {
    ControllerConfig c = params_.controller;
    c.theta_T_P = bundle_.theta_T_P;
    c.theta_I_L_fixed = bundle_.theta_I_L_fixed;
    c.lateral_open_angle = bundle_.params.lateral_posture_range.max;
    c.index_coordination = spec_.condition != Condition::kPLWithoutIndex;
    return c;
  }

  double truncated_normal() {
    const double z = normal_(rng_);
    return std::clamp(z, -spec_.noise.truncation, spec_.noise.truncation);
  }

  PlacementSample sample_placement() {
    PlacementSample s;
    s.tangential_offset = spec_.noise.position_sigma * truncated_normal();
    s.tilt = spec_.noise.orientation_sigma * truncated_normal();
    s.friction_scale = std::max(0.05, 1.0 + spec_.noise.friction_sigma * truncated_normal());
    return s;
  }

  void tick(std::optional<Command> command) {
    const Sensors sensors = plant_.sensors();
    ControllerStep step = controller_step(state_, config_, &bundle_, geom_, sensors, command);
    state_ = step.state;
    if (record_log_) result_.log.push_back(log_record(state_, sensors, command, step.output));
    plant_.step(step.output, state_.phase);
    last_output_ = std::move(step.output);
  }

  template <typename Done>
  bool run_stage(Command command, Done done) {
    return run_stage(command, done, [](Phase, const ControlOutput&) {});
  }

  template <typename Done, typename Observe>
  bool run_stage(Command command, Done done, Observe observe) {
    tick(command);
    observe(state_.phase, last_output_);
    for (int k = 1; k < params_.max_ticks; ++k) {
      if (done(state_.phase)) return true;
      tick(std::nullopt);
      observe(state_.phase, last_output_);
    }
    return done(state_.phase);
  }

  void release() {
    if (is_hold_phase(state_.phase)) run_stage(Command::kRelease, [](Phase p) { return p == Phase::kIdle; });
  }

  TrialResult fault() {
    result_.success = false;
    result_.failure = TrialFailure::kControllerFault;
    release();
    return result_;
  }

  const TrialSpec& spec_;
  const HandGeometry& geom_;
  const CalibrationBundle& bundle_;
  const HarnessParams& params_;
  bool record_log_;
  ActuatorParams thumb_p_;
  ActuatorParams index_p_;
  ControllerConfig config_;
  Plant plant_;
  ControllerState state_;
  ControlOutput last_output_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  TrialResult result_;
};

TrialResult run_trial_unchecked(const TrialSpec& spec, const HandGeometry& geom, const CalibrationBundle& bundle,
                                const HarnessParams& params, int trial_index, bool record_log) {
  return TrialRunner(spec, geom, bundle, params, trial_index, record_log).run();
}

}  // namespace

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::kPLWithIndex:
      return "PL_with_index";
    case Condition::kPLWithoutIndex:
      return "PL_without_index";
    case Condition::kLPWithIndex:
      return "LP_with_index";
  }
  return "?";
}

Condition condition_from_string(std::string_view name) {
  for (Condition c : {Condition::kPLWithIndex, Condition::kPLWithoutIndex, Condition::kLPWithIndex}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::kSchemaError, "unknown condition '" + std::string(name) + "'");
}

std::string_view to_string(TrialFailure f) {
  switch (f) {
    case TrialFailure::kNone:
      return "none";
    case TrialFailure::kSlip:
      return "slip";
    case TrialFailure::kRotationEjection:
      return "rotation_ejection";
    case TrialFailure::kNoContact:
      return "no_contact";
    case TrialFailure::kSetupFailure:
      return "setup_failure";
    case TrialFailure::kControllerFault:
      return "controller_fault";
  }
  return "?";
}

TrialFailure trial_failure_from(FailureMode mode) {
  switch (mode) {
    case FailureMode::kNone:
      return TrialFailure::kNone;
    case FailureMode::kSlip:
      return TrialFailure::kSlip;
    case FailureMode::kRotationEjection:
      return TrialFailure::kRotationEjection;
    case FailureMode::kNoContact:
      return TrialFailure::kNoContact;
  }
  return TrialFailure::kNoContact;
}

void PlacementNoise::validate() const {
  if (!(position_sigma >= 0.0 && orientation_sigma >= 0.0 && friction_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise sigmas must be >= 0");
  }
  if (!(truncation > 0.0)) throw Error(ErrorCode::kInvalidConfig, "noise truncation must be > 0");
}

void TrialSpec::validate() const {
  object.validate();
  noise.validate();
  if (trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
}

void HarnessParams::validate() const {
  physics.validate();
  auto check_act = [](ActuatorParams p) {
    p.stroke_limits = {0.0, 1.0};
    p.validate();
  };
  check_act(thumb_actuator);
  check_act(index_actuator);
  if (thumb_actuator.tick_dt != index_actuator.tick_dt) {
    throw Error(ErrorCode::kInvalidConfig, "both actuators must share tick_dt");
  }
  controller.validate(std::max(thumb_actuator.free_current, index_actuator.free_current),
                      std::min(thumb_actuator.stall_current, index_actuator.stall_current));
  if (!(preload >= 0.0 && grip >= preload)) throw Error(ErrorCode::kInvalidConfig, "need 0 <= preload <= grip");
  if (max_resamples < 0 || max_ticks < 1) throw Error(ErrorCode::kInvalidConfig, "invalid tick/resample budget");
}

std::uint64_t trial_stream_seed(std::uint64_t seed, const std::string& label, Condition c, int trial_index) {
  return yamlio::fnv1a(std::to_string(seed) + '\x1f' + label + '\x1f' + std::string(to_string(c)) + '\x1f' +
                       std::to_string(trial_index));
}

TrialResult run_trial(const TrialSpec& spec, const HandGeometry& geom, const CalibrationBundle& bundle,
                      const HarnessParams& params, int trial_index, bool record_log) {
  bundle.check_geometry(geom);
  spec.validate();
  params.validate();
  TrialResult r = run_trial_unchecked(spec, geom, bundle, params, trial_index, record_log);
  if (r.failure == TrialFailure::kSetupFailure) {
    throw Error(ErrorCode::kSetupFailure, "no stable initial grasp of '" + spec.object.label + "' after " +
                                              std::to_string(params.max_resamples) + " re-samples");
  }
  return r;
}

SuiteReport run_suite(const std::vector<TrialSpec>& specs, const HandGeometry& geom,
                      const CalibrationBundle& bundle, const HarnessParams& params, unsigned jobs) {
  bundle.check_geometry(geom);
  params.validate();
  for (const TrialSpec& s : specs) s.validate();

  struct Task {
    std::size_t spec;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (int t = 0; t < specs[i].trials; ++t) tasks.push_back({i, t});
  }
  std::vector<TrialResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        results[k] = run_trial_unchecked(specs[tasks[k].spec], geom, bundle, params, tasks[k].trial, false);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, tasks.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Ordered reduction: independent of scheduling.
  SuiteReport report;
  std::map<std::pair<std::string, int>, std::size_t> row_of;
  std::vector<double> w_err_sum;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const TrialSpec& s = specs[tasks[k].spec];
    const auto key = std::make_pair(s.object.label, static_cast<int>(s.condition));
    auto it = row_of.find(key);
    if (it == row_of.end()) {
      SuiteRow row;
      row.label = s.object.label;
      row.shape = s.object.shape;
      row.width = s.object.width;
      row.material = s.material;
      row.mass = s.object.mass;
      row.condition = s.condition;
      it = row_of.emplace(key, report.rows.size()).first;
      report.rows.push_back(row);
      w_err_sum.push_back(0.0);
    }
    SuiteRow& row = report.rows[it->second];
    const TrialResult& r = results[k];
    ++row.trials;
    if (r.success) ++row.successes;
    ++row.failures[static_cast<std::size_t>(r.failure)];
    w_err_sum[it->second] += r.w_error;
    if (std::find(report.seeds.begin(), report.seeds.end(), s.seed) == report.seeds.end()) {
      report.seeds.push_back(s.seed);
    }
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    report.rows[i].mean_abs_w_error = w_err_sum[i] / report.rows[i].trials;
  }
  return report;
}

}  // namespace plexus
