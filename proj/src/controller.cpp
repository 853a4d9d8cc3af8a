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

#include "plexus/controller.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "plexus/error.hpp"

namespace plexus {

namespace {

constexpr std::array<std::string_view, kPhaseCount> kPhaseNames = {
    "Idle",         "S1_Closing",  "HoldPrecision",      "S2_ThumbSweep",       "S2_IndexReposition", "S2_FinalClosure",
    "HoldLateral",  "LP_ThumbSweep", "LP_IndexReposition", "HoldPrecisionFromLP", "Opening"};

constexpr std::array<std::string_view, 6> kCommandNames = {
    "Open", "PrecisionGrasp", "LateralGrasp", "TransitionToLateral", "TransitionToPrecision", "Release"};

constexpr std::array<std::string_view, 10> kEventNames = {
    "command_accepted", "command_rejected", "contact_detected", "width_estimated", "estimate_clamped",
    "closure_started",  "closure_complete", "closure_timeout",  "motion_timeout",  "no_object"};

struct Context {
  const ControllerConfig& config;
  const CalibrationBundle* bundle;  // null in open loop
  const HandGeometry& geom;
  bool closed_loop;
};

bool reached(double sensor, double goal, const ControllerConfig& c) {
  return std::abs(sensor - goal) <= c.position_tolerance;
}

class Stepper {
 public:
  Stepper(const Context& ctx, const ControllerState& in, const Sensors& sensors)
      : ctx_(ctx), s_(in), sensors_(sensors) {}

  ControllerStep run(std::optional<Command> command) {
    ++s_.tick;
    if (command) handle_command(*command);
    if (!transitioned_) {
      ++s_.phase_ticks;
      advance();
    }
    emit_targets();
    return {s_, out_};
  }

 private:
  void event(EventType t, std::string detail = {}, std::optional<double> value = std::nullopt) {
    out_.events.push_back({t, std::move(detail), value});
  }

  void enter(Phase p) {
    s_.phase = p;
    s_.phase_ticks = 0;
    s_.debounce_count = 0;
    s_.stage = 0;
    s_.thumb_goal.reset();
    s_.index_goal.reset();
    transitioned_ = true;
  }

  const ControllerConfig& cfg() const { return ctx_.config; }
  const HandGeometry& geom() const { return ctx_.geom; }
  double open_width() const { return *cfg().open_loop_width; }

  double lateral_target() {
    if (!ctx_.closed_loop) return lateral_thumb_angle_for_width(geom(), cfg().theta_I_L_fixed, open_width());
    const Lookup l = lookup_lateral_angle(ctx_.bundle->lateral_table, *s_.w_hat);
    if (l.clamped) event(EventType::kEstimateClamped, "lateral_table", *s_.w_hat);
    return l.value;
  }

  double precision_index_target() {
    if (!ctx_.closed_loop) return solve_index_contact_angle(geom(), cfg().theta_T_P, open_width());
    const Lookup l = contact_angle_for_width(ctx_.bundle->width_table, *s_.w_hat);
    if (l.clamped) event(EventType::kEstimateClamped, "width_table", *s_.w_hat);
    return l.value;
  }

  void start_s1(GraspKind kind) {
    enter(Phase::kS1Closing);
    s_.grasp = kind;
    s_.theta_I_c.reset();
    s_.theta_T_c.reset();
    s_.w_hat.reset();
    s_.clamped_estimate = false;
    if (kind == GraspKind::kPrecision) {
      s_.thumb_goal = cfg().theta_T_P;
      s_.index_goal = ctx_.closed_loop ? geom().index_limits.max
                                       : solve_index_contact_angle(geom(), cfg().theta_T_P, open_width());
    } else {
      s_.thumb_goal = cfg().lateral_open_angle;
    }
  }

  void start_opening() {
    enter(Phase::kOpening);
    s_.theta_I_c.reset();
    s_.theta_T_c.reset();
    s_.w_hat.reset();
    s_.clamped_estimate = false;
    s_.thumb_goal = cfg().theta_T_P;
    s_.index_goal = geom().index_limits.min;
  }

  void start_final_closure() {
    enter(Phase::kS2FinalClosure);
    s_.thumb_goal = geom().thumb_limits.min;
    if (ctx_.closed_loop) {
      event(EventType::kClosureStarted, "I_T_th", cfg().I_T_th);
    } else {
      event(EventType::kClosureStarted, "timed", static_cast<double>(cfg().open_loop_squeeze_ticks));
    }
  }

  void handle_command(Command c) {
    const Phase p = s_.phase;
    const std::string name(to_string(c));
    bool ok = false;
    switch (c) {
      case Command::kOpen:
        ok = p == Phase::kIdle || is_hold_phase(p);
        if (ok) start_opening();
        break;
      case Command::kRelease:
        ok = is_hold_phase(p);
        if (ok) start_opening();
        break;
      case Command::kPrecisionGrasp:
      case Command::kLateralGrasp:
        ok = p == Phase::kIdle;
        if (ok) start_s1(c == Command::kPrecisionGrasp ? GraspKind::kPrecision : GraspKind::kLateral);
        break;
      case Command::kTransitionToLateral:
        ok = (p == Phase::kHoldPrecision || p == Phase::kHoldPrecisionFromLP) && s_.w_hat.has_value();
        if (ok) {
          enter(Phase::kS2ThumbSweep);
          s_.thumb_goal = lateral_target();
        }
        break;
      case Command::kTransitionToPrecision:
        ok = p == Phase::kHoldLateral && s_.w_hat.has_value();
        if (ok) {
          if (cfg().index_coordination) {
            const double goal = precision_index_target();
            enter(Phase::kLPIndexReposition);
            s_.index_goal = goal;
          } else {
            enter(Phase::kLPThumbSweep);
            s_.thumb_goal = cfg().theta_T_P;
          }
        }
        break;
    }
    if (ok) {
      // Rejected commands leave the state untouched; accepted ones record
      // the phase they left.
      out_.events.insert(out_.events.begin(), Event{EventType::kCommandAccepted, name, std::nullopt});
    } else {
      event(EventType::kCommandRejected, name + " in " + std::string(to_string(p)));
    }
  }

  // Debounced threshold crossing on `current`.
  bool debounced(double current, double threshold) {
    s_.debounce_count = current > threshold ? s_.debounce_count + 1 : 0;
    return s_.debounce_count >= cfg().debounce_ticks;
  }

  bool timed_out(int budget) const { return s_.phase_ticks >= budget; }

  void record_width(double w, bool clamped) {
    s_.w_hat = w;
    s_.clamped_estimate = clamped;
    event(EventType::kWidthEstimated, ctx_.closed_loop ? "lookup" : "configured", w);
    if (clamped) event(EventType::kEstimateClamped, "estimate", w);
  }

  void advance_s1() {
    if (s_.grasp == GraspKind::kPrecision) {
      if (ctx_.closed_loop) {
        if (debounced(sensors_.I_I, cfg().I_I_th)) {
          s_.theta_I_c = sensors_.theta_I;
          event(EventType::kContactDetected, "index", sensors_.theta_I);
          const Lookup w = estimate_width(ctx_.bundle->width_table, sensors_.theta_I);
          record_width(w.value, w.clamped);
          enter(Phase::kHoldPrecision);
        } else if (s_.debounce_count == 0 && reached(sensors_.theta_I, geom().index_limits.max, cfg())) {
          event(EventType::kNoObject, "index reached its joint limit", sensors_.theta_I);
          enter(Phase::kIdle);
        } else if (timed_out(cfg().motion_timeout_ticks)) {
          event(EventType::kMotionTimeout, "S1_Closing");
          enter(Phase::kIdle);
        }
      } else {
        const bool done = reached(sensors_.theta_I, *s_.index_goal, cfg()) &&
                          reached(sensors_.theta_T, *s_.thumb_goal, cfg());
        if (done || timed_out(cfg().motion_timeout_ticks)) {
          if (!done) event(EventType::kMotionTimeout, "S1_Closing");
          record_width(open_width(), false);
          enter(Phase::kHoldPrecision);
        }
      }
      return;
    }
    // Lateral grasp from rest: open the thumb, place the index, close.
    switch (s_.stage) {
      case 0:
        if (reached(sensors_.theta_T, *s_.thumb_goal, cfg())) {
          s_.stage = 1;
          s_.thumb_goal.reset();
          s_.index_goal = cfg().theta_I_L_fixed;
        }
        break;
      case 1:
        if (reached(sensors_.theta_I, *s_.index_goal, cfg())) {
          s_.stage = 2;
          s_.index_goal.reset();
          s_.thumb_goal = ctx_.closed_loop
                              ? geom().thumb_limits.min
                              : lateral_thumb_angle_for_width(geom(), cfg().theta_I_L_fixed, open_width());
          s_.debounce_count = 0;
        }
        break;
      default:
        if (ctx_.closed_loop) {
          if (debounced(sensors_.I_T, cfg().I_T_th)) {
            s_.theta_T_c = sensors_.theta_T;
            event(EventType::kContactDetected, "thumb", sensors_.theta_T);
            const Lookup w = lateral_width_from_angle(ctx_.bundle->lateral_table, sensors_.theta_T);
            record_width(w.value, w.clamped);
            enter(Phase::kHoldLateral);
            return;
          }
          if (s_.debounce_count == 0 && reached(sensors_.theta_T, *s_.thumb_goal, cfg())) {
            event(EventType::kNoObject, "thumb reached its joint limit", sensors_.theta_T);
            enter(Phase::kIdle);
            return;
          }
        } else if (reached(sensors_.theta_T, *s_.thumb_goal, cfg())) {
          record_width(open_width(), false);
          enter(Phase::kHoldLateral);
          return;
        }
        break;
    }
    if (timed_out(cfg().motion_timeout_ticks)) {
      event(EventType::kMotionTimeout, "S1_Closing");
      if (ctx_.closed_loop) {
        enter(Phase::kIdle);
      } else {
        record_width(open_width(), false);
        enter(Phase::kHoldLateral);
      }
    }
  }

  // Positioning phase: advance when the goal is reached or the budget runs
  // out (the latter logged as a motion timeout).
  template <typename Next>
  void positioning(double sensor, double goal, Next next) {
    if (reached(sensor, goal, cfg())) {
      next();
    } else if (timed_out(cfg().motion_timeout_ticks)) {
      event(EventType::kMotionTimeout, std::string(to_string(s_.phase)));
      next();
    }
  }

  void advance() {
    switch (s_.phase) {
      case Phase::kIdle:
      case Phase::kHoldPrecision:
      case Phase::kHoldLateral:
      case Phase::kHoldPrecisionFromLP:
        break;
      case Phase::kS1Closing:
        advance_s1();
        break;
      case Phase::kS2ThumbSweep:
        positioning(sensors_.theta_T, *s_.thumb_goal, [&] {
          if (cfg().index_coordination) {
            enter(Phase::kS2IndexReposition);
            s_.index_goal = cfg().theta_I_L_fixed;
          } else {
            start_final_closure();
          }
        });
        break;
      case Phase::kS2IndexReposition:
        positioning(sensors_.theta_I, *s_.index_goal, [&] { start_final_closure(); });
        break;
      case Phase::kS2FinalClosure:
        if (ctx_.closed_loop) {
          if (debounced(sensors_.I_T, cfg().I_T_th)) {
            event(EventType::kClosureComplete, "I_T", sensors_.I_T);
            enter(Phase::kHoldLateral);
          } else if (timed_out(cfg().closure_timeout_ticks)) {
            event(EventType::kClosureTimeout, "I_T never exceeded the threshold", sensors_.I_T);
            enter(Phase::kHoldLateral);
          }
        } else if (timed_out(cfg().open_loop_squeeze_ticks)) {
          event(EventType::kClosureComplete, "timed");
          enter(Phase::kHoldLateral);
        }
        break;
      case Phase::kLPIndexReposition:
        positioning(sensors_.theta_I, *s_.index_goal, [&] {
          enter(Phase::kLPThumbSweep);
          s_.thumb_goal = cfg().theta_T_P;
        });
        break;
      case Phase::kLPThumbSweep:
        positioning(sensors_.theta_T, *s_.thumb_goal, [&] { enter(Phase::kHoldPrecisionFromLP); });
        break;
      case Phase::kOpening: {
        const bool done =
            reached(sensors_.theta_T, *s_.thumb_goal, cfg()) && reached(sensors_.theta_I, *s_.index_goal, cfg());
        if (done || timed_out(cfg().motion_timeout_ticks)) {
          if (!done) event(EventType::kMotionTimeout, "Opening");
          enter(Phase::kIdle);
        }
        break;
      }
    }
  }

  void emit_targets() {
    auto thumb = [&](double a) {
      return stroke_from_thumb_angle(geom(), std::clamp(a, geom().thumb_limits.min, geom().thumb_limits.max));
    };
    auto index = [&](double a) {
      return stroke_from_index_angle(geom(), std::clamp(a, geom().index_limits.min, geom().index_limits.max));
    };
    if (s_.thumb_goal) out_.thumb_stroke = thumb(*s_.thumb_goal);
    if (s_.index_goal) out_.index_stroke = index(*s_.index_goal);
  }

  const Context& ctx_;
  ControllerState s_;
  const Sensors& sensors_;
  ControlOutput out_;
  bool transitioned_ = false;
};

template <std::size_t N>
std::size_t index_of(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return i;
  }
  return N;
}

nlohmann::json opt_num(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

std::string_view to_string(Phase phase) { return kPhaseNames[static_cast<std::size_t>(phase)]; }

Phase phase_from_string(std::string_view name) {
  const std::size_t i = index_of(kPhaseNames, name);
  if (i == kPhaseNames.size()) throw Error(ErrorCode::kCorruptLog, "unknown phase '" + std::string(name) + "'");
  return static_cast<Phase>(i);
}

bool is_hold_phase(Phase p) {
  return p == Phase::kHoldPrecision || p == Phase::kHoldLateral || p == Phase::kHoldPrecisionFromLP;
}

bool is_valid_transition(Phase from, Phase to) {
  if (from == to) return true;
  using P = Phase;
  switch (from) {
    case P::kIdle:
      return to == P::kS1Closing || to == P::kOpening;
    case P::kS1Closing:
      return to == P::kHoldPrecision || to == P::kHoldLateral || to == P::kIdle;
    case P::kHoldPrecision:
    case P::kHoldPrecisionFromLP:
      return to == P::kS2ThumbSweep || to == P::kOpening;
    case P::kS2ThumbSweep:
      return to == P::kS2IndexReposition || to == P::kS2FinalClosure;
    case P::kS2IndexReposition:
      return to == P::kS2FinalClosure;
    case P::kS2FinalClosure:
      return to == P::kHoldLateral;
    case P::kHoldLateral:
      return to == P::kLPIndexReposition || to == P::kLPThumbSweep || to == P::kOpening;
    case P::kLPIndexReposition:
      return to == P::kLPThumbSweep;
    case P::kLPThumbSweep:
      return to == P::kHoldPrecisionFromLP;
    case P::kOpening:
      return to == P::kIdle;
  }
  return false;
}

std::string_view to_string(Command command) { return kCommandNames[static_cast<std::size_t>(command)]; }

Command command_from_string(std::string_view name) {
  const std::size_t i = index_of(kCommandNames, name);
  if (i == kCommandNames.size()) throw Error(ErrorCode::kSchemaError, "unknown command '" + std::string(name) + "'");
  return static_cast<Command>(i);
}

std::string_view to_string(EventType type) { return kEventNames[static_cast<std::size_t>(type)]; }

EventType event_type_from_string(std::string_view name) {
  const std::size_t i = index_of(kEventNames, name);
  if (i == kEventNames.size()) throw Error(ErrorCode::kCorruptLog, "unknown event '" + std::string(name) + "'");
  return static_cast<EventType>(i);
}

void ControllerConfig::validate(double free_current, double stall_current) const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, "controller: " + what);
  };
  need(I_I_th > free_current && I_I_th < stall_current, "I_I_th must lie strictly between free and stall current");
  need(I_T_th > free_current && I_T_th < stall_current, "I_T_th must lie strictly between free and stall current");
  need(debounce_ticks >= 1, "debounce_ticks must be >= 1");
  need(position_tolerance > 0.0, "position_tolerance must be > 0");
  need(motion_timeout_ticks >= 1 && closure_timeout_ticks >= 1 && open_loop_squeeze_ticks >= 1,
       "tick budgets must be >= 1");
  need(!open_loop_width || (std::isfinite(*open_loop_width) && *open_loop_width > 0.0),
       "open_loop_width must be > 0");
  need(std::isfinite(theta_T_P) && std::isfinite(theta_I_L_fixed) && std::isfinite(lateral_open_angle),
       "angles must be finite");
}

ControllerConfig make_controller_config(const CalibrationBundle& bundle) {
  ControllerConfig c;
  c.theta_T_P = bundle.theta_T_P;
  c.theta_I_L_fixed = bundle.theta_I_L_fixed;
  c.lateral_open_angle = bundle.params.lateral_posture_range.max;
  return c;
}

double lateral_thumb_angle_for_width(const HandGeometry& geom, double theta_I, double width) {
  auto f = [&](double th) { return fingertip_gap(geom, th, theta_I, GraspType::kLateral) - width; };
  // First crossing from the closed end of the thumb range.
  constexpr int kSamples = 400;
  const Interval lim = geom.thumb_limits;
  double a = lim.min;
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int k = 1; k <= kSamples; ++k) {
    const double b = lim.min + lim.span() * k / kSamples;
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) != (fb < 0.0)) {
      std::uintmax_t iters = 200;
      const auto [r0, r1] = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
      return std::abs(f(r0)) <= std::abs(f(r1)) ? r0 : r1;
    }
    a = b;
    fa = fb;
  }
  std::ostringstream os;
  os << "lateral width " << width << " mm not reachable within the thumb limits";
  throw Error(ErrorCode::kWidthUnreachable, os.str());
}

Lookup contact_angle_for_width(const WidthTable& table, double width) {
  const auto& e = table.entries;  // increasing angle, decreasing width
  if (e.size() < 2) throw Error(ErrorCode::kInsufficientEntries, "width table needs at least 2 entries");
  if (width >= e.front().width) return {e.front().theta_I_c, width > e.front().width};
  if (width <= e.back().width) return {e.back().theta_I_c, width < e.back().width};
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (width >= e[i].width) {
      const double t = (width - e[i - 1].width) / (e[i].width - e[i - 1].width);
      return {e[i - 1].theta_I_c + t * (e[i].theta_I_c - e[i - 1].theta_I_c), false};
    }
  }
  return {e.back().theta_I_c, false};
}

ControllerStep controller_step(const ControllerState& state, const ControllerConfig& config,
                               const CalibrationBundle* bundle, const HandGeometry& geom, const Sensors& sensors,
                               std::optional<Command> command) {
  if (config.mode == ControlMode::kOpenLoop) return open_loop_step(state, config, geom, sensors, command);
  if (bundle == nullptr) throw Error(ErrorCode::kCalibrationMissing, "closed-loop control needs a calibration bundle");
  const Context ctx{config, bundle, geom, true};
  return Stepper(ctx, state, sensors).run(command);
}

ControllerStep open_loop_step(const ControllerState& state, const ControllerConfig& config,
                              const HandGeometry& geom, const Sensors& sensors, std::optional<Command> command) {
  if (!config.open_loop_width) throw Error(ErrorCode::kMissingWidth, "open-loop control needs open_loop_width");
  const Context ctx{config, nullptr, geom, false};
  return Stepper(ctx, state, sensors).run(command);
}

std::string log_record(const ControllerState& after, const Sensors& sensors, std::optional<Command> command,
                       const ControlOutput& output) {
  nlohmann::ordered_json j;
  j["tick"] = after.tick;
  j["phase"] = std::string(to_string(after.phase));
  j["command"] = command ? nlohmann::ordered_json(std::string(to_string(*command))) : nlohmann::ordered_json();
  j["sensors"] = {{"theta_T", sensors.theta_T}, {"theta_I", sensors.theta_I}, {"I_T", sensors.I_T},
                  {"I_I", sensors.I_I}};
  j["targets"] = {{"thumb", opt_num(output.thumb_stroke)}, {"index", opt_num(output.index_stroke)}};
  j["w_hat"] = opt_num(after.w_hat);
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const Event& e : output.events) {
    nlohmann::ordered_json ev;
    ev["type"] = std::string(to_string(e.type));
    ev["detail"] = e.detail;
    ev["value"] = opt_num(e.value);
    events.push_back(ev);
  }
  j["events"] = events;
  return j.dump();
}

std::vector<LogRecord> parse_log(const std::string& text) {
  std::vector<LogRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto opt = [](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      LogRecord r;
      r.tick = j.at("tick").get<std::uint64_t>();
      r.phase = phase_from_string(j.at("phase").get<std::string>());
      if (!j.at("command").is_null()) {
        try {
          r.command = command_from_string(j.at("command").get<std::string>());
        } catch (const Error& e) {
          throw Error(ErrorCode::kCorruptLog, e.what());
        }
      }
      const auto& s = j.at("sensors");
      r.sensors = {s.at("theta_T").get<double>(), s.at("theta_I").get<double>(), s.at("I_T").get<double>(),
                   s.at("I_I").get<double>()};
      r.thumb_target = opt(j.at("targets").at("thumb"));
      r.index_target = opt(j.at("targets").at("index"));
      r.w_hat = opt(j.at("w_hat"));
      for (const auto& ev : j.at("events")) {
        r.events.push_back({event_type_from_string(ev.at("type").get<std::string>()),
                            ev.at("detail").get<std::string>(), opt(ev.at("value"))});
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptLog, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kCorruptLog, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!text.empty() && text.back() != '\n') {
    throw Error(ErrorCode::kCorruptLog, "line " + std::to_string(line_no) + ": truncated record (no newline)");
  }
  return out;
}

}  // namespace plexus
