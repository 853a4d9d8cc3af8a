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

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <string>

#include "oracles.hpp"
#include "plexus/calibration.hpp"
#include "plexus/controller.hpp"
#include "plexus/harness.hpp"
#include "plexus/report.hpp"
#include "plexus/scenario.hpp"

#ifndef PLEXUS_DATA_DIR
#define PLEXUS_DATA_DIR "data"
#endif

using namespace plexus;
using P = Phase;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool contains(const std::vector<Phase>& phases, Phase p) {
  return std::find(phases.begin(), phases.end(), p) != phases.end();
}

// 1. Width estimation over 5-30 mm.
void criterion_width() {
  const auto t0 = Clock::now();
  const HandGeometry g = default_geometry();
  const CalibrationBundle b = build_calibration(g);
  double worst = 0.0, worst_grid = 0.0;
  for (int w = 5; w <= 30; ++w) {
    const double theta = solve_index_contact_angle(g, b.theta_T_P, w);
    const double err = std::abs(estimate_width(b.width_table, theta).value - w);
    worst = std::max(worst, err);
    if (w % 5 == 0) worst_grid = std::max(worst_grid, err);
  }
  const double t = seconds_since(t0);
  verdict(1, "width estimation", worst <= 0.5 && worst_grid <= 1e-6 && t < 5.0,
          fmt("max |w_hat - w| %.3g mm on 1 mm grid, %.3g mm at table widths, %.3f s", worst, worst_grid, t));
}

// 2. Kinematics: stroke round trip and contact-angle residual.
void criterion_kinematics() {
  const auto t0 = Clock::now();
  const HandGeometry g = default_geometry();
  double round_trip = 0.0, oracle_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = g.thumb_stroke.min + g.thumb_stroke.span() * i / 999.0;
    round_trip = std::max(round_trip, std::abs(stroke_from_thumb_angle(g, thumb_angle_from_stroke(g, s)) - s));
    oracle_gap = std::max(oracle_gap, std::abs(thumb_angle_from_stroke(g, s) - oracle::thumb_angle(g, s)));
  }
  double residual = 0.0;
  for (double w = 5.0; w <= 30.0 + 1e-12; w += 0.5) {
    const double th = solve_index_contact_angle(g, 0.0, w);
    residual = std::max(residual, std::abs(fingertip_gap(g, 0.0, th, GraspType::kPrecision) - w));
  }
  const double t = seconds_since(t0);
  verdict(2, "kinematic inverses", round_trip <= 1e-9 && residual <= 1e-6 && oracle_gap <= 1e-9 && t < 1.0,
          fmt("stroke round trip %.3g mm, contact residual %.3g mm, oracle gap %.3g rad, %.3f s", round_trip,
              residual, oracle_gap, t));
}

// 3. Phase sequences and a long random fuzz of the transition graph.
void criterion_fsm() {
  const HandGeometry g = default_geometry();
  const CalibrationBundle b = build_calibration(g);
  const ControllerConfig with = make_controller_config(b);
  ControllerConfig without = with;
  without.index_coordination = false;
  bool ok = true;
  std::string why;
  for (double w : {5.0, 12.0, 20.0, 30.0}) {
    const double lateral = lookup_lateral_angle(b.lateral_table, w).value;
    for (const ControllerConfig* cfg : std::vector<const ControllerConfig*>{&with, &without}) {
      oracle::ScriptedHand hand(g);
      oracle::ScriptedRun run;
      oracle::run_command(run, hand, *cfg, &b, g, Command::kOpen, P::kIdle);
      hand.index_block = solve_index_contact_angle(g, b.theta_T_P, w);
      oracle::run_command(run, hand, *cfg, &b, g, Command::kPrecisionGrasp, P::kHoldPrecision);
      hand.index_block.reset();
      hand.thumb_block = lateral;
      oracle::run_command(run, hand, *cfg, &b, g, Command::kTransitionToLateral, P::kHoldLateral);
      const bool coordinated = cfg->index_coordination;
      if (run.phases.back() != P::kHoldLateral || !contains(run.phases, P::kS2FinalClosure) ||
          contains(run.phases, P::kS2IndexReposition) != coordinated || run.off_graph != 0) {
        ok = false;
        why = "PL trace at " + std::to_string(w) + " mm";
      }
    }
    oracle::ScriptedHand hand(g);
    oracle::ScriptedRun run;
    oracle::run_command(run, hand, with, &b, g, Command::kOpen, P::kIdle);
    hand.thumb_block = lateral;
    oracle::run_command(run, hand, with, &b, g, Command::kLateralGrasp, P::kHoldLateral);
    hand.thumb_block.reset();
    const std::size_t lp_start = run.phases.size();
    oracle::run_command(run, hand, with, &b, g, Command::kTransitionToPrecision, P::kHoldPrecisionFromLP);
    const std::vector<Phase> lp(run.phases.begin() + static_cast<long>(lp_start), run.phases.end());
    const std::vector<Phase> expected = {P::kLPIndexReposition, P::kLPThumbSweep, P::kHoldPrecisionFromLP};
    if (lp != expected || contains(run.phases, P::kS2FinalClosure) || run.off_graph != 0) {
      ok = false;
      why = "LP trace at " + std::to_string(w) + " mm";
    }
  }

  // Harness traces under all three conditions.
  HarnessParams params;
  for (Condition c : {Condition::kPLWithIndex, Condition::kPLWithoutIndex, Condition::kLPWithIndex}) {
    TrialSpec spec;
    spec.object = ObjectSpec{ObjectShape::kSquarePrism, 20.0, 120.0, 18.03, 0.5, "p20"};
    spec.condition = c;
    spec.seed = 11;
    const TrialResult r = run_trial(spec, g, b, params, 0, true);
    std::string text;
    for (const std::string& line : r.log) text += line + "\n";
    std::vector<Phase> phases;
    for (const LogRecord& rec : parse_log(text)) phases.push_back(rec.phase);
    const bool final_closure = contains(phases, P::kS2FinalClosure);
    const bool index_repo = contains(phases, P::kS2IndexReposition) || contains(phases, P::kLPIndexReposition);
    if (final_closure != (c != Condition::kLPWithIndex) || index_repo != (c != Condition::kPLWithoutIndex)) {
      ok = false;
      why = "harness trace " + std::string(to_string(c));
    }
  }

  std::uint64_t off_graph = 0;
  const int kTicks = 1000000;
  std::mt19937_64 rng(20260419);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ControllerConfig fuzz = with;
  ControllerState s;
  for (int i = 0; i < kTicks; ++i) {
    if (i == kTicks / 2) fuzz.index_coordination = false;
    std::optional<Command> cmd;
    if (u(rng) < 0.05) cmd = static_cast<Command>(static_cast<int>(u(rng) * 6.0) % 6);
    const Sensors sensors{g.thumb_limits.min + u(rng) * g.thumb_limits.span(),
                          g.index_limits.min + u(rng) * g.index_limits.span(), u(rng) * 700.0, u(rng) * 700.0};
    const ControllerStep step = controller_step(s, fuzz, &b, g, sensors, cmd);
    if (!is_valid_transition(s.phase, step.state.phase)) ++off_graph;
    s = step.state;
  }
  if (off_graph != 0) {
    ok = false;
    why = std::to_string(off_graph) + " off-graph transitions in fuzz";
  }
  verdict(3, "phase sequences", ok,
          ok ? "PL w/, PL w/o and LP traces as expected; 1e6-tick fuzz: 0 off-graph transitions" : why);
}

// Returns the reading index (1-based) at which the phase changes, or -1.
int trigger_tick(const CalibrationBundle& b, const HandGeometry& g, const ControllerConfig& cfg, ControllerState s,
                 const std::vector<double>& currents, bool thumb) {
  const Phase start = s.phase;
  for (std::size_t i = 0; i < currents.size(); ++i) {
    Sensors sensors{0.2, 0.2, 0.0, 0.0};
    (thumb ? sensors.I_T : sensors.I_I) = currents[i];
    s = controller_step(s, cfg, &b, g, sensors, std::nullopt).state;
    if (s.phase != start) return static_cast<int>(i) + 1;
  }
  return -1;
}

// 4. Threshold and debounce semantics on both current channels.
void criterion_thresholds() {
  const HandGeometry g = default_geometry();
  const CalibrationBundle b = build_calibration(g);
  const ControllerConfig cfg = make_controller_config(b);
  const ControllerState closing = controller_step({}, cfg, &b, g, {}, Command::kPrecisionGrasp).state;
  ControllerState final_closure;
  final_closure.phase = P::kS2FinalClosure;
  final_closure.w_hat = 20.0;
  final_closure.thumb_goal = g.thumb_limits.min;
  bool ok = true;
  int cases = 0;
  for (int d = 1; d <= 4; ++d) {
    ControllerConfig c = cfg;
    c.debounce_ticks = d;
    for (bool thumb : {false, true}) {
      const ControllerState s = thumb ? final_closure : closing;
      const double th = thumb ? c.I_T_th : c.I_I_th;
      const double above = std::nextafter(th, 1e9);
      // Exactly at threshold never fires.
      ok = ok && trigger_tick(b, g, c, s, std::vector<double>(50, th), thumb) == -1;
      // Isolated spikes (any height) never fire when d > 1.
      std::vector<double> spikes;
      for (int k = 0; k < 20; ++k) {
        for (int j = 0; j < d - 1; ++j) spikes.push_back(1e6);
        spikes.push_back(0.0);
      }
      if (d > 1) ok = ok && trigger_tick(b, g, c, s, spikes, thumb) == -1;
      // d consecutive readings just above threshold fire on the d-th.
      std::vector<double> run = {0.0, 0.0};
      for (int j = 0; j < d; ++j) run.push_back(above);
      ok = ok && trigger_tick(b, g, c, s, run, thumb) == 2 + d;
      // The other channel never fires this phase.
      ok = ok && trigger_tick(b, g, c, s, std::vector<double>(20, 1e6), !thumb) == -1;
      cases += 4;
    }
  }
  verdict(4, "threshold and debounce", ok,
          std::to_string(cases) + " traces: strict >, debounce 1-4, single-tick spikes and cross-channel currents");
}

// 5. LP stability test vs brute force, and the pinch slip law.
void criterion_stability() {
  std::mt19937_64 rng(777);
  int compared = 0, agreed = 0, redrawn = 0;
  while (compared < 100) {
    const oracle::StabilityInstance s = oracle::random_instance(rng);
    const oracle::BruteForceResult bf =
        oracle::brute_force_stability(s.contacts, s.grip, s.mass, s.gravity_dir, s.torque_balance);
    if (bf.ambiguous) {
      ++redrawn;
      continue;
    }
    StabilityOptions opt;
    opt.torque_balance = s.torque_balance;
    agreed += quasi_static_stability(s.contacts, s.grip, s.mass, s.gravity_dir, opt).stable == bf.stable;
    ++compared;
  }
  double worst = 0.0;
  for (double mu : {0.2, 0.35, 0.5, 0.8}) {
    for (double grip : {1.0, 4.0, 7.0}) {
      const std::vector<ContactPoint> pinch = {{{-10.0, 0.0}, {1.0, 0.0}, 0.0, mu, Finger::kThumb},
                                               {{10.0, 0.0}, {-1.0, 0.0}, 0.0, mu, Finger::kIndex}};
      double lo = 0.0, hi = 5000.0;
      for (int i = 0; i < 80; ++i) {
        const double m = 0.5 * (lo + hi);
        (quasi_static_stability(pinch, grip, m, {0.0, -1.0}).stable ? lo : hi) = m;
      }
      const double expected = 2.0 * mu * grip / 9.81 * 1000.0;
      worst = std::max(worst, std::abs(lo - expected) / expected);
    }
  }
  verdict(5, "stability test", agreed == 100 && worst <= 0.01,
          std::to_string(agreed) + "/100 agree with brute force (" + std::to_string(redrawn) +
              " ambiguous instances redrawn); pinch slip mass within " + fmt("%.2g%% of 2 mu N / g", 100.0 * worst));
}

// 6. Index support never lowers the holdable mass; prisms >= cylinders.
void criterion_dominance() {
  const HandGeometry g = default_geometry();
  const CalibrationBundle b = build_calibration(g);
  const HarnessParams params;
  bool dominance = true, shape = true;
  double largest_gain = 0.0;
  int cases = 0;
  for (double mu : {0.35, 0.5}) {
    for (double w = 5.0; w <= 30.0; w += 2.5) {
      const JointState posture{lookup_lateral_angle(b.lateral_table, w).value,
                               contact_angle_for_width(b.width_table, w).value, 0.0, 0.0};
      double with_index[2];
      int i = 0;
      for (auto s : {ObjectShape::kCylinder, ObjectShape::kSquarePrism}) {
        const ObjectSpec o{s, w, 120.0, 1.0, mu, "o"};
        with_index[i] = max_holdable_mass(g, posture, o, params.grip, true, params.physics);
        const double without = max_holdable_mass(g, posture, o, params.grip, false, params.physics);
        dominance = dominance && with_index[i] >= without;
        largest_gain = std::max(largest_gain, with_index[i] - without);
        ++i;
        ++cases;
      }
      shape = shape && with_index[1] >= with_index[0];
    }
  }
  verdict(6, "index-support dominance", dominance && shape,
          std::to_string(cases) + " postures: with >= without " + (dominance ? "everywhere" : "VIOLATED") +
              ", prism >= cylinder " + (shape ? "everywhere" : "VIOLATED") +
              fmt(", largest gain %.1f g", largest_gain));
}

struct SuiteOutputs {
  std::string csv, json;
  SuiteReport report;
  double seconds = 0.0;
};

SuiteOutputs run_shipped_suite(unsigned jobs) {
  const Scenario scenario = load_scenario(std::string(PLEXUS_DATA_DIR) + "/table1_scenario.yaml");
  const HandGeometry g = default_geometry();
  const CalibrationBundle b = build_calibration(g);
  const ReferenceTable ref = load_reference(std::string(PLEXUS_DATA_DIR) + "/table1_reference.csv");
  const auto t0 = Clock::now();
  SuiteOutputs out;
  out.report = run_suite(expand_specs(scenario), g, b, scenario.params, jobs);
  out.seconds = seconds_since(t0);
  const std::vector<TrendRow> trends = compare_trends(out.report, ref);
  out.csv = report_to_csv(out.report);
  out.json = report_to_json(out.report, make_metadata(scenario, b), &trends,
                            run_trend_checks(out.report, scenario.checks)) +
             trends_to_csv(trends);
  return out;
}

// 7. Shipped scenario trends.
void check_trends(const SuiteOutputs& one) {
  std::map<std::string, std::map<Condition, double>> rate;
  std::map<std::string, std::string> material;
  for (const SuiteRow& r : one.report.rows) {
    rate[r.label][r.condition] = r.success_rate();
    material[r.label] = r.material;
  }
  bool pla = true, dominance = true;
  int pla_count = 0, pla_full = 0;
  double worst_margin = 1e9;
  for (const auto& [label, rates] : rate) {
    const double with = rates.at(Condition::kPLWithIndex), without = rates.at(Condition::kPLWithoutIndex);
    if (material[label] == "PLA") {
      ++pla_count;
      pla = pla && with == 100.0;
      pla_full += with == 100.0;
    }
    worst_margin = std::min(worst_margin, with - without);
    dominance = dominance && with >= without - 10.0;
  }
  const std::string heavy = "square_prism-30-Al";
  const bool has_heavy = rate.count(heavy) > 0;
  const double gain =
      has_heavy ? rate[heavy][Condition::kPLWithIndex] - rate[heavy][Condition::kPLWithoutIndex] : -1e9;
  const bool fast = one.seconds < 60.0;
  verdict(7, "shipped scenario", pla && dominance && has_heavy && gain >= 30.0 && fast && pla_count == 12,
          fmt("(a) %g/%g PLA objects at 100%% under PL w/; (b) min(w/ - w/o) = %g pp; (c) Al prism 30 mm gain %g pp;",
              double(pla_full), double(pla_count), worst_margin, gain) +
              " " + std::to_string(one.report.rows.size()) + fmt(" rows in %.2f s", one.seconds));
}

// 7 and 8: one shipped-suite run shared by both; 8 repeats it with 1 and
// 4 jobs and compares the bytes.
void criterion_suite(bool trends, bool determinism) {
  const SuiteOutputs one = run_shipped_suite(1);
  if (trends) check_trends(one);
  if (!determinism) return;
  const SuiteOutputs again = run_shipped_suite(1);
  const SuiteOutputs parallel = run_shipped_suite(4);
  const bool identical = one.csv == again.csv && one.json == again.json && one.csv == parallel.csv &&
                         one.json == parallel.json;
  verdict(8, "determinism", identical,
          fmt("CSV %g bytes, JSON+trend %g bytes; identical across 2 runs and jobs 1 vs 4", double(one.csv.size()),
              double(one.json.size())));
}

}  // namespace

// Usage: plexus_acceptance [N ...]  (criterion numbers; default: all).
int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };
  try {
    if (want(1)) criterion_width();
    if (want(2)) criterion_kinematics();
    if (want(3)) criterion_fsm();
    if (want(4)) criterion_thresholds();
    if (want(5)) criterion_stability();
    if (want(6)) criterion_dominance();
    if (want(7) || want(8)) criterion_suite(want(7), want(8));
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
