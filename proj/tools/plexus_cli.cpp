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

// `plexus` command-line tool. Exit codes:
//   0 success
//   1 a requested check failed (suite/report-diff --check, replay graph violation)
//   2 input error (usage, unreadable or malformed file, mismatched bundle)
//   3 infeasible computation (no stable calibration angle, setup failure, ...)
// See docs/cli.md for the full reference.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plexus/calibration.hpp"
#include "plexus/controller.hpp"
#include "plexus/error.hpp"
#include "plexus/geometry_io.hpp"
#include "plexus/harness.hpp"
#include "plexus/report.hpp"
#include "plexus/scenario.hpp"
#include "plexus/yaml_util.hpp"

namespace {

using namespace plexus;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaError:
    case ErrorCode::kIoFailure:
    case ErrorCode::kConfigMismatch:
    case ErrorCode::kCalibrationMissing:
    case ErrorCode::kMissingWidth:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidGeometry:
    case ErrorCode::kCorruptLog:
      return kExitInputError;
    default:
      return kExitInfeasible;
  }
}

// Default configuration directory ($PLEXUS_CONFIG_DIR).
std::optional<fs::path> config_dir() {
  const char* dir = std::getenv("PLEXUS_CONFIG_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return fs::path(dir);
}

// An explicit path, else `name` inside the config directory when it exists.
std::optional<std::string> resolve(const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  if (auto dir = config_dir()) {
    const fs::path p = *dir / name;
    if (fs::exists(p)) return p.string();
  }
  return std::nullopt;
}

HandGeometry load_geometry_or_default(const std::string& path) {
  if (auto p = resolve(path, "default_geometry.yaml")) return load_geometry(*p);
  return default_geometry();
}

CalibrationBundle require_bundle(const std::string& path, const HandGeometry& geom) {
  const auto p = resolve(path, "bundle.yaml");
  if (!p) throw Error(ErrorCode::kCalibrationMissing, "no calibration bundle (pass --bundle or set PLEXUS_CONFIG_DIR)");
  if (!fs::exists(*p)) throw Error(ErrorCode::kCalibrationMissing, "bundle '" + *p + "' does not exist");
  return load_bundle(*p, geom);
}

Scenario require_scenario(const std::string& path) {
  const auto p = resolve(path, "scenario.yaml");
  if (!p) throw Error(ErrorCode::kSchemaError, "no scenario (pass --scenario or set PLEXUS_CONFIG_DIR)");
  return load_scenario(*p);
}

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string geometry;
  std::string output;
  std::vector<double> width_grid;
  std::vector<double> lateral_grid;
  std::optional<double> offset_correction;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const HandGeometry geom = load_geometry_or_default(a.geometry);
  CalibrationParams params;
  if (!a.width_grid.empty()) params.width_grid = a.width_grid;
  if (!a.lateral_grid.empty()) params.lateral_grid = a.lateral_grid;
  if (a.offset_correction) params.offset_correction = *a.offset_correction;
  const CalibrationBundle bundle = build_calibration(geom, params);
  yamlio::write_text_file(a.output, bundle_to_yaml(bundle));

  std::cout << "geometry hash     " << bundle.geometry_hash << "\n"
            << "theta_T,P         " << fmt(bundle.theta_T_P, 6) << " rad\n"
            << "theta_I,L,fixed   " << fmt(bundle.theta_I_L_fixed, 6) << " rad\n"
            << "width table f (theta_I,c -> w):\n";
  for (const WidthEntry& e : bundle.width_table.entries) {
    std::cout << "  " << std::setw(9) << fmt(e.theta_I_c, 6) << " rad  ->  " << fmt(e.width, 3) << " mm\n";
  }
  std::cout << "lateral table g (w -> theta_T,L):\n";
  for (const LateralEntry& e : bundle.lateral_table.entries) {
    std::cout << "  " << std::setw(7) << fmt(e.width, 3) << " mm  ->  " << fmt(e.theta_T_L, 6) << " rad\n";
  }
  std::cout << "wrote " << a.output << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------- trial

struct TrialArgs {
  std::string geometry;
  std::string bundle;
  std::string scenario;
  std::string object;
  std::string condition = "PL_with_index";
  std::optional<std::uint64_t> seed;
  int trial_index = 0;
  std::string log;
  std::optional<double> open_loop_width;
  std::optional<double> index_threshold;
  std::optional<double> thumb_threshold;
  bool zero_noise = false;
};

int cmd_trial(const TrialArgs& a) {
  const HandGeometry geom = load_geometry_or_default(a.geometry);
  const CalibrationBundle bundle = require_bundle(a.bundle, geom);
  const Scenario scenario = require_scenario(a.scenario);
  const ScenarioObject* obj = nullptr;
  for (const ScenarioObject& o : scenario.objects) {
    if (o.label == a.object) obj = &o;
  }
  if (obj == nullptr) throw Error(ErrorCode::kSchemaError, "object '" + a.object + "' is not in the scenario");

  TrialSpec spec;
  spec.object = ObjectSpec{obj->shape, obj->width, obj->height, obj->mass, scenario.material(obj->material).mu,
                           obj->label};
  spec.material = obj->material;
  spec.condition = condition_from_string(a.condition);
  spec.trials = 1;
  spec.noise = scenario.noise;
  if (a.zero_noise) {
    spec.noise.position_sigma = spec.noise.orientation_sigma = spec.noise.friction_sigma = 0.0;
  }
  spec.seed = a.seed.value_or(scenario.seed);

  HarnessParams params = scenario.params;
  if (a.index_threshold) params.controller.I_I_th = *a.index_threshold;
  if (a.thumb_threshold) params.controller.I_T_th = *a.thumb_threshold;
  if (a.open_loop_width) {
    params.controller.mode = ControlMode::kOpenLoop;
    params.controller.open_loop_width = *a.open_loop_width;
  }

  const TrialResult r = run_trial(spec, geom, bundle, params, a.trial_index, !a.log.empty());
  if (!a.log.empty()) {
    std::string text;
    for (const std::string& line : r.log) text += line + "\n";
    yamlio::write_text_file(a.log, text);
  }
  std::cout << "object        " << spec.object.label << "\n"
            << "condition     " << to_string(spec.condition) << "\n"
            << "seed          " << r.seed << " (trial " << r.trial_index << ")\n"
            << "result        " << (r.success ? "success" : "failure") << "\n"
            << "failure mode  " << to_string(r.failure) << "\n"
            << "w_hat         " << fmt(r.w_hat, 4) << " mm (error " << fmt(r.w_error, 4) << " mm"
            << (r.clamped_estimate ? ", clamped" : "") << ")\n"
            << "placement     offset " << fmt(r.placement.tangential_offset, 4) << " mm, tilt "
            << fmt(r.placement.tilt, 5) << " rad, friction x" << fmt(r.placement.friction_scale, 4) << "\n"
            << "resamples     " << r.resamples << "\n"
            << "trace steps   " << r.trace_steps << ", min margin " << fmt(r.min_margin, 5) << "\n";
  if (!a.log.empty()) std::cout << "log           " << a.log << " (" << r.log.size() << " records)\n";
  return kExitOk;
}

// -------------------------------------------------------------------- suite

struct SuiteArgs {
  std::string geometry;
  std::string bundle;
  std::string scenario;
  std::string output_dir;
  std::string reference;
  std::optional<std::uint64_t> seed;
  std::optional<int> seed_count;
  std::optional<int> trials;
  unsigned jobs = 0;
  bool check = false;
};

int cmd_suite(const SuiteArgs& a) {
  const HandGeometry geom = load_geometry_or_default(a.geometry);
  const CalibrationBundle bundle = require_bundle(a.bundle, geom);
  Scenario scenario = require_scenario(a.scenario);
  if (a.seed) scenario.seed = *a.seed;
  if (a.seed_count) scenario.seed_count = *a.seed_count;
  if (a.trials) scenario.trials = *a.trials;
  scenario.validate();
  std::optional<ReferenceTable> reference;
  if (auto ref = resolve(a.reference, "table1_reference.csv")) reference = load_reference(*ref);

  const SuiteReport report = run_suite(expand_specs(scenario), geom, bundle, scenario.params, a.jobs);
  const std::vector<TrendCheck> checks = run_trend_checks(report, scenario.checks);
  std::vector<TrendRow> trends;
  if (reference) trends = compare_trends(report, *reference);

  fs::create_directories(a.output_dir);
  const fs::path out(a.output_dir);
  yamlio::write_text_file((out / "report.csv").string(), report_to_csv(report));
  yamlio::write_text_file((out / "report.json").string(),
                          report_to_json(report, make_metadata(scenario, bundle), reference ? &trends : nullptr, checks));
  if (reference) yamlio::write_text_file((out / "trend.csv").string(), trends_to_csv(trends));

  std::cout << std::left << std::setw(22) << "object" << std::setw(18) << "condition" << std::right << std::setw(8)
            << "rate%" << std::setw(10) << "|w_err|" << "\n";
  for (const SuiteRow& r : report.rows) {
    std::cout << std::left << std::setw(22) << r.label << std::setw(18) << to_string(r.condition) << std::right
              << std::setw(8) << fmt(r.success_rate(), 1) << std::setw(10) << fmt(r.mean_abs_w_error, 3) << "\n";
  }
  for (const TrendCheck& c : checks) {
    std::cout << "check " << c.id << ": " << to_string(c.status) << " - " << c.description << " (" << c.detail
              << ")\n";
  }
  std::cout << "wrote " << (out / "report.csv").string() << ", " << (out / "report.json").string()
            << (reference ? ", " + (out / "trend.csv").string() : std::string()) << "\n";
  if (a.check && !all_checks_pass(checks)) return kExitCheckFailed;
  return kExitOk;
}

// ------------------------------------------------------------------- replay

struct ReplayArgs {
  std::string log;
  bool changes_only = false;
};

int cmd_replay(const ReplayArgs& a) {
  const std::vector<LogRecord> records = parse_log(yamlio::read_text_file(a.log));
  if (records.empty()) throw Error(ErrorCode::kCorruptLog, a.log + ": empty log");
  std::cout << std::setw(7) << "tick" << "  " << std::left << std::setw(22) << "phase" << std::right << std::setw(9)
            << "theta_T" << std::setw(9) << "theta_I" << std::setw(8) << "I_T" << std::setw(8) << "I_I"
            << "  events\n";
  Phase previous = Phase::kIdle;
  std::optional<std::uint64_t> previous_tick;
  for (const LogRecord& r : records) {
    if (previous_tick && r.tick <= *previous_tick) {
      throw Error(ErrorCode::kCorruptLog, a.log + ": tick " + std::to_string(r.tick) + " is not increasing");
    }
    const bool changed = r.phase != previous;
    if (changed && !is_valid_transition(previous, r.phase)) {
      std::cout << "illegal transition at tick " << r.tick << ": " << to_string(previous) << " -> "
                << to_string(r.phase) << "\n";
      return kExitCheckFailed;
    }
    if (!a.changes_only || changed || !r.events.empty()) {
      std::cout << std::setw(7) << r.tick << "  " << std::left << std::setw(22) << to_string(r.phase) << std::right
                << std::setw(9) << fmt(r.sensors.theta_T, 4) << std::setw(9) << fmt(r.sensors.theta_I, 4)
                << std::setw(8) << fmt(r.sensors.I_T, 1) << std::setw(8) << fmt(r.sensors.I_I, 1) << " ";
      for (const Event& e : r.events) {
        std::cout << ' ' << to_string(e.type);
        if (!e.detail.empty()) std::cout << '(' << e.detail << ')';
        if (e.value) std::cout << '=' << fmt(*e.value, 4);
      }
      std::cout << "\n";
    }
    previous = r.phase;
    previous_tick = r.tick;
  }
  std::cout << records.size() << " records, all phase transitions on the controller graph\n";
  return kExitOk;
}

// -------------------------------------------------------------- report-diff

struct DiffArgs {
  std::string report;
  std::string reference;
  std::string against;
  bool check = false;
  std::string scenario;
};

int cmd_report_diff(const DiffArgs& a) {
  const SuiteReport report = parse_report_csv(yamlio::read_text_file(a.report), a.report);
  int status = kExitOk;

  if (!a.against.empty()) {
    const SuiteReport other = parse_report_csv(yamlio::read_text_file(a.against), a.against);
    const std::string lhs = report_to_csv(report);
    const std::string rhs = report_to_csv(other);
    if (lhs == rhs) {
      std::cout << "reports identical (" << report.rows.size() << " rows)\n";
    } else {
      std::cout << "reports differ:\n";
      const std::size_t n = std::max(report.rows.size(), other.rows.size());
      for (std::size_t i = 0; i < n; ++i) {
        const SuiteRow* x = i < report.rows.size() ? &report.rows[i] : nullptr;
        const SuiteRow* y = i < other.rows.size() ? &other.rows[i] : nullptr;
        SuiteReport one, two;
        if (x) one.rows.push_back(*x);
        if (y) two.rows.push_back(*y);
        if (report_to_csv(one) == report_to_csv(two)) continue;
        std::cout << "  row " << i + 1 << ": "
                  << (x ? x->label + " " + std::string(to_string(x->condition)) + " " + fmt(x->success_rate(), 1)
                        : std::string("<missing>"))
                  << "  vs  "
                  << (y ? y->label + " " + std::string(to_string(y->condition)) + " " + fmt(y->success_rate(), 1)
                        : std::string("<missing>"))
                  << "\n";
      }
      status = kExitCheckFailed;
    }
  }

  if (auto ref = resolve(a.reference, "table1_reference.csv")) {
    const std::vector<TrendRow> trends = compare_trends(report, load_reference(*ref));
    std::cout << std::left << std::setw(22) << "object" << std::right << std::setw(16) << "sim w/,w/o,LP"
              << std::setw(16) << "ref w/,w/o,LP" << std::setw(10) << "trend" << "\n";
    int agree = 0, compared = 0;
    for (const TrendRow& t : trends) {
      auto triple = [](const std::array<std::optional<double>, kConditionCount>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (v[i] ? fmt(*v[i], 0) : std::string("-"));
        return s;
      };
      std::cout << std::left << std::setw(22) << t.label << std::right << std::setw(16) << triple(t.sim_rates)
                << std::setw(16) << triple(t.ref_rates) << std::setw(10)
                << (t.agreement ? (*t.agreement ? "agree" : "disagree") : "-") << "\n";
      if (t.agreement) {
        ++compared;
        agree += *t.agreement ? 1 : 0;
      }
    }
    std::cout << "sign agreement of (PL w/ - PL w/o): " << agree << "/" << compared << "\n";
  }

  if (a.check) {
    TrendCheckConfig config;
    if (auto sc = resolve(a.scenario, "scenario.yaml")) config = load_scenario(*sc).checks;
    const std::vector<TrendCheck> checks = run_trend_checks(report, config);
    for (const TrendCheck& c : checks) {
      std::cout << "check " << c.id << ": " << to_string(c.status) << " (" << c.detail << ")\n";
    }
    if (!all_checks_pass(checks)) status = kExitCheckFailed;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plexus: planar simulator and controller for precision/lateral in-hand manipulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "plexus 0.1.0");

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Build a calibration bundle from a hand geometry");
  c->add_option("--geometry,-g", cal.geometry, "Hand geometry YAML (default: built-in geometry)");
  c->add_option("--output,-o", cal.output, "Bundle file to write")->required();
  c->add_option("--width-grid", cal.width_grid, "Widths (mm) of the f table")->delimiter(',');
  c->add_option("--lateral-grid", cal.lateral_grid, "Widths (mm) of the g table")->delimiter(',');
  c->add_option("--offset-correction", cal.offset_correction, "Hardware offset added to width estimates (mm)");

  TrialArgs tr;
  auto* t = app.add_subcommand("trial", "Run one manipulation trial and optionally write its event log");
  t->add_option("--geometry,-g", tr.geometry, "Hand geometry YAML");
  t->add_option("--bundle,-b", tr.bundle, "Calibration bundle");
  t->add_option("--scenario,-s", tr.scenario, "Scenario YAML providing the object and physics");
  t->add_option("--object", tr.object, "Object label from the scenario")->required();
  t->add_option("--condition", tr.condition, "PL_with_index | PL_without_index | LP_with_index")
      ->check(CLI::IsMember({"PL_with_index", "PL_without_index", "LP_with_index"}));
  t->add_option("--seed", tr.seed, "Seed (default: scenario seed)");
  t->add_option("--trial-index", tr.trial_index, "Trial index within the seed")->check(CLI::NonNegativeNumber);
  t->add_option("--log", tr.log, "Write the per-tick event log (JSON lines) here");
  t->add_option("--open-loop-width", tr.open_loop_width, "Run the open-loop baseline with this configured width (mm)");
  t->add_option("--index-threshold", tr.index_threshold, "Index contact current threshold (mA)");
  t->add_option("--thumb-threshold", tr.thumb_threshold, "Thumb closure current threshold (mA)");
  t->add_flag("--zero-noise", tr.zero_noise, "Disable placement noise");

  SuiteArgs su;
  auto* s = app.add_subcommand("suite", "Run every object x condition x seed of a scenario and write reports");
  s->add_option("--geometry,-g", su.geometry, "Hand geometry YAML");
  s->add_option("--bundle,-b", su.bundle, "Calibration bundle");
  s->add_option("--scenario,-s", su.scenario, "Scenario YAML");
  s->add_option("--output-dir,-o", su.output_dir, "Directory for report.csv, report.json, trend.csv")->required();
  s->add_option("--reference,-r", su.reference, "Reference success-rate CSV for the trend comparison");
  s->add_option("--seed", su.seed, "Override the scenario's first seed");
  s->add_option("--seed-count", su.seed_count, "Override the number of seeds")->check(CLI::PositiveNumber);
  s->add_option("--trials", su.trials, "Override the trials per seed")->check(CLI::PositiveNumber);
  s->add_option("--jobs,-j", su.jobs, "Worker threads (default: available processors)");
  s->add_flag("--check", su.check, "Exit 1 when an acceptance trend check fails");

  ReplayArgs rp;
  auto* r = app.add_subcommand("replay", "Render an event log as a timeline and verify its phase transitions");
  r->add_option("log", rp.log, "Event log (JSON lines)")->required();
  r->add_flag("--changes-only", rp.changes_only, "Only print ticks with a phase change or events");

  DiffArgs df;
  auto* d = app.add_subcommand("report-diff", "Compare a CSV report with a reference table or another report");
  d->add_option("report", df.report, "report.csv written by `plexus suite`")->required();
  d->add_option("--reference,-r", df.reference, "Reference success-rate CSV");
  d->add_option("--against", df.against, "Another report.csv; exit 1 when they differ");
  d->add_option("--scenario,-s", df.scenario, "Scenario providing the trend-check parameters");
  d->add_flag("--check", df.check, "Exit 1 when an acceptance trend check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*c) return cmd_calibrate(cal);
    if (*t) return cmd_trial(tr);
    if (*s) return cmd_suite(su);
    if (*r) return cmd_replay(rp);
    if (*d) return cmd_report_diff(df);
  } catch (const Error& e) {
    std::cerr << "plexus: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "plexus: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
