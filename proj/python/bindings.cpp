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

// Python bindings: a thin layer over the geometry, calibration, harness and
// report APIs. Results are returned as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "plexus/calibration.hpp"
#include "plexus/error.hpp"
#include "plexus/geometry_io.hpp"
#include "plexus/harness.hpp"
#include "plexus/report.hpp"
#include "plexus/scenario.hpp"

namespace py = pybind11;
using namespace plexus;

namespace {

py::dict row_to_dict(const SuiteRow& r) {
  py::dict d;
  d["object"] = r.label;
  d["shape"] = std::string(to_string(r.shape));
  d["width_mm"] = r.width;
  d["material"] = r.material;
  d["mass_g"] = r.mass;
  d["condition"] = std::string(to_string(r.condition));
  d["trials"] = r.trials;
  d["successes"] = r.successes;
  d["success_rate"] = r.success_rate();
  d["mean_abs_w_error_mm"] = r.mean_abs_w_error;
  py::dict failures;
  for (int k = 1; k < kTrialFailureCount; ++k) {
    failures[py::str(std::string(to_string(static_cast<TrialFailure>(k))))] = r.failures[static_cast<std::size_t>(k)];
  }
  d["failures"] = failures;
  return d;
}

TrialSpec spec_for(const Scenario& scenario, const std::string& label, const std::string& condition) {
  for (const ScenarioObject& o : scenario.objects) {
    if (o.label != label) continue;
    TrialSpec spec;
    spec.object = ObjectSpec{o.shape, o.width, o.height, o.mass, scenario.material(o.material).mu, o.label};
    spec.material = o.material;
    spec.condition = condition_from_string(condition);
    spec.trials = 1;
    spec.noise = scenario.noise;
    spec.seed = scenario.seed;
    return spec;
  }
  throw plexus::Error(plexus::ErrorCode::kSchemaError, "object '" + label + "' is not in the scenario");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Planar simulator and controller for PL/LP in-hand manipulation";

  // Messages start with the error code name, e.g. "SchemaError: ...".
  py::register_exception<plexus::Error>(m, "PlexusError", PyExc_RuntimeError);

  py::class_<HandGeometry>(m, "HandGeometry")
      .def("to_yaml", &geometry_to_yaml)
      .def("hash", &geometry_hash)
      .def("validate", &HandGeometry::validate)
      .def_property_readonly("thumb_limits", [](const HandGeometry& g) {
        return py::make_tuple(g.thumb_limits.min, g.thumb_limits.max);
      })
      .def_property_readonly("index_limits", [](const HandGeometry& g) {
        return py::make_tuple(g.index_limits.min, g.index_limits.max);
      })
      .def_property_readonly("thumb_stroke", [](const HandGeometry& g) {
        return py::make_tuple(g.thumb_stroke.min, g.thumb_stroke.max);
      });

  m.def("default_geometry", &default_geometry);
  m.def("load_geometry", &load_geometry, py::arg("path"));
  m.def("parse_geometry", &parse_geometry, py::arg("text"), py::arg("source") = "<geometry>");

  m.def("thumb_angle_from_stroke", &thumb_angle_from_stroke, py::arg("geometry"), py::arg("stroke_mm"));
  m.def("stroke_from_thumb_angle", &stroke_from_thumb_angle, py::arg("geometry"), py::arg("angle"));
  m.def("index_angle_from_stroke", &index_angle_from_stroke, py::arg("geometry"), py::arg("stroke_mm"));
  m.def("stroke_from_index_angle", &stroke_from_index_angle, py::arg("geometry"), py::arg("angle"));
  m.def("solve_index_contact_angle", &solve_index_contact_angle, py::arg("geometry"), py::arg("theta_T_P"),
        py::arg("width_mm"));
  m.def(
      "fingertip_gap",
      [](const HandGeometry& g, double theta_T, double theta_I, bool lateral) {
        return fingertip_gap(g, theta_T, theta_I, lateral ? GraspType::kLateral : GraspType::kPrecision);
      },
      py::arg("geometry"), py::arg("theta_T"), py::arg("theta_I"), py::arg("lateral") = false);

  py::class_<CalibrationBundle>(m, "CalibrationBundle")
      .def_readonly("theta_T_P", &CalibrationBundle::theta_T_P)
      .def_readonly("theta_I_L_fixed", &CalibrationBundle::theta_I_L_fixed)
      .def_readonly("geometry_hash", &CalibrationBundle::geometry_hash)
      .def_property_readonly("width_table",
                             [](const CalibrationBundle& b) {
                               py::list out;
                               for (const WidthEntry& e : b.width_table.entries) {
                                 out.append(py::make_tuple(e.width, e.theta_I_c));
                               }
                               return out;
                             })
      .def_property_readonly("lateral_table",
                             [](const CalibrationBundle& b) {
                               py::list out;
                               for (const LateralEntry& e : b.lateral_table.entries) {
                                 out.append(py::make_tuple(e.width, e.theta_T_L));
                               }
                               return out;
                             })
      .def("estimate_width",
           [](const CalibrationBundle& b, double theta_I_c) {
             const Lookup l = estimate_width(b.width_table, theta_I_c);
             return py::make_tuple(l.value, l.clamped);
           })
      .def("lateral_angle",
           [](const CalibrationBundle& b, double w_hat) {
             const Lookup l = lookup_lateral_angle(b.lateral_table, w_hat);
             return py::make_tuple(l.value, l.clamped);
           })
      .def("to_yaml", &bundle_to_yaml);

  m.def(
      "build_calibration",
      [](const HandGeometry& g, std::optional<std::vector<double>> width_grid,
         std::optional<std::vector<double>> lateral_grid, double offset_correction) {
        CalibrationParams p;
        if (width_grid) p.width_grid = *width_grid;
        if (lateral_grid) p.lateral_grid = *lateral_grid;
        p.offset_correction = offset_correction;
        return build_calibration(g, p);
      },
      py::arg("geometry"), py::arg("width_grid") = py::none(), py::arg("lateral_grid") = py::none(),
      py::arg("offset_correction") = 0.0);
  m.def("load_bundle", py::overload_cast<const std::string&, const HandGeometry&>(&load_bundle), py::arg("path"),
        py::arg("geometry"));
  m.def("parse_bundle", &parse_bundle, py::arg("text"), py::arg("source") = "<bundle>");

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("trials", &Scenario::trials)
      .def("seeds", &Scenario::seeds)
      .def_property_readonly("objects", [](const Scenario& s) {
        py::list out;
        for (const ScenarioObject& o : s.objects) out.append(o.label);
        return out;
      });
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<scenario>");

  m.def(
      "run_trial",
      [](const Scenario& scenario, const HandGeometry& g, const CalibrationBundle& b, const std::string& object,
         const std::string& condition, std::optional<std::uint64_t> seed, int trial_index, bool zero_noise,
         std::optional<double> open_loop_width, bool record_log) {
        TrialSpec spec = spec_for(scenario, object, condition);
        if (seed) spec.seed = *seed;
        if (zero_noise) spec.noise.position_sigma = spec.noise.orientation_sigma = spec.noise.friction_sigma = 0.0;
        HarnessParams params = scenario.params;
        if (open_loop_width) {
          params.controller.mode = ControlMode::kOpenLoop;
          params.controller.open_loop_width = *open_loop_width;
        }
        TrialResult r;
        {
          py::gil_scoped_release release;
          r = run_trial(spec, g, b, params, trial_index, record_log);
        }
        py::dict d;
        d["success"] = r.success;
        d["failure"] = std::string(to_string(r.failure));
        d["w_hat"] = r.w_hat;
        d["w_error"] = r.w_error;
        d["clamped_estimate"] = r.clamped_estimate;
        d["seed"] = r.seed;
        d["trial_index"] = r.trial_index;
        d["resamples"] = r.resamples;
        d["min_margin"] = r.min_margin;
        d["log"] = r.log;
        return d;
      },
      py::arg("scenario"), py::arg("geometry"), py::arg("bundle"), py::arg("object"), py::arg("condition"),
      py::arg("seed") = py::none(), py::arg("trial_index") = 0, py::arg("zero_noise") = false,
      py::arg("open_loop_width") = py::none(), py::arg("record_log") = false);

  py::class_<SuiteReport>(m, "SuiteReport")
      .def_readonly("seeds", &SuiteReport::seeds)
      .def_property_readonly("rows",
                             [](const SuiteReport& r) {
                               py::list out;
                               for (const SuiteRow& row : r.rows) out.append(row_to_dict(row));
                               return out;
                             })
      .def("to_csv", &report_to_csv)
      .def("checks", [](const SuiteReport& r, const Scenario& s) {
        py::list out;
        for (const TrendCheck& c : run_trend_checks(r, s.checks)) {
          py::dict d;
          d["id"] = c.id;
          d["status"] = std::string(to_string(c.status));
          d["detail"] = c.detail;
          out.append(d);
        }
        return out;
      });

  m.def(
      "run_suite",
      [](const Scenario& scenario, const HandGeometry& g, const CalibrationBundle& b, unsigned jobs) {
        const std::vector<TrialSpec> specs = expand_specs(scenario);
        py::gil_scoped_release release;
        return run_suite(specs, g, b, scenario.params, jobs);
      },
      py::arg("scenario"), py::arg("geometry"), py::arg("bundle"), py::arg("jobs") = 0);
  m.def("parse_report_csv", &parse_report_csv, py::arg("text"), py::arg("source") = "<report>");
}
