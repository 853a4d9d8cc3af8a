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

#include "plexus/scenario.hpp"

#include <algorithm>
#include <numbers>
#include <set>

#include "plexus/error.hpp"
#include "plexus/yaml_util.hpp"

namespace plexus {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string default_label(ObjectShape shape, double width, const std::string& material) {
  return std::string(to_string(shape)) + "-" + yamlio::format_double(width) + "-" + material;
}

int checked_int(const yamlio::Reader& r, const YAML::Node& node, const char* key, std::int64_t fallback) {
  const std::int64_t v = r.integer_or(node, key, fallback);
  if (v < 0 || v > 1'000'000'000) r.fail(node[key], std::string("'") + key + "' is out of range");
  return static_cast<int>(v);
}

void parse_actuator(const yamlio::Reader& r, const YAML::Node& n, ActuatorParams& a) {
  r.expect_keys(n, {"max_speed_mm_s", "free_current_mA", "load_gain_mA_per_N", "stall_current_mA", "tick_s",
                    "drivable_force_N", "ramp_ticks"});
  a.max_speed = r.num_or(n, "max_speed_mm_s", a.max_speed);
  a.free_current = r.num_or(n, "free_current_mA", a.free_current);
  a.load_gain = r.num_or(n, "load_gain_mA_per_N", a.load_gain);
  a.stall_current = r.num_or(n, "stall_current_mA", a.stall_current);
  a.tick_dt = r.num_or(n, "tick_s", a.tick_dt);
  a.drivable_force = r.num_or(n, "drivable_force_N", a.drivable_force);
  a.ramp_ticks = checked_int(r, n, "ramp_ticks", a.ramp_ticks);
}

// Converts library validation errors into schema errors located at `at`.
template <typename F>
void located(const yamlio::Reader& r, const YAML::Node& at, F&& validate) {
  try {
    validate();
  } catch (const Error& e) {
    r.fail(at, e.what());
  }
}

}  // namespace

std::vector<std::uint64_t> Scenario::seeds() const {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(std::max(seed_count, 0)));
  for (int i = 0; i < seed_count; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
  return out;
}

const MaterialSpec& Scenario::material(const std::string& material_name) const {
  for (const MaterialSpec& m : materials) {
    if (m.name == material_name) return m;
  }
  throw Error(ErrorCode::kSchemaError, "unknown material '" + material_name + "'");
}

void Scenario::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kSchemaError, "scenario: " + what);
  };
  need(seed_count >= 1, "seed_count must be >= 1");
  need(trials >= 1, "trials must be >= 1");
  need(!conditions.empty(), "at least one condition is required");
  need(!objects.empty(), "at least one object is required");
  std::set<std::string> names;
  for (const MaterialSpec& m : materials) {
    need(names.insert(m.name).second, "duplicate material '" + m.name + "'");
    need(m.mu > 0.0 && m.mu < 2.0, "material '" + m.name + "': mu must lie in (0, 2)");
  }
  std::set<std::string> labels;
  for (const ScenarioObject& o : objects) {
    need(labels.insert(o.label).second, "duplicate object label '" + o.label + "'");
    need(names.count(o.material) == 1, "object '" + o.label + "': unknown material '" + o.material + "'");
    ObjectSpec spec{o.shape, o.width, o.height, o.mass, material(o.material).mu, o.label};
    spec.validate();
  }
  std::set<Condition> seen;
  for (Condition c : conditions) need(seen.insert(c).second, "duplicate condition");
  noise.validate();
  params.validate();
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const yamlio::Reader r(source);
  const YAML::Node root = r.parse(text);
  r.expect_keys(root, {"schema_version", "name", "seed", "seed_count", "trials", "conditions", "noise", "physics",
                       "forces", "controller", "actuators", "harness", "materials", "objects", "checks",
                       "extensions"});
  Scenario s;
  const std::int64_t version = r.integer(root, "schema_version");
  if (version != Scenario::kSchemaVersion) {
    r.fail(root["schema_version"], "unsupported schema_version " + std::to_string(version));
  }
  s.name = r.str_or(root, "name", s.name);
  if (r.has(root, "seed")) s.seed = r.uinteger(root, "seed");
  s.seed_count = checked_int(r, root, "seed_count", s.seed_count);
  s.trials = checked_int(r, root, "trials", s.trials);

  if (r.has(root, "conditions")) {
    s.conditions.clear();
    for (const YAML::Node& c : r.seq(root, "conditions")) {
      if (!c.IsScalar()) r.fail(c, "condition must be a string");
      located(r, c, [&] { s.conditions.push_back(condition_from_string(c.Scalar())); });
    }
  }

  if (r.has(root, "noise")) {
    const YAML::Node n = r.map(root, "noise");
    r.expect_keys(n, {"position_sigma_mm", "orientation_sigma_deg", "friction_sigma", "truncation_sigma"});
    s.noise.position_sigma = r.num_or(n, "position_sigma_mm", s.noise.position_sigma);
    s.noise.orientation_sigma = r.num_or(n, "orientation_sigma_deg", s.noise.orientation_sigma / kDeg) * kDeg;
    s.noise.friction_sigma = r.num_or(n, "friction_sigma", s.noise.friction_sigma);
    s.noise.truncation = r.num_or(n, "truncation_sigma", s.noise.truncation);
    located(r, n, [&] { s.noise.validate(); });
  }

  PhysicsParams& ph = s.params.physics;
  if (r.has(root, "physics")) {
    const YAML::Node n = r.map(root, "physics");
    r.expect_keys(n, {"gravity_m_s2", "gravity_direction_deg", "contact_tolerance_mm", "pad_compliance_mm",
                      "grip_travel_mm", "prism_min_overlap_mm", "max_step_rad", "resettle_step_mm"});
    ph.gravity = r.num_or(n, "gravity_m_s2", ph.gravity);
    s.gravity_direction_deg = r.num_or(n, "gravity_direction_deg", s.gravity_direction_deg);
    ph.contact_tolerance = r.num_or(n, "contact_tolerance_mm", ph.contact_tolerance);
    ph.pad_compliance = r.num_or(n, "pad_compliance_mm", ph.pad_compliance);
    ph.grip_travel = r.num_or(n, "grip_travel_mm", ph.grip_travel);
    ph.prism_min_overlap = r.num_or(n, "prism_min_overlap_mm", ph.prism_min_overlap);
    ph.max_step = r.num_or(n, "max_step_rad", ph.max_step);
    ph.resettle_step = r.num_or(n, "resettle_step_mm", ph.resettle_step);
  }
  ph.gravity_dir = unit_from_angle(s.gravity_direction_deg * kDeg);

  if (r.has(root, "forces")) {
    const YAML::Node n = r.map(root, "forces");
    r.expect_keys(n, {"preload_N", "grip_N"});
    s.params.preload = r.num_or(n, "preload_N", s.params.preload);
    s.params.grip = r.num_or(n, "grip_N", s.params.grip);
  }

  if (r.has(root, "controller")) {
    ControllerConfig& c = s.params.controller;
    const YAML::Node n = r.map(root, "controller");
    r.expect_keys(n, {"index_threshold_mA", "thumb_threshold_mA", "debounce_ticks", "position_tolerance_rad",
                      "motion_timeout_ticks", "closure_timeout_ticks"});
    c.I_I_th = r.num_or(n, "index_threshold_mA", c.I_I_th);
    c.I_T_th = r.num_or(n, "thumb_threshold_mA", c.I_T_th);
    c.debounce_ticks = checked_int(r, n, "debounce_ticks", c.debounce_ticks);
    c.position_tolerance = r.num_or(n, "position_tolerance_rad", c.position_tolerance);
    c.motion_timeout_ticks = checked_int(r, n, "motion_timeout_ticks", c.motion_timeout_ticks);
    c.closure_timeout_ticks = checked_int(r, n, "closure_timeout_ticks", c.closure_timeout_ticks);
  }

  if (r.has(root, "actuators")) {
    const YAML::Node n = r.map(root, "actuators");
    r.expect_keys(n, {"thumb", "index"});
    if (r.has(n, "thumb")) parse_actuator(r, r.map(n, "thumb"), s.params.thumb_actuator);
    if (r.has(n, "index")) parse_actuator(r, r.map(n, "index"), s.params.index_actuator);
  }

  if (r.has(root, "harness")) {
    const YAML::Node n = r.map(root, "harness");
    r.expect_keys(n, {"max_resamples", "max_ticks"});
    s.params.max_resamples = checked_int(r, n, "max_resamples", s.params.max_resamples);
    s.params.max_ticks = checked_int(r, n, "max_ticks", s.params.max_ticks);
  }
  located(r, root, [&] { s.params.validate(); });

  if (r.has(root, "materials")) {
    for (const auto& kv : r.map(root, "materials")) {
      const YAML::Node m = kv.second;
      r.expect_keys(m, {"mu"});
      s.materials.push_back({kv.first.Scalar(), r.num(m, "mu")});
    }
  } else {
    s.materials = {{"PLA", 0.5}, {"Al", 0.35}};
  }

  for (const YAML::Node& o : r.seq(root, "objects")) {
    r.expect_keys(o, {"label", "shape", "width_mm", "height_mm", "material", "mass_g", "custom"});
    if (r.has(o, "custom")) {
      r.fail(o["custom"], "custom object shapes are a reserved extension point and not supported yet");
    }
    ScenarioObject obj;
    const YAML::Node shape = o["shape"];
    located(r, shape ? shape : o, [&] { obj.shape = object_shape_from_string(r.str(o, "shape")); });
    obj.width = r.num(o, "width_mm");
    obj.height = r.num_or(o, "height_mm", obj.height);
    obj.material = r.str(o, "material");
    obj.mass = r.num(o, "mass_g");
    obj.label = r.str_or(o, "label", default_label(obj.shape, obj.width, obj.material));
    s.objects.push_back(obj);
  }

  if (r.has(root, "checks")) {
    const YAML::Node n = r.map(root, "checks");
    r.expect_keys(n, {"full_success_material", "dominance_tolerance_pp", "heavy_object", "heavy_margin_pp"});
    s.checks.full_success_material = r.str_or(n, "full_success_material", s.checks.full_success_material);
    s.checks.dominance_tolerance_pp = r.num_or(n, "dominance_tolerance_pp", s.checks.dominance_tolerance_pp);
    s.checks.heavy_object = r.str_or(n, "heavy_object", s.checks.heavy_object);
    s.checks.heavy_margin_pp = r.num_or(n, "heavy_margin_pp", s.checks.heavy_margin_pp);
  }

  if (r.has(root, "extensions")) r.map(root, "extensions");  // reserved, ignored

  located(r, root, [&] { s.validate(); });
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(yamlio::read_text_file(path), path); }

std::vector<TrialSpec> expand_specs(const Scenario& scenario) {
  std::vector<TrialSpec> specs;
  const std::vector<std::uint64_t> seeds = scenario.seeds();
  for (const ScenarioObject& o : scenario.objects) {
    const MaterialSpec& m = scenario.material(o.material);
    for (Condition c : scenario.conditions) {
      for (std::uint64_t seed : seeds) {
        TrialSpec t;
        t.object = ObjectSpec{o.shape, o.width, o.height, o.mass, m.mu, o.label};
        t.material = o.material;
        t.condition = c;
        t.trials = scenario.trials;
        t.noise = scenario.noise;
        t.seed = seed;
        specs.push_back(t);
      }
    }
  }
  return specs;
}

}  // namespace plexus
