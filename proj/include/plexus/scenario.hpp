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

// Scenario files: the objects, conditions, noise, seeds and physics of an
// experiment suite. The schema is documented in docs/file_formats.md; every key
// except `objects` is optional and defaults to the library defaults.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plexus/harness.hpp"

namespace plexus {

struct MaterialSpec {
  std::string name;
  double mu = 0.5;
};

struct ScenarioObject {
  std::string label;  // defaults to "<shape>-<width>-<material>"
  ObjectShape shape = ObjectShape::kCylinder;
  double width = 0.0;   // mm
  double height = 120.0;  // mm
  std::string material;
  double mass = 0.0;    // g
};

// Parameters of the acceptance trend checks run on a suite report.
struct TrendCheckConfig {
  // Every object of this material must reach 100% under PL with index.
  std::string full_success_material = "PLA";
  // PL with index may trail PL without index by at most this many points.
  double dominance_tolerance_pp = 10.0;
  // This object must gain at least heavy_margin_pp from index support.
  std::string heavy_object = "square_prism-30-Al";
  double heavy_margin_pp = 30.0;
};

struct Scenario {
  static constexpr int kSchemaVersion = 1;
  std::string name = "unnamed";
  std::uint64_t seed = 0;   // first seed; the suite uses seed, seed+1, ...
  int seed_count = 1;
  int trials = 10;          // per seed, object and condition
  std::vector<Condition> conditions{Condition::kPLWithIndex, Condition::kPLWithoutIndex,
                                    Condition::kLPWithIndex};
  PlacementNoise noise;
  // Physics, actuators, forces and controller thresholds; the controller
  // postures are always taken from the calibration bundle.
  HarnessParams params;
  double gravity_direction_deg = 220.0;  // source of params.physics.gravity_dir
  std::vector<MaterialSpec> materials;
  std::vector<ScenarioObject> objects;
  TrendCheckConfig checks;

  std::vector<std::uint64_t> seeds() const;
  const MaterialSpec& material(const std::string& name) const;
  // Throws Error(kSchemaError) naming the violated invariant.
  void validate() const;
};

// Throws Error(kSchemaError) with "<source>:<line>:<col>:" diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

// One TrialSpec per (object, condition, seed), objects outermost.
std::vector<TrialSpec> expand_specs(const Scenario& scenario);

}  // namespace plexus
