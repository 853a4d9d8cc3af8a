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

// Report emission: the success-rate table as CSV and JSON, the comparison
// against a reference table of measured success rates, and the acceptance
// trend checks. All output is byte-deterministic (numbers are written in
// shortest round-trip form, rows in report order, no timestamps).

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "plexus/harness.hpp"
#include "plexus/scenario.hpp"

namespace plexus {

inline constexpr int kConditionCount = 3;

// One object of the reference table with its measured success rates (%).
struct ReferenceRow {
  std::string label;
  ObjectShape shape = ObjectShape::kCylinder;
  double width = 0.0;
  std::string material;
  double mass = 0.0;
  std::array<std::optional<double>, kConditionCount> rates;  // indexed by Condition
  std::string source;  // where the values were transcribed from
};

struct ReferenceTable {
  std::vector<ReferenceRow> rows;
  // Matches on shape, width and material (labels may differ).
  const ReferenceRow* find(ObjectShape shape, double width, const std::string& material) const;
};

// CSV with header
//   object,shape,width_mm,material,mass_g,PL_with_index,PL_without_index,LP_with_index,source
// Lines starting with '#' are comments. Throws Error(kSchemaError) naming
// the line, Error(kIoFailure) when unreadable.
ReferenceTable parse_reference(const std::string& text, const std::string& source = "<reference>");
ReferenceTable load_reference(const std::string& path);

// Per-object comparison of the index-support effect (PL w/ - PL w/o).
struct TrendRow {
  std::string label;
  ObjectShape shape = ObjectShape::kCylinder;
  double width = 0.0;
  std::string material;
  double mass = 0.0;
  std::array<std::optional<double>, kConditionCount> sim_rates;
  std::array<std::optional<double>, kConditionCount> ref_rates;
  std::optional<double> sim_delta;  // PL w/ - PL w/o, simulated
  std::optional<double> ref_delta;  // PL w/ - PL w/o, reference
  // sign(sim_delta) == sign(ref_delta); empty when either is missing.
  std::optional<bool> agreement;
  std::string source;
};

std::vector<TrendRow> compare_trends(const SuiteReport& report, const ReferenceTable& reference);

enum class CheckStatus { kPass, kFail, kSkipped };
std::string_view to_string(CheckStatus s);

struct TrendCheck {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::kSkipped;
  std::string detail;
};

// (a) full success of one material under PL w/ index, (b) index-support
// dominance within a tolerance, (c) minimum gain for a heavy object.
// Checks whose rows are absent from the report are skipped.
std::vector<TrendCheck> run_trend_checks(const SuiteReport& report, const TrendCheckConfig& config);
bool all_checks_pass(const std::vector<TrendCheck>& checks);

// Columns: object,width_mm,material,mass_g,condition,success_rate,shape,
// trials,successes,mean_abs_w_error_mm, then one count per failure mode.
// An empty report yields the header line only.
std::string report_to_csv(const SuiteReport& report);
// Inverse of report_to_csv (seeds are not part of the CSV). Throws
// Error(kSchemaError) naming the line.
SuiteReport parse_report_csv(const std::string& text, const std::string& source = "<report>");

std::string trends_to_csv(const std::vector<TrendRow>& trends);

// Everything needed to reproduce a report, echoed into the JSON metadata.
struct ReportMetadata {
  std::string scenario_name;
  std::vector<std::uint64_t> seeds;
  int trials_per_seed = 0;
  PlacementNoise noise;
  HarnessParams params;
  double gravity_direction_deg = 0.0;
  std::string geometry_hash;
  double theta_T_P = 0.0;
  double theta_I_L_fixed = 0.0;
};

ReportMetadata make_metadata(const Scenario& scenario, const CalibrationBundle& bundle);

std::string report_to_json(const SuiteReport& report, const ReportMetadata& metadata,
                           const std::vector<TrendRow>* trends, const std::vector<TrendCheck>& checks);

}  // namespace plexus
