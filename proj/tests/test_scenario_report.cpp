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

#include <string>

#include "plexus/report.hpp"
#include "plexus/scenario.hpp"
#include "test_util.hpp"

using namespace plexus;
using testutil::error_code_of;

namespace {

constexpr const char* kMinimal = R"(schema_version: 1
name: tiny
seed: 5
seed_count: 2
trials: 3
materials:
  PLA: {mu: 0.5}
objects:
  - {shape: cylinder, width_mm: 10, material: PLA, mass_g: 5}
  - {label: big, shape: square_prism, width_mm: 30, material: PLA, mass_g: 34.34}
)";

SuiteRow row(const std::string& label, double width, const std::string& material, Condition c, int successes,
             int trials = 10) {
  SuiteRow r;
  r.label = label;
  r.shape = ObjectShape::kSquarePrism;
  r.width = width;
  r.material = material;
  r.mass = 10.0;
  r.condition = c;
  r.trials = trials;
  r.successes = successes;
  r.failures[static_cast<std::size_t>(TrialFailure::kSlip)] = trials - successes;
  r.mean_abs_w_error = 0.125;
  return r;
}

SuiteReport three_conditions(const std::string& label, double width, const std::string& material, int with,
                             int without, int lp) {
  SuiteReport r;
  r.rows = {row(label, width, material, Condition::kPLWithIndex, with),
            row(label, width, material, Condition::kPLWithoutIndex, without),
            row(label, width, material, Condition::kLPWithIndex, lp)};
  r.seeds = {1};
  return r;
}

CheckStatus status_of(const std::vector<TrendCheck>& checks, const std::string& id) {
  for (const TrendCheck& c : checks) {
    if (c.id == id) return c.status;
  }
  FAIL("missing check " << id);
  return CheckStatus::kSkipped;
}

}  // namespace

TEST_SUITE("scenario_report") {
  TEST_CASE("the shipped scenario expands to objects x conditions x seeds") {
    const Scenario s = load_scenario(testutil::data_path("table1_scenario.yaml"));
    CHECK(s.name == "table1-primitives");
    CHECK(s.objects.size() == 24);
    CHECK(s.seeds().size() == 10);
    CHECK(s.trials == 10);
    CHECK(s.params.grip == 7.0);
    CHECK(s.params.preload == 6.0);
    CHECK(s.material("Al").mu == 0.35);
    CHECK(s.objects.back().label == "square_prism-30-Al");
    const std::vector<TrialSpec> specs = expand_specs(s);
    CHECK(specs.size() == 24 * 3 * 10);
    CHECK(specs.front().object.mu == 0.5);
    CHECK(specs.back().object.mass == 289.09);
  }

  TEST_CASE("minimal scenarios take defaults; labels can be given") {
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.seeds() == std::vector<std::uint64_t>{5, 6});
    CHECK(s.objects[0].label == "cylinder-10-PLA");
    CHECK(s.objects[1].label == "big");
    CHECK(s.conditions.size() == 3);
    CHECK(expand_specs(s).size() == 2 * 3 * 2);
    CHECK(expand_specs(s).front().trials == 3);
  }

  TEST_CASE("scenario schema errors carry a location") {
    auto expect_schema = [](const std::string& text, const std::string& where) {
      try {
        parse_scenario(text, "s.yaml");
        FAIL("expected a schema error");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kSchemaError);
        CHECK_MESSAGE(std::string(e.what()).find(where) != std::string::npos, e.what());
      }
    };
    std::string unknown_key = kMinimal;
    unknown_key += "colour: red\n";
    expect_schema(unknown_key, "s.yaml:11:");
    std::string bad_material = kMinimal;
    bad_material.replace(bad_material.find("material: PLA, mass_g: 5"), 13, "material: Cu,");
    expect_schema(bad_material, "s.yaml:");
    expect_schema("name: x\n", "schema_version");
    expect_schema("schema_version: 2\nobjects: []\n", "s.yaml:1:");
    std::string custom = kMinimal;
    custom += "  - {shape: custom, width_mm: 10, material: PLA, mass_g: 5}\n";
    expect_schema(custom, "s.yaml:");
    CHECK(error_code_of([] { load_scenario("/nonexistent.yaml"); }) == ErrorCode::kIoFailure);
  }

  TEST_CASE("report CSV round-trips") {
    SuiteReport r = three_conditions("square_prism-30-Al", 30.0, "Al", 10, 1, 9);
    r.rows[1].mean_abs_w_error = 0.1 + 0.2;  // needs shortest round-trip formatting
    const std::string csv = report_to_csv(r);
    const SuiteReport back = parse_report_csv(csv);
    REQUIRE(back.rows.size() == 3);
    CHECK(report_to_csv(back) == csv);
    CHECK(back.rows[1].mean_abs_w_error == r.rows[1].mean_abs_w_error);
    CHECK(back.rows[0].success_rate() == 100.0);
    // An empty suite still has a header.
    const std::string empty = report_to_csv({});
    CHECK(empty.rfind("object,width_mm,material,mass_g,condition,success_rate", 0) == 0);
    CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
    std::string broken = csv;
    broken.replace(broken.find(",10,1,"), 6, ",10,9,");  // successes no longer add up
    CHECK(error_code_of([&] { parse_report_csv(broken); }) == ErrorCode::kSchemaError);
  }

  TEST_CASE("reference table parses and matches on shape, width and material") {
    const ReferenceTable t = load_reference(testutil::data_path("table1_reference.csv"));
    CHECK(t.rows.size() == 24);
    const ReferenceRow* heavy = t.find(ObjectShape::kSquarePrism, 30.0, "Al");
    REQUIRE(heavy != nullptr);
    CHECK(heavy->mass == 289.09);
    CHECK(heavy->rates[0].has_value());
    CHECK(t.find(ObjectShape::kCylinder, 7.0, "PLA") == nullptr);
    CHECK(error_code_of([] { parse_reference("a,b\n1,2\n"); }) == ErrorCode::kSchemaError);
  }

  TEST_CASE("trend rows compare the sign of the index-support gain") {
    ReferenceTable ref;
    ReferenceRow rr;
    rr.label = "x";
    rr.shape = ObjectShape::kSquarePrism;
    rr.width = 30.0;
    rr.material = "Al";
    rr.rates = {100.0, 40.0, 90.0};
    ref.rows.push_back(rr);
    std::vector<TrendRow> trends = compare_trends(three_conditions("p30", 30.0, "Al", 10, 2, 9), ref);
    REQUIRE(trends.size() == 1);
    CHECK(*trends[0].sim_delta == 80.0);
    CHECK(*trends[0].ref_delta == 60.0);
    CHECK(*trends[0].agreement);
    trends = compare_trends(three_conditions("p30", 30.0, "Al", 5, 5, 9), ref);
    CHECK_FALSE(*trends[0].agreement);
    trends = compare_trends(three_conditions("p25", 25.0, "Al", 5, 5, 9), ref);
    CHECK_FALSE(trends[0].agreement.has_value());
    CHECK(trends_to_csv(trends).find("p25") != std::string::npos);
  }

  TEST_CASE("trend checks pass, fail and skip") {
    const TrendCheckConfig cfg;
    SuiteReport good = three_conditions("square_prism-30-Al", 30.0, "Al", 9, 2, 8);
    const SuiteReport pla = three_conditions("cylinder-5-PLA", 5.0, "PLA", 10, 10, 10);
    good.rows.insert(good.rows.end(), pla.rows.begin(), pla.rows.end());
    std::vector<TrendCheck> checks = run_trend_checks(good, cfg);
    CHECK(all_checks_pass(checks));

    SuiteReport bad = good;
    bad.rows[3].successes = 9;  // a PLA object below 100% under PL with index
    bad.rows[1].successes = 8;  // gain of 10 pp on the heavy prism
    checks = run_trend_checks(bad, cfg);
    CHECK(status_of(checks, "full_success") == CheckStatus::kFail);
    CHECK(status_of(checks, "heavy_object_gain") == CheckStatus::kFail);
    CHECK(status_of(checks, "index_dominance") == CheckStatus::kPass);
    CHECK_FALSE(all_checks_pass(checks));

    SuiteReport trailing = good;
    trailing.rows[0].successes = 1;  // w/ trails w/o by 10 pp: allowed
    trailing.rows[1].successes = 2;
    trailing.rows[0].successes = 0;  // ... 20 pp is not
    checks = run_trend_checks(trailing, cfg);
    CHECK(status_of(checks, "index_dominance") == CheckStatus::kFail);

    checks = run_trend_checks(pla, cfg);
    CHECK(status_of(checks, "heavy_object_gain") == CheckStatus::kSkipped);
    CHECK(status_of(checks, "full_success") == CheckStatus::kPass);
  }

  TEST_CASE("JSON report carries the configuration and is deterministic") {
    const Scenario s = parse_scenario(kMinimal);
    const CalibrationBundle b = build_calibration(default_geometry());
    const ReportMetadata meta = make_metadata(s, b);
    const SuiteReport r = three_conditions("big", 30.0, "PLA", 10, 10, 10);
    const std::vector<TrendCheck> checks = run_trend_checks(r, s.checks);
    const std::string a = report_to_json(r, meta, nullptr, checks);
    CHECK(a == report_to_json(r, meta, nullptr, checks));
    CHECK(a.find("\"tiny\"") != std::string::npos);
    CHECK(a.find(b.geometry_hash) != std::string::npos);
    CHECK(a.back() == '\n');
  }
}
