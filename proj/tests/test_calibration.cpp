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

#include "oracles.hpp"
#include "plexus/calibration.hpp"
#include "plexus/geometry_io.hpp"
#include "test_util.hpp"

using namespace plexus;
using testutil::error_code_of;

TEST_SUITE("calibration") {
  TEST_CASE("width table has one exact entry per grid width") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    REQUIRE(b.width_table.entries.size() == 6);
    for (const WidthEntry& e : b.width_table.entries) {
      CHECK(std::abs(fingertip_gap(g, b.theta_T_P, e.theta_I_c, GraspType::kPrecision) - e.width) <= 1e-6);
      const Lookup l = estimate_width(b.width_table, e.theta_I_c);
      CHECK(std::abs(l.value - e.width) <= 1e-9);
      CHECK_FALSE(l.clamped);
    }
  }

  TEST_CASE("interpolation error stays inside the curvature bound") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    const auto& e = b.width_table.entries;
    double h = 0.0;
    for (std::size_t i = 1; i < e.size(); ++i) h = std::max(h, e[i].theta_I_c - e[i - 1].theta_I_c);
    const double curvature = oracle::gap_curvature_bound(g, b.theta_T_P, e.front().theta_I_c, e.back().theta_I_c);
    const double bound = h * h / 8.0 * curvature;
    CHECK(bound <= 0.5);
    for (double w = 5.0; w <= 30.0; w += 1.0) {
      const double err = std::abs(estimate_width(b.width_table, solve_index_contact_angle(g, 0.0, w)).value - w);
      CHECK(err <= bound + 1e-9);
    }
  }

  TEST_CASE("estimates outside the table are clamped and flagged; offsets are applied") {
    const HandGeometry g = default_geometry();
    WidthTable t = build_width_table(g, 0.0, {5.0, 10.0, 15.0, 20.0, 25.0, 30.0});
    const Lookup wide = estimate_width(t, 0.0);
    CHECK(wide.clamped);
    CHECK(wide.value == 30.0);
    const Lookup narrow = estimate_width(t, 0.7);
    CHECK(narrow.clamped);
    CHECK(narrow.value == 5.0);
    t.offset_correction = 0.25;
    CHECK(estimate_width(t, t.entries[2].theta_I_c).value == doctest::Approx(20.25));
  }

  TEST_CASE("grids with too few widths are rejected") {
    const HandGeometry g = default_geometry();
    CHECK(error_code_of([&] { build_width_table(g, 0.0, {10.0}); }) == ErrorCode::kInsufficientEntries);
    CalibrationParams p;
    p.lateral_grid.clear();
    CHECK(error_code_of([&] { build_calibration(g, p); }) == ErrorCode::kInsufficientEntries);
  }

  TEST_CASE("lateral table is monotone and invertible") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    const auto& e = b.lateral_table.entries;
    REQUIRE(e.size() == 6);
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(g.thumb_limits.contains(e[i].theta_T_L));
      if (i > 0) CHECK(e[i].theta_T_L > e[i - 1].theta_T_L);
      CHECK(lookup_lateral_angle(b.lateral_table, e[i].width).value == e[i].theta_T_L);
      CHECK(lateral_width_from_angle(b.lateral_table, e[i].theta_T_L).value == doctest::Approx(e[i].width));
      // The chosen angle is a stable lateral grasp of the reference prism.
      LateralTableOptions opt;
      opt.theta_I_L_fixed = b.theta_I_L_fixed;
      const auto margin = lateral_reference_margin(g, e[i].width, e[i].theta_T_L, opt);
      REQUIRE(margin.has_value());
      CHECK(*margin >= 0.0);
    }
    CHECK(lookup_lateral_angle(b.lateral_table, 50.0).clamped);
  }

  TEST_CASE("unreachable lateral widths have no stable angle") {
    const HandGeometry g = default_geometry();
    LateralTableOptions opt;
    opt.theta_I_L_fixed = compute_fixed_index_angle(g, {0.0, 1.396});
    CHECK(error_code_of([&] { build_lateral_table(g, {150.0}, opt); }) == ErrorCode::kNoStableAngle);
  }

  TEST_CASE("fixed lateral index angle sits on the thumb line mid-range") {
    const HandGeometry g = default_geometry();
    const double ti = compute_fixed_index_angle(g, {0.0, 1.396});
    CHECK(ti == doctest::Approx(index_angle_on_thumb_line(g, 0.698)));
  }

  TEST_CASE("bundles round-trip byte-identically and check their geometry") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    const std::string text = bundle_to_yaml(b);
    CHECK(bundle_to_yaml(parse_bundle(text)) == text);
    CHECK(bundle_to_yaml(build_calibration(g)) == text);
    CHECK(b.geometry_hash == geometry_hash(g));
    HandGeometry other = g;
    other.thumb_pad_half_length += 1.0;
    CHECK(error_code_of([&] { b.check_geometry(other); }) == ErrorCode::kConfigMismatch);
  }

  TEST_CASE("malformed bundles are schema errors") {
    CHECK(error_code_of([] { parse_bundle("schema_version: 1\n"); }) == ErrorCode::kSchemaError);
    CHECK(error_code_of([] { parse_bundle("[1, 2"); }) == ErrorCode::kSchemaError);
    std::string text = bundle_to_yaml(build_calibration(default_geometry()));
    text += "surprise: 1\n";
    CHECK(error_code_of([&] { parse_bundle(text); }) == ErrorCode::kSchemaError);
    CHECK(error_code_of([] { load_bundle("/nonexistent/bundle.yaml"); }) == ErrorCode::kIoFailure);
  }
}
