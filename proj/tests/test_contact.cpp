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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plexus/calibration.hpp"
#include "plexus/contact.hpp"
#include "plexus/controller.hpp"
#include "plexus/lp.hpp"
#include "test_util.hpp"

using namespace plexus;
using testutil::error_code_of;

namespace {

// Two opposing point contacts at (+-10, 0) squeezing along x.
std::vector<ContactPoint> pinch(double mu) {
  ContactPoint left{{-10.0, 0.0}, {1.0, 0.0}, 0.0, mu, Finger::kUnassigned};
  ContactPoint right{{10.0, 0.0}, {-1.0, 0.0}, 0.0, mu, Finger::kUnassigned};
  return {left, right};
}

double slip_mass(double mu, double grip) {
  double lo = 0.0, hi = 5000.0;
  for (int i = 0; i < 100; ++i) {
    const double m = 0.5 * (lo + hi);
    (quasi_static_stability(pinch(mu), grip, m, {0.0, -1.0}).stable ? lo : hi) = m;
  }
  return lo;
}

}  // namespace

TEST_SUITE("contact") {
  TEST_CASE("simplex solves small LPs") {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6  ->  (1.6, 1.2), value 2.8.
    lp::Problem p;
    p.objective = {1.0, 1.0};
    p.ub_rows = {{1.0, 2.0}, {3.0, 1.0}};
    p.ub_rhs = {4.0, 6.0};
    const lp::Solution s = lp::solve(p);
    REQUIRE(s.status == lp::Status::kOptimal);
    CHECK(s.value == doctest::Approx(2.8));
    CHECK(s.x[0] == doctest::Approx(1.6));
    CHECK(s.x[1] == doctest::Approx(1.2));

    lp::Problem infeasible;
    infeasible.objective = {1.0};
    infeasible.eq_rows = {{1.0}};
    infeasible.eq_rhs = {-1.0};
    CHECK(lp::solve(infeasible).status == lp::Status::kInfeasible);

    lp::Problem unbounded;
    unbounded.objective = {1.0, 0.0};
    unbounded.ub_rows = {{0.0, 1.0}};
    unbounded.ub_rhs = {1.0};
    CHECK(lp::solve(unbounded).status == lp::Status::kUnbounded);
  }

  TEST_CASE("stability decision agrees with the brute-force force-space search") {
    std::mt19937_64 rng(2026);
    int compared = 0;
    while (compared < 30) {
      const oracle::StabilityInstance s = oracle::random_instance(rng);
      const oracle::BruteForceResult bf =
          oracle::brute_force_stability(s.contacts, s.grip, s.mass, s.gravity_dir, s.torque_balance);
      if (bf.ambiguous) continue;
      StabilityOptions opt;
      opt.torque_balance = s.torque_balance;
      const GraspAssessment a = quasi_static_stability(s.contacts, s.grip, s.mass, s.gravity_dir, opt);
      CHECK(a.stable == bf.stable);
      ++compared;
    }
  }

  TEST_CASE("two-finger pinch slips at 2 mu N / g") {
    for (double mu : {0.2, 0.35, 0.5, 0.9}) {
      for (double grip : {1.0, 5.0, 7.0}) {
        const double expected = 2.0 * mu * grip / 9.81 * 1000.0;  // g
        CHECK(std::abs(slip_mass(mu, grip) - expected) <= 0.01 * expected);
      }
    }
  }

  TEST_CASE("failure modes separate slip from rotational ejection") {
    StabilityOptions off_centre;
    off_centre.center_of_mass = Vec2{30.0, 0.0};
    // 3 N weight: force balance alone holds (2 mu N = 5 N), torque needs 2W <= mu N.
    const GraspAssessment rot = quasi_static_stability(pinch(0.5), 5.0, 3.0 / 9.81 * 1000.0, {0.0, -1.0}, off_centre);
    CHECK_FALSE(rot.stable);
    CHECK(rot.failure_mode == FailureMode::kRotationEjection);
    const GraspAssessment slip = quasi_static_stability(pinch(0.5), 5.0, 800.0, {0.0, -1.0});
    CHECK(slip.failure_mode == FailureMode::kSlip);
    const GraspAssessment none = quasi_static_stability({}, 5.0, 10.0, {0.0, -1.0});
    CHECK(none.failure_mode == FailureMode::kNoContact);
    const GraspAssessment ok = quasi_static_stability(pinch(0.5), 5.0, 100.0, {0.0, -1.0});
    CHECK(ok.stable);
    CHECK(ok.margin > 0.0);
  }

  TEST_CASE("pinch pose touches both fingers without interpenetration") {
    const HandGeometry g = default_geometry();
    for (auto shape : {ObjectShape::kCylinder, ObjectShape::kSquarePrism}) {
      for (double w : {5.0, 17.5, 30.0}) {
        ObjectSpec o{shape, w, 100.0, 10.0, 0.5, "o"};
        const JointState j{0.0, solve_index_contact_angle(g, 0.0, w), 0.0, 0.0};
        const auto settled = settle_object_pose(g, j, o, 0.0);
        REQUIRE(settled.has_value());
        CHECK(std::abs(settled->pad_advance) <= 0.2);
        const auto contacts = contact_set(g, j, o, GraspType::kPrecision, settled->pose);
        bool thumb = false, index = false;
        for (const ContactPoint& c : contacts) {
          thumb = thumb || c.finger == Finger::kThumb;
          index = index || c.finger == Finger::kIndex;
        }
        CHECK(thumb);
        CHECK(index);
        CHECK(pinch_clearance(g, j, o, 0.0) <= 0.1);
      }
    }
  }

  TEST_CASE("interpenetrating poses are rejected") {
    const HandGeometry g = default_geometry();
    ObjectSpec o{ObjectShape::kCylinder, 20.0, 100.0, 10.0, 0.5, "o"};
    const JointState j{0.0, solve_index_contact_angle(g, 0.0, 20.0), 0.0, 0.0};
    const Pose2 tip = index_fingertip_pose(g, j.theta_I);
    CHECK(error_code_of([&] { contact_set(g, j, o, GraspType::kPrecision, tip); }) == ErrorCode::kInterpenetration);
  }

  TEST_CASE("transition traces are validated") {
    const HandGeometry g = default_geometry();
    ObjectSpec o{ObjectShape::kSquarePrism, 20.0, 100.0, 10.0, 0.5, "o"};
    CHECK(error_code_of([&] { simulate_transition(g, {}, o, {}); }) == ErrorCode::kInvalidTrace);
    const double ti = solve_index_contact_angle(g, 0.0, 20.0);
    std::vector<TraceStep> jump = {{{0.0, ti}, 7.0, StepKind::kHold}, {{0.5, ti}, 6.0, StepKind::kMotion}};
    CHECK(error_code_of([&] { simulate_transition(g, jump, o, {}); }) == ErrorCode::kInvalidTrace);
    std::vector<TraceStep> outside = {{{5.0, ti}, 7.0, StepKind::kHold}};
    CHECK(error_code_of([&] { simulate_transition(g, outside, o, {}); }) == ErrorCode::kInvalidTrace);
  }

  TEST_CASE("a massless object survives the full precision-to-lateral sweep") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    for (auto shape : {ObjectShape::kCylinder, ObjectShape::kSquarePrism}) {
      for (double w : {5.0, 15.0, 30.0}) {
        ObjectSpec o{shape, w, 100.0, 0.0, 0.5, "massless"};
        const double ti = solve_index_contact_angle(g, 0.0, w);
        const double tl = lookup_lateral_angle(b.lateral_table, w).value;
        std::vector<TraceStep> trace = {{{0.0, ti}, 7.0, StepKind::kHold}};
        const int n = 40;
        for (int k = 1; k <= n; ++k) trace.push_back({{tl * k / n, ti}, 6.0, StepKind::kMotion});
        for (int k = 1; k <= n; ++k) {
          trace.push_back({{tl, ti + (b.theta_I_L_fixed - ti) * k / n}, 6.0, StepKind::kMotion});
        }
        trace.push_back({{tl, b.theta_I_L_fixed}, 7.0, StepKind::kHold});
        const TransitionOutcome out = simulate_transition(g, trace, o, {});
        CHECK(out.success);
        CHECK(out.failure_mode == FailureMode::kNone);
      }
    }
  }

  TEST_CASE("index support never lowers the holdable mass; prisms hold at least as much as cylinders") {
    const HandGeometry g = default_geometry();
    const CalibrationBundle b = build_calibration(g);
    for (double w = 5.0; w <= 30.0; w += 5.0) {
      const JointState posture{lookup_lateral_angle(b.lateral_table, w).value,
                               contact_angle_for_width(b.width_table, w).value, 0.0, 0.0};
      double with_index[2], without_index[2];
      int i = 0;
      for (auto shape : {ObjectShape::kCylinder, ObjectShape::kSquarePrism}) {
        ObjectSpec o{shape, w, 100.0, 1.0, 0.5, "o"};
        with_index[i] = max_holdable_mass(g, posture, o, 7.0, true);
        without_index[i] = max_holdable_mass(g, posture, o, 7.0, false);
        CHECK(with_index[i] >= without_index[i]);
        ++i;
      }
      CHECK(with_index[1] >= with_index[0]);
    }
  }

  TEST_CASE("object and physics parameters are validated") {
    ObjectSpec bad{ObjectShape::kCylinder, -1.0, 100.0, 1.0, 0.5, "bad"};
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::kSchemaError);
    PhysicsParams p;
    p.gravity_dir = {1.0, 1.0};
    CHECK(error_code_of([&] { p.validate(); }) == ErrorCode::kInvalidConfig);
    CHECK(error_code_of([] { object_shape_from_string("torus"); }) == ErrorCode::kSchemaError);
  }
}
