# Copyright 2026 The plexus-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import pathlib

import pytest

import plexus_sim as ps

DATA = pathlib.Path(os.environ.get("PLEXUS_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))

TINY = """schema_version: 1
name: tiny
seed: 3
trials: 2
materials:
  Al: {mu: 0.35}
objects:
  - {shape: square_prism, width_mm: 30, material: Al, mass_g: 289.09}
"""


@pytest.fixture(scope="module")
def hand():
    geom = ps.default_geometry()
    return geom, ps.build_calibration(geom)


def test_stroke_round_trip():
    geom = ps.default_geometry()
    lo, hi = geom.thumb_stroke
    for i in range(101):
        s = lo + (hi - lo) * i / 100
        assert abs(ps.stroke_from_thumb_angle(geom, ps.thumb_angle_from_stroke(geom, s)) - s) <= 1e-9


def test_width_estimate(hand):
    geom, bundle = hand
    for w in range(5, 31):
        theta = ps.solve_index_contact_angle(geom, bundle.theta_T_P, float(w))
        value, clamped = bundle.estimate_width(theta)
        assert abs(value - w) <= 0.5
        assert not clamped
    assert [w for w, _ in bundle.width_table] == [30.0, 25.0, 20.0, 15.0, 10.0, 5.0]


def test_geometry_file_matches_builtin():
    geom = ps.load_geometry(str(DATA / "default_geometry.yaml"))
    assert geom.hash() == ps.default_geometry().hash()


def test_bundle_round_trip(hand):
    _, bundle = hand
    assert ps.parse_bundle(bundle.to_yaml()).to_yaml() == bundle.to_yaml()


def test_errors_carry_codes():
    with pytest.raises(ps.PlexusError) as info:
        ps.parse_scenario("name: x\n")
    assert ps.error_code(info.value) == "SchemaError"
    geom = ps.default_geometry()
    with pytest.raises(ps.PlexusError) as info:
        ps.solve_index_contact_angle(geom, 0.0, 500.0)
    assert ps.error_code(info.value) == "WidthUnreachable"


def test_trial_is_deterministic(hand):
    geom, bundle = hand
    scenario = ps.load_scenario(str(DATA / "table1_scenario.yaml"))
    a = ps.run_trial(scenario, geom, bundle, "cylinder-10-PLA", "PL_with_index", record_log=True)
    b = ps.run_trial(scenario, geom, bundle, "cylinder-10-PLA", "PL_with_index", record_log=True)
    assert a == b
    assert a["success"]
    assert a["log"]


def test_suite_and_checks(hand):
    geom, bundle = hand
    scenario = ps.parse_scenario(TINY)
    report = ps.run_suite(scenario, geom, bundle, jobs=2)
    rows = report.rows
    assert [r["condition"] for r in rows] == ["PL_with_index", "PL_without_index", "LP_with_index"]
    assert all(r["trials"] == 2 for r in rows)
    assert ps.parse_report_csv(report.to_csv()).to_csv() == report.to_csv()
    checks = {c["id"]: c["status"] for c in report.checks(scenario)}
    assert set(checks) == {"full_success", "index_dominance", "heavy_object_gain"}
