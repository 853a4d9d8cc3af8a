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

#include "plexus/geometry_io.hpp"

#include "plexus/error.hpp"
#include "plexus/yaml_util.hpp"

namespace plexus {

namespace {

Pose2 read_pose(const yamlio::Reader& r, const YAML::Node& parent, const char* key) {
  const YAML::Node n = r.map(parent, key);
  r.expect_keys(n, {"position", "orientation"});
  return Pose2(r.vec2(n, "position"), r.num(n, "orientation"));
}

void emit_pose(YAML::Emitter& out, const Pose2& p) {
  out << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "position" << YAML::Value;
  yamlio::emit_vec2(out, p.position);
  out << YAML::Key << "orientation";
  yamlio::emit_num(out, p.orientation);
  out << YAML::EndMap;
}

}  // namespace

HandGeometry parse_geometry(const std::string& text, const std::string& source) {
  const yamlio::Reader r(source);
  const YAML::Node root = r.parse(text);
  r.expect_keys(root, {"schema_version", "name", "thumb", "index"});
  HandGeometry g;
  g.schema_version = static_cast<int>(r.integer(root, "schema_version"));
  if (g.schema_version != 1) r.fail(root["schema_version"], "unsupported schema_version (expected 1)");
  g.name = r.str_or(root, "name", "");

  const YAML::Node th = r.map(root, "thumb");
  r.expect_keys(th, {"axis", "actuator_mount", "crank_radius", "rod_length", "reference_stroke", "tip_offset",
                     "pad_half_length", "joint_limits", "stroke_limits", "pregrasp_angle"});
  g.thumb_axis = r.vec2(th, "axis");
  g.thumb_drive.actuator_mount = r.vec2(th, "actuator_mount");
  g.thumb_drive.crank_radius = r.num(th, "crank_radius");
  g.thumb_drive.rod_length = r.num(th, "rod_length");
  g.thumb_drive.reference_stroke = r.num(th, "reference_stroke");
  g.thumb_tip_offset = read_pose(r, th, "tip_offset");
  g.thumb_pad_half_length = r.num(th, "pad_half_length");
  g.thumb_limits = r.interval(th, "joint_limits");
  g.pregrasp_thumb_angle = r.num_or(th, "pregrasp_angle", 0.0);

  const YAML::Node ix = r.map(root, "index");
  r.expect_keys(ix, {"fourbar", "fingertip", "stroke_per_rad", "joint_limits", "stroke_limits"});
  const YAML::Node fb = r.map(ix, "fourbar");
  r.expect_keys(fb, {"crank_pivot", "rocker_pivot", "crank_length", "coupler_length", "rocker_length",
                     "open_crank_angle", "tip_offset"});
  g.index_fourbar.crank_pivot = r.vec2(fb, "crank_pivot");
  g.index_fourbar.rocker_pivot = r.vec2(fb, "rocker_pivot");
  g.index_fourbar.crank_length = r.num(fb, "crank_length");
  g.index_fourbar.coupler_length = r.num(fb, "coupler_length");
  g.index_fourbar.rocker_length = r.num(fb, "rocker_length");
  g.index_fourbar.open_crank_angle = r.num(fb, "open_crank_angle");
  g.index_fourbar.tip_offset = read_pose(r, fb, "tip_offset");
  const YAML::Node ft = r.map(ix, "fingertip");
  r.expect_keys(ft, {"half_length", "half_thickness", "corner_radius", "side_normal_angle", "side_offset"});
  g.index_tip.half_length = r.num(ft, "half_length");
  g.index_tip.half_thickness = r.num(ft, "half_thickness");
  g.index_tip.corner_radius = r.num(ft, "corner_radius");
  g.index_tip.side_normal_angle = r.num(ft, "side_normal_angle");
  g.index_tip.side_offset = r.num(ft, "side_offset");
  g.index_stroke_per_rad = r.num(ix, "stroke_per_rad");
  g.index_limits = r.interval(ix, "joint_limits");
  g.index_stroke = r.interval(ix, "stroke_limits");

  if (r.has(th, "stroke_limits")) {
    g.thumb_stroke = r.interval(th, "stroke_limits");
  } else {
    // Preimage of the joint limits; the stroke decreases as the angle grows
    // or vice versa depending on the crank side, so order the pair.
    HandGeometry probe = g;
    probe.thumb_stroke = {-1e9, 1e9};
    probe.thumb_limits = {-1e9, 1e9};
    double a = 0.0, b = 0.0;
    try {
      a = stroke_from_thumb_angle(probe, g.thumb_limits.min);
      b = stroke_from_thumb_angle(probe, g.thumb_limits.max);
    } catch (const Error& e) {
      r.fail(th["joint_limits"], std::string("joint limits not reachable by the piston-crank: ") + e.what());
    }
    g.thumb_stroke = {std::min(a, b), std::max(a, b)};
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidGeometry, source + ": " + e.what());
  }
  return g;
}

HandGeometry load_geometry(const std::string& path) { return parse_geometry(yamlio::read_text_file(path), path); }

std::string geometry_to_yaml(const HandGeometry& g) {
  using yamlio::emit_interval;
  using yamlio::emit_num;
  using yamlio::emit_vec2;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << g.schema_version;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << g.name;
  out << YAML::Key << "thumb" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "axis" << YAML::Value;
  emit_vec2(out, g.thumb_axis);
  out << YAML::Key << "actuator_mount" << YAML::Value;
  emit_vec2(out, g.thumb_drive.actuator_mount);
  out << YAML::Key << "crank_radius";
  emit_num(out, g.thumb_drive.crank_radius);
  out << YAML::Key << "rod_length";
  emit_num(out, g.thumb_drive.rod_length);
  out << YAML::Key << "reference_stroke";
  emit_num(out, g.thumb_drive.reference_stroke);
  out << YAML::Key << "tip_offset" << YAML::Value;
  emit_pose(out, g.thumb_tip_offset);
  out << YAML::Key << "pad_half_length";
  emit_num(out, g.thumb_pad_half_length);
  out << YAML::Key << "joint_limits" << YAML::Value;
  emit_interval(out, g.thumb_limits);
  out << YAML::Key << "stroke_limits" << YAML::Value;
  emit_interval(out, g.thumb_stroke);
  out << YAML::Key << "pregrasp_angle";
  emit_num(out, g.pregrasp_thumb_angle);
  out << YAML::EndMap;

  out << YAML::Key << "index" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fourbar" << YAML::Value << YAML::BeginMap;
  const FourBar& fb = g.index_fourbar;
  out << YAML::Key << "crank_pivot" << YAML::Value;
  emit_vec2(out, fb.crank_pivot);
  out << YAML::Key << "rocker_pivot" << YAML::Value;
  emit_vec2(out, fb.rocker_pivot);
  out << YAML::Key << "crank_length";
  emit_num(out, fb.crank_length);
  out << YAML::Key << "coupler_length";
  emit_num(out, fb.coupler_length);
  out << YAML::Key << "rocker_length";
  emit_num(out, fb.rocker_length);
  out << YAML::Key << "open_crank_angle";
  emit_num(out, fb.open_crank_angle);
  out << YAML::Key << "tip_offset" << YAML::Value;
  emit_pose(out, fb.tip_offset);
  out << YAML::EndMap;
  out << YAML::Key << "fingertip" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "half_length";
  emit_num(out, g.index_tip.half_length);
  out << YAML::Key << "half_thickness";
  emit_num(out, g.index_tip.half_thickness);
  out << YAML::Key << "corner_radius";
  emit_num(out, g.index_tip.corner_radius);
  out << YAML::Key << "side_normal_angle";
  emit_num(out, g.index_tip.side_normal_angle);
  out << YAML::Key << "side_offset";
  emit_num(out, g.index_tip.side_offset);
  out << YAML::EndMap;
  out << YAML::Key << "stroke_per_rad";
  emit_num(out, g.index_stroke_per_rad);
  out << YAML::Key << "joint_limits" << YAML::Value;
  emit_interval(out, g.index_limits);
  out << YAML::Key << "stroke_limits" << YAML::Value;
  emit_interval(out, g.index_stroke);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string geometry_hash(const HandGeometry& geom) { return yamlio::fnv1a_hex(geometry_to_yaml(geom)); }

}  // namespace plexus
