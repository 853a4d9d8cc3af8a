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

#include "plexus/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "plexus/error.hpp"
#include "plexus/geometry_io.hpp"
#include "plexus/yaml_util.hpp"

namespace plexus {

namespace {

void check_grid(const std::vector<double>& grid, const char* what) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(std::isfinite(grid[i]) && grid[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": widths must be finite and > 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": widths must be strictly increasing");
    }
  }
}

// Piecewise-linear interpolation over (x, y) knots with increasing x.
template <typename Entry, typename X, typename Y>
Lookup interpolate(const std::vector<Entry>& e, double x, X get_x, Y get_y) {
  // Queries within round-off of an end entry are not reported as clamped.
  constexpr double kEndTol = 1e-9;
  if (x <= get_x(e.front())) return {get_y(e.front()), x < get_x(e.front()) - kEndTol};
  if (x >= get_x(e.back())) return {get_y(e.back()), x > get_x(e.back()) + kEndTol};
  const auto it = std::upper_bound(e.begin(), e.end(), x, [&](double v, const Entry& k) { return v < get_x(k); });
  const Entry& hi = *it;
  const Entry& lo = *(it - 1);
  if (x == get_x(lo)) return {get_y(lo), false};
  const double t = (x - get_x(lo)) / (get_x(hi) - get_x(lo));
  return {get_y(lo) + t * (get_y(hi) - get_y(lo)), false};
}

}  // namespace

void WidthTable::validate() const {
  if (entries.size() < 2) throw Error(ErrorCode::kInsufficientEntries, "width table needs at least 2 entries");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!(entries[i].theta_I_c > entries[i - 1].theta_I_c) || !(entries[i].width < entries[i - 1].width)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "width table must have increasing angles and decreasing widths");
    }
  }
  if (!std::isfinite(offset_correction)) throw Error(ErrorCode::kInvalidConfig, "offset_correction not finite");
}

void LateralAngleTable::validate(const HandGeometry& geom) const {
  if (entries.empty()) throw Error(ErrorCode::kInsufficientEntries, "lateral table is empty");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && !(entries[i].width > entries[i - 1].width)) {
      throw Error(ErrorCode::kInvalidConfig, "lateral table widths must be strictly increasing");
    }
    if (!geom.thumb_limits.contains(entries[i].theta_T_L, 1e-12)) {
      throw Error(ErrorCode::kInvalidConfig, "lateral table angle outside the thumb joint limits");
    }
  }
}

WidthTable build_width_table(const HandGeometry& geom, double theta_T_P, const std::vector<double>& width_grid,
                             double offset_correction) {
  if (width_grid.size() < 2) {
    throw Error(ErrorCode::kInsufficientEntries, "width grid needs at least 2 widths to interpolate");
  }
  check_grid(width_grid, "width grid");
  WidthTable table;
  table.theta_T_P = theta_T_P;
  table.offset_correction = offset_correction;
  for (double w : width_grid) table.entries.push_back({solve_index_contact_angle(geom, theta_T_P, w), w});
  std::sort(table.entries.begin(), table.entries.end(),
            [](const WidthEntry& a, const WidthEntry& b) { return a.theta_I_c < b.theta_I_c; });
  table.validate();
  return table;
}

Lookup estimate_width(const WidthTable& table, double theta_I_c) {
  Lookup r = interpolate(
      table.entries, theta_I_c, [](const WidthEntry& e) { return e.theta_I_c; },
      [](const WidthEntry& e) { return e.width; });
  r.value += table.offset_correction;
  // Estimates never leave the calibrated width range.
  const double lo = table.entries.back().width;
  const double hi = table.entries.front().width;
  if (r.value < lo || r.value > hi) {
    r.value = std::clamp(r.value, lo, hi);
    r.clamped = true;
  }
  return r;
}

std::optional<double> lateral_reference_margin(const HandGeometry& geom, double width, double theta_T,
                                               const LateralTableOptions& options) {
  ObjectSpec prism;
  prism.shape = ObjectShape::kSquarePrism;
  prism.width = width;
  prism.mass = 0.0;
  prism.mu = options.reference_mu;
  const JointState joints{theta_T, options.theta_I_L_fixed, 0.0, 0.0};

  const Pose2 pose = resting_object_pose(geom, joints, prism, 0.0, options.physics);

  std::vector<ContactPoint> contacts;
  try {
    contacts = contact_set(geom, joints, prism, GraspType::kLateral, pose, options.physics);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInterpenetration) return std::nullopt;
    throw;
  }
  const bool thumb = std::any_of(contacts.begin(), contacts.end(),
                                 [](const ContactPoint& c) { return c.finger == Finger::kThumb; });
  const bool index = std::any_of(contacts.begin(), contacts.end(),
                                 [](const ContactPoint& c) { return c.finger == Finger::kIndex; });
  if (!thumb || !index) return std::nullopt;
  StabilityOptions opt;
  opt.center_of_mass = pose.position;
  opt.gravity = options.physics.gravity;
  return quasi_static_stability(contacts, options.reference_grip, 0.0, options.physics.gravity_dir, opt).margin;
}

LateralAngleTable build_lateral_table(const HandGeometry& geom, const std::vector<double>& width_grid,
                                      const LateralTableOptions& options) {
  if (width_grid.empty()) throw Error(ErrorCode::kInsufficientEntries, "lateral width grid is empty");
  check_grid(width_grid, "lateral grid");
  if (!(options.sample_step > 0.0)) throw Error(ErrorCode::kInvalidConfig, "sample_step must be > 0");
  LateralAngleTable table;
  const auto samples = static_cast<long>(std::floor(geom.thumb_limits.span() / options.sample_step + 1e-9));
  for (double w : width_grid) {
    std::optional<double> best_angle;
    double best_margin = 0.0;
    for (long k = 0; k <= samples; ++k) {
      const double theta = geom.thumb_limits.min + static_cast<double>(k) * options.sample_step;
      const auto m = lateral_reference_margin(geom, w, theta, options);
      if (!m || *m < 0.0) continue;
      if (!best_angle || *m > best_margin) {
        best_angle = theta;
        best_margin = *m;
      }
    }
    if (!best_angle) {
      throw Error(ErrorCode::kNoStableAngle,
                  "no sampled thumb angle gives a stable lateral grasp of width " + yamlio::format_double(w) +
                      " mm");
    }
    table.entries.push_back({w, *best_angle});
  }
  table.validate(geom);
  return table;
}

Lookup lookup_lateral_angle(const LateralAngleTable& table, double w_hat) {
  if (table.entries.empty()) throw Error(ErrorCode::kCalibrationMissing, "lateral table is empty");
  return interpolate(
      table.entries, w_hat, [](const LateralEntry& e) { return e.width; },
      [](const LateralEntry& e) { return e.theta_T_L; });
}

Lookup lateral_width_from_angle(const LateralAngleTable& table, double theta_T) {
  if (table.entries.size() < 2) throw Error(ErrorCode::kInsufficientEntries, "lateral table needs 2 entries");
  for (std::size_t i = 1; i < table.entries.size(); ++i) {
    if (!(table.entries[i].theta_T_L > table.entries[i - 1].theta_T_L)) {
      throw Error(ErrorCode::kInvalidConfig, "lateral table angles are not strictly increasing");
    }
  }
  return interpolate(
      table.entries, theta_T, [](const LateralEntry& e) { return e.theta_T_L; },
      [](const LateralEntry& e) { return e.width; });
}

double compute_fixed_index_angle(const HandGeometry& geom, const Interval& lateral_posture_range) {
  const double mid = 0.5 * (lateral_posture_range.min + lateral_posture_range.max);
  return index_angle_on_thumb_line(geom, mid);
}

void CalibrationParams::validate() const {
  if (width_grid.size() < 2) throw Error(ErrorCode::kInsufficientEntries, "width grid needs at least 2 widths");
  if (lateral_grid.empty()) throw Error(ErrorCode::kInsufficientEntries, "lateral grid is empty");
  check_grid(width_grid, "width grid");
  check_grid(lateral_grid, "lateral grid");
  if (!(lateral_posture_range.min < lateral_posture_range.max)) {
    throw Error(ErrorCode::kInvalidConfig, "lateral posture range must satisfy min < max");
  }
  if (!(sample_step > 0.0)) throw Error(ErrorCode::kInvalidConfig, "sample_step must be > 0");
  if (!std::isfinite(offset_correction)) throw Error(ErrorCode::kInvalidConfig, "offset_correction not finite");
}

void CalibrationBundle::check_geometry(const HandGeometry& geom) const {
  const std::string h = plexus::geometry_hash(geom);
  if (h != geometry_hash) {
    throw Error(ErrorCode::kConfigMismatch,
                "calibration bundle was built for geometry " + geometry_hash + ", not " + h);
  }
}

CalibrationBundle build_calibration(const HandGeometry& geom, const CalibrationParams& params) {
  params.validate();
  CalibrationBundle b;
  b.params = params;
  b.geometry_hash = plexus::geometry_hash(geom);
  b.theta_T_P = geom.pregrasp_thumb_angle;
  b.theta_I_L_fixed = compute_fixed_index_angle(geom, params.lateral_posture_range);
  b.width_table = build_width_table(geom, b.theta_T_P, params.width_grid, params.offset_correction);
  LateralTableOptions lo;
  lo.theta_I_L_fixed = b.theta_I_L_fixed;
  lo.sample_step = params.sample_step;
  b.lateral_table = build_lateral_table(geom, params.lateral_grid, lo);
  return b;
}

std::string bundle_to_yaml(const CalibrationBundle& b) {
  using yamlio::emit_num;
  using yamlio::format_double;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << CalibrationBundle::kSchemaVersion;
  out << YAML::Key << "geometry_hash" << YAML::Value << YAML::DoubleQuoted << b.geometry_hash;
  out << YAML::Key << "theta_T_P";
  emit_num(out, b.theta_T_P);
  out << YAML::Key << "theta_I_L_fixed";
  emit_num(out, b.theta_I_L_fixed);
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  auto grid = [&](const char* key, const std::vector<double>& g) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double v : g) out << format_double(v);
    out << YAML::EndSeq;
  };
  grid("width_grid", b.params.width_grid);
  grid("lateral_grid", b.params.lateral_grid);
  out << YAML::Key << "lateral_posture_range" << YAML::Value;
  yamlio::emit_interval(out, b.params.lateral_posture_range);
  out << YAML::Key << "offset_correction";
  emit_num(out, b.params.offset_correction);
  out << YAML::Key << "sample_step";
  emit_num(out, b.params.sample_step);
  out << YAML::EndMap;
  out << YAML::Key << "width_table" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta_T_P";
  emit_num(out, b.width_table.theta_T_P);
  out << YAML::Key << "offset_correction";
  emit_num(out, b.width_table.offset_correction);
  out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
  for (const WidthEntry& e : b.width_table.entries) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "theta_I_c" << YAML::Value << format_double(e.theta_I_c)
        << YAML::Key << "width" << YAML::Value << format_double(e.width) << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "lateral_table" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
  for (const LateralEntry& e : b.lateral_table.entries) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "width" << YAML::Value << format_double(e.width)
        << YAML::Key << "theta_T_L" << YAML::Value << format_double(e.theta_T_L) << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

CalibrationBundle parse_bundle(const std::string& text, const std::string& source) {
  const yamlio::Reader r(source);
  const YAML::Node root = r.parse(text);
  r.expect_keys(root, {"schema_version", "geometry_hash", "theta_T_P", "theta_I_L_fixed", "params", "width_table",
                       "lateral_table"});
  if (r.integer(root, "schema_version") != CalibrationBundle::kSchemaVersion) {
    r.fail(root["schema_version"], "unsupported bundle schema_version");
  }
  CalibrationBundle b;
  b.geometry_hash = r.str(root, "geometry_hash");
  b.theta_T_P = r.num(root, "theta_T_P");
  b.theta_I_L_fixed = r.num(root, "theta_I_L_fixed");

  const YAML::Node p = r.map(root, "params");
  r.expect_keys(p, {"width_grid", "lateral_grid", "lateral_posture_range", "offset_correction", "sample_step"});
  b.params.width_grid = r.numbers(p, "width_grid");
  b.params.lateral_grid = r.numbers(p, "lateral_grid");
  b.params.lateral_posture_range = r.interval(p, "lateral_posture_range");
  b.params.offset_correction = r.num(p, "offset_correction");
  b.params.sample_step = r.num(p, "sample_step");

  const YAML::Node wt = r.map(root, "width_table");
  r.expect_keys(wt, {"theta_T_P", "offset_correction", "entries"});
  b.width_table.theta_T_P = r.num(wt, "theta_T_P");
  b.width_table.offset_correction = r.num(wt, "offset_correction");
  for (const YAML::Node& e : r.seq(wt, "entries")) {
    r.expect_keys(e, {"theta_I_c", "width"});
    b.width_table.entries.push_back({r.num(e, "theta_I_c"), r.num(e, "width")});
  }
  const YAML::Node lt = r.map(root, "lateral_table");
  r.expect_keys(lt, {"entries"});
  for (const YAML::Node& e : r.seq(lt, "entries")) {
    r.expect_keys(e, {"width", "theta_T_L"});
    b.lateral_table.entries.push_back({r.num(e, "width"), r.num(e, "theta_T_L")});
  }
  try {
    b.width_table.validate();
    if (b.lateral_table.entries.empty()) throw Error(ErrorCode::kInsufficientEntries, "lateral table is empty");
    for (std::size_t i = 1; i < b.lateral_table.entries.size(); ++i) {
      if (!(b.lateral_table.entries[i].width > b.lateral_table.entries[i - 1].width)) {
        throw Error(ErrorCode::kInvalidConfig, "lateral table widths must be strictly increasing");
      }
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaError, source + ": " + e.what());
  }
  if (b.theta_T_P != b.width_table.theta_T_P) {
    throw Error(ErrorCode::kSchemaError, source + ": theta_T_P differs from width_table.theta_T_P");
  }
  return b;
}

CalibrationBundle load_bundle(const std::string& path) { return parse_bundle(yamlio::read_text_file(path), path); }

CalibrationBundle load_bundle(const std::string& path, const HandGeometry& geom) {
  CalibrationBundle b = load_bundle(path);
  b.check_geometry(geom);
  b.lateral_table.validate(geom);
  return b;
}

}  // namespace plexus
