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

// Planar primitives shared by the kinematics and contact code. Units are
// millimetres and radians throughout; the palm frame is right-handed with
// counter-clockwise positive rotation.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace plexus {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }
// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 rotate_about(Vec2 p, Vec2 center, double angle) {
  return center + rotate(p - center, angle);
}

// Wraps into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

struct Pose2 {
  Vec2 position;
  double orientation = 0.0;  // normalized to (-pi, pi]

  Pose2() = default;
  Pose2(Vec2 p, double theta) : position(p), orientation(normalize_angle(theta)) {}

  Vec2 transform(Vec2 local) const { return position + rotate(local, orientation); }
  Vec2 transform_dir(Vec2 local) const { return rotate(local, orientation); }
  Vec2 inverse_transform(Vec2 world) const { return rotate(world - position, -orientation); }
  Pose2 compose(const Pose2& local) const {
    return {transform(local.position), orientation + local.orientation};
  }
};

// Closed segment [a, b].
struct Segment {
  Vec2 a;
  Vec2 b;
};

Vec2 closest_point_on_segment(const Segment& s, Vec2 p);

// Convex polygon with counter-clockwise vertices. A single vertex is a point.
struct ConvexPolygon {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  Segment edge(std::size_t i) const {
    return {vertices[i], vertices[(i + 1) % vertices.size()]};
  }
};

ConvexPolygon make_rectangle(const Pose2& frame, double half_x, double half_y);

// Result of a proximity query between two convex polygons `a` and `b`.
// `distance` is signed: positive separation, negative penetration depth along
// the minimum-overlap axis. `normal` points from b towards a. When a pair of
// anti-parallel edges realises the minimum distance, `patch_on_b` holds the
// two endpoints of the overlapping interval (expressed on b's edge);
// otherwise it holds the single closest point.
struct Proximity {
  double distance = 0.0;
  Vec2 point_on_a;
  Vec2 point_on_b;
  Vec2 normal;
  std::vector<Vec2> patch_on_b;
};

Proximity proximity(const ConvexPolygon& a, const ConvexPolygon& b);

}  // namespace plexus
