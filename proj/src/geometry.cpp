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

#include "plexus/geometry.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace plexus {

namespace {

constexpr double kParallelTol = 1e-9;
constexpr double kPatchTol = 1e-7;

Vec2 outward_normal(const Segment& e) {
  const Vec2 d = e.b - e.a;
  return normalized(Vec2{d.y, -d.x});
}

// Projection interval of a polygon onto an axis.
std::pair<double, double> project(const ConvexPolygon& p, Vec2 axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec2& v : p.vertices) {
    const double s = dot(v, axis);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

Vec2 support(const ConvexPolygon& p, Vec2 dir) {
  Vec2 best = p.vertices.front();
  double best_s = dot(best, dir);
  for (const Vec2& v : p.vertices) {
    const double s = dot(v, dir);
    if (s > best_s) {
      best_s = s;
      best = v;
    }
  }
  return best;
}

// Minimum overlap across the edge normals of both polygons. Returns nullopt
// when a separating axis exists.
std::optional<std::pair<double, Vec2>> penetration(const ConvexPolygon& a,
                                                   const ConvexPolygon& b) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_axis;
  auto test = [&](const ConvexPolygon& owner) -> bool {
    if (owner.size() < 2) return true;
    for (std::size_t i = 0; i < owner.size(); ++i) {
      const Vec2 n = outward_normal(owner.edge(i));
      const auto [alo, ahi] = project(a, n);
      const auto [blo, bhi] = project(b, n);
      if (ahi < blo || bhi < alo) return false;
      // Push a out of b along +n or -n, whichever is shorter.
      const double push_pos = bhi - alo;
      const double push_neg = ahi - blo;
      if (push_pos < best) {
        best = push_pos;
        best_axis = n;
      }
      if (push_neg < best) {
        best = push_neg;
        best_axis = -n;
      }
    }
    return true;
  };
  if (!test(a) || !test(b)) return std::nullopt;
  return std::make_pair(best, best_axis);
}

void fill_patch(const ConvexPolygon& a, const ConvexPolygon& b, Proximity& out) {
  out.patch_on_b.clear();
  if (a.size() >= 2 && b.size() >= 2) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Segment eb = b.edge(j);
      const Vec2 nb = outward_normal(eb);
      if (dot(nb, out.normal) < 1.0 - 1e-6) continue;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const Segment ea = a.edge(i);
        const Vec2 na = outward_normal(ea);
        if (dot(na, nb) > -1.0 + kParallelTol) continue;
        const double sep = dot(ea.a - eb.a, nb);
        if (std::abs(sep - out.distance) > kPatchTol) continue;
        const Vec2 t = perp(nb);
        const double b0 = dot(eb.a, t), b1 = dot(eb.b, t);
        const double a0 = dot(ea.a, t), a1 = dot(ea.b, t);
        const double lo = std::max(std::min(b0, b1), std::min(a0, a1));
        const double hi = std::min(std::max(b0, b1), std::max(a0, a1));
        if (hi - lo <= 1e-9) continue;
        const double base = dot(eb.a, nb);
        out.patch_on_b = {nb * base + t * lo, nb * base + t * hi};
        return;
      }
    }
  }
  out.patch_on_b = {out.point_on_b};
}

}  // namespace

Vec2 closest_point_on_segment(const Segment& s, Vec2 p) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + d * t;
}

ConvexPolygon make_rectangle(const Pose2& frame, double half_x, double half_y) {
  return ConvexPolygon{{frame.transform({-half_x, -half_y}),
                        frame.transform({half_x, -half_y}),
                        frame.transform({half_x, half_y}),
                        frame.transform({-half_x, half_y})}};
}

Proximity proximity(const ConvexPolygon& a, const ConvexPolygon& b) {
  Proximity out;
  if (auto pen = penetration(a, b)) {
    const auto [depth, axis] = *pen;
    out.distance = -depth;
    out.normal = axis;
    out.point_on_a = support(a, -axis);
    out.point_on_b = out.point_on_a + axis * depth;
    fill_patch(a, b, out);
    return out;
  }

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](Vec2 pa, Vec2 pb) {
    const double d = norm(pa - pb);
    if (d < best) {
      best = d;
      out.point_on_a = pa;
      out.point_on_b = pb;
    }
  };
  for (const Vec2& v : a.vertices) {
    if (b.size() == 1) {
      consider(v, b.vertices.front());
    } else {
      for (std::size_t j = 0; j < b.size(); ++j) consider(v, closest_point_on_segment(b.edge(j), v));
    }
  }
  if (a.size() >= 2) {
    for (const Vec2& v : b.vertices) {
      for (std::size_t i = 0; i < a.size(); ++i) consider(closest_point_on_segment(a.edge(i), v), v);
    }
  }
  out.distance = best;
  out.normal = normalized(out.point_on_a - out.point_on_b);
  fill_patch(a, b, out);
  return out;
}

}  // namespace plexus
