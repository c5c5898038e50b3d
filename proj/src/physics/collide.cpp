// Copyright 2026 The Stampede Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stampede/physics/collide.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stampede::physics {

namespace {

constexpr double kDefaultFriction = 1.0;

// World-space shape: sphere = segment of zero length; capsule = segment.
struct WorldShape {
  ShapeType type;
  Vec3 p0, p1;      // capsule segment endpoints (p0 == p1 for spheres)
  double radius;
  Vec3 center;      // box center
  Mat3 rot;         // box orientation
  Vec3 half;        // box half extents
  Vec3 aabb_min, aabb_max;
};

WorldShape world_shape(const RigidBodyState& state, const Shape& shape) {
  WorldShape w{};
  w.type = shape.type;
  const Quat rot = state.orientation * shape.local_rot;
  const Vec3 pos = state.position + state.orientation.rotate(shape.local_pos);
  switch (shape.type) {
    case ShapeType::Sphere: {
      w.p0 = w.p1 = pos;
      w.radius = shape.radius;
      const Vec3 r{shape.radius, shape.radius, shape.radius};
      w.aabb_min = pos - r;
      w.aabb_max = pos + r;
      break;
    }
    case ShapeType::Capsule: {
      const Vec3 axis = rot.rotate({0, 0, shape.half_length});
      w.p0 = pos - axis;
      w.p1 = pos + axis;
      w.radius = shape.radius;
      const Vec3 r{shape.radius, shape.radius, shape.radius};
      w.aabb_min = Vec3{std::min(w.p0.x, w.p1.x), std::min(w.p0.y, w.p1.y), std::min(w.p0.z, w.p1.z)} - r;
      w.aabb_max = Vec3{std::max(w.p0.x, w.p1.x), std::max(w.p0.y, w.p1.y), std::max(w.p0.z, w.p1.z)} + r;
      break;
    }
    case ShapeType::Box: {
      w.center = pos;
      w.rot = rot.to_matrix();
      w.half = shape.half_extents;
      Vec3 ext{};
      for (int i = 0; i < 3; ++i) {
        ext.x += std::abs(w.rot(0, i)) * (&w.half.x)[i];
        ext.y += std::abs(w.rot(1, i)) * (&w.half.x)[i];
        ext.z += std::abs(w.rot(2, i)) * (&w.half.x)[i];
      }
      w.aabb_min = pos - ext;
      w.aabb_max = pos + ext;
      break;
    }
  }
  return w;
}

bool aabb_overlap(const WorldShape& a, const WorldShape& b, double margin) {
  return a.aabb_min.x <= b.aabb_max.x + margin && b.aabb_min.x <= a.aabb_max.x + margin &&
         a.aabb_min.y <= b.aabb_max.y + margin && b.aabb_min.y <= a.aabb_max.y + margin &&
         a.aabb_min.z <= b.aabb_max.z + margin && b.aabb_min.z <= a.aabb_max.z + margin;
}

void add_contact(std::vector<ContactPoint>& out, int body_a, int body_b, const Vec3& point,
                 const Vec3& normal, double separation) {
  out.push_back(ContactPoint{body_a, body_b, point, normal, separation, kDefaultFriction});
}

// --- vs ground plane z = 0 -------------------------------------------------

void collide_plane(const WorldShape& s, int body, double margin, std::vector<ContactPoint>& out) {
  const Vec3 up{0, 0, 1};
  switch (s.type) {
    case ShapeType::Sphere: {
      const double sep = s.p0.z - s.radius;
      if (sep < margin) add_contact(out, body, kStaticBody, s.p0 - up * s.radius, up, sep);
      break;
    }
    case ShapeType::Capsule: {
      for (const Vec3& e : {s.p0, s.p1}) {
        const double sep = e.z - s.radius;
        if (sep < margin) add_contact(out, body, kStaticBody, e - up * s.radius, up, sep);
      }
      break;
    }
    case ShapeType::Box: {
      for (int cx = -1; cx <= 1; cx += 2)
        for (int cy = -1; cy <= 1; cy += 2)
          for (int cz = -1; cz <= 1; cz += 2) {
            const Vec3 local{cx * s.half.x, cy * s.half.y, cz * s.half.z};
            const Vec3 corner = s.center + s.rot * local;
            if (corner.z < margin) add_contact(out, body, kStaticBody, corner, up, corner.z);
          }
      break;
    }
  }
}

// --- vs static box ----------------------------------------------------------

struct ObbFrame {
  Vec3 center;
  Mat3 rot;  // world from box
  Vec3 half;
};

ObbFrame obb_frame(const StaticBox& b) {
  Mat3 r;
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  r.m[0] = c; r.m[1] = -s; r.m[2] = 0;
  r.m[3] = s; r.m[4] = c;  r.m[5] = 0;
  r.m[6] = 0; r.m[7] = 0;  r.m[8] = 1;
  return {b.center, r, b.half_extents};
}

// Signed distance from a point to an OBB with outward normal and surface
// point. Negative inside.
double point_obb(const ObbFrame& box, const Vec3& p, Vec3& normal, Vec3& surface) {
  const Vec3 local = box.rot.transposed() * (p - box.center);
  const Vec3 h = box.half;
  Vec3 clamped{std::clamp(local.x, -h.x, h.x), std::clamp(local.y, -h.y, h.y),
               std::clamp(local.z, -h.z, h.z)};
  const Vec3 delta = local - clamped;
  const double outside = delta.norm();
  if (outside > 1e-12) {
    surface = box.center + box.rot * clamped;
    normal = (box.rot * delta) / outside;
    return outside;
  }
  // inside: push out through the nearest face
  double best = h.x - std::abs(local.x);
  int axis = 0;
  double sign = local.x >= 0 ? 1.0 : -1.0;
  if (h.y - std::abs(local.y) < best) {
    best = h.y - std::abs(local.y);
    axis = 1;
    sign = local.y >= 0 ? 1.0 : -1.0;
  }
  if (h.z - std::abs(local.z) < best) {
    best = h.z - std::abs(local.z);
    axis = 2;
    sign = local.z >= 0 ? 1.0 : -1.0;
  }
  Vec3 ln{};
  (&ln.x)[axis] = sign;
  Vec3 lsurf = local;
  (&lsurf.x)[axis] = sign * (&h.x)[axis];
  surface = box.center + box.rot * lsurf;
  normal = box.rot * ln;
  return -best;
}

void collide_sphere_obb(const WorldShape& s, const ObbFrame& box, int body, double margin,
                        std::vector<ContactPoint>& out) {
  Vec3 normal, surface;
  const double d = point_obb(box, s.p0, normal, surface);
  const double sep = d - s.radius;
  if (sep < margin) add_contact(out, body, kStaticBody, surface, normal, sep);
}

void collide_capsule_obb(const WorldShape& s, const ObbFrame& box, int body, double margin,
                         std::vector<ContactPoint>& out) {
  Vec3 n, surf;
  auto dist_at = [&](double t) {
    const Vec3 p = s.p0 + (s.p1 - s.p0) * t;
    Vec3 nn, ss;
    return point_obb(box, p, nn, ss);
  };
  // Distance along the segment is convex outside the box; ternary search
  // refines the deepest point, endpoints give support when lying on a face.
  double lo = 0, hi = 1;
  for (int i = 0; i < 32; ++i) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (dist_at(m1) <= dist_at(m2)) hi = m2; else lo = m1;
  }
  const double tmid = 0.5 * (lo + hi);
  bool mid_added = false;
  {
    const Vec3 p = s.p0 + (s.p1 - s.p0) * tmid;
    const double d = point_obb(box, p, n, surf);
    if (d - s.radius < margin) {
      add_contact(out, body, kStaticBody, surf, n, d - s.radius);
      mid_added = true;
    }
  }
  for (double t : {0.0, 1.0}) {
    if (mid_added && std::abs(t - tmid) < 0.05) continue;
    const Vec3 p = s.p0 + (s.p1 - s.p0) * t;
    const double d = point_obb(box, p, n, surf);
    if (d - s.radius < margin) add_contact(out, body, kStaticBody, surf, n, d - s.radius);
  }
}

// --- dynamic pair narrow phase ----------------------------------------------

// Closest points between segments (Ericson, Real-Time Collision Detection).
void closest_segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2,
                             Vec3& c1, Vec3& c2) {
  const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.norm2(), e = d2.norm2(), f = d2.dot(r);
  double s = 0, t = 0;
  constexpr double eps = 1e-12;
  if (a <= eps && e <= eps) {
    // both points
  } else if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > eps) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = p1 + d1 * s;
  c2 = p2 + d2 * t;
}

void collide_dynamic_pair(const WorldShape& a, const WorldShape& b, int body_a, int body_b,
                          double margin, std::vector<ContactPoint>& out) {
  // Sphere and capsule both reduce to segment-segment; boxes only appear as
  // static geometry in the bundled models, so box pairs are not generated.
  if (a.type == ShapeType::Box || b.type == ShapeType::Box) return;
  Vec3 ca, cb;
  closest_segment_segment(a.p0, a.p1, b.p0, b.p1, ca, cb);
  const Vec3 delta = ca - cb;
  double dist = delta.norm();
  Vec3 normal = dist > 1e-9 ? delta / dist : Vec3{0, 0, 1};
  const double sep = dist - a.radius - b.radius;
  if (sep < margin) {
    const Vec3 point = cb + normal * (b.radius + 0.5 * (dist - a.radius - b.radius));
    add_contact(out, body_a, body_b, point, normal, sep);
  }
}

}  // namespace

std::vector<ContactPoint> detect_contacts(const Scene& scene, double margin) {
  if (margin < 0) throw std::invalid_argument("detect_contacts: margin must be >= 0");
  const int n = scene.body_count();
  std::vector<ContactPoint> out;

  std::vector<WorldShape> shapes(n);
  for (int b = 0; b < n; ++b) shapes[b] = world_shape(scene.states[b], scene.shapes[b]);

  std::vector<ObbFrame> boxes;
  boxes.reserve(scene.static_boxes.size());
  for (const auto& sb : scene.static_boxes) boxes.push_back(obb_frame(sb));

  // Static geometry, in body order.
  for (int b = 0; b < n; ++b) {
    if (scene.inertials[b].is_static) continue;
    const WorldShape& ws = shapes[b];
    if (scene.has_ground_plane && ws.aabb_min.z < margin) collide_plane(ws, b, margin, out);
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      const ObbFrame& box = boxes[k];
      const Vec3 bmin = box.center - Vec3{box.half.x + box.half.y, box.half.x + box.half.y, box.half.z};
      const Vec3 bmax = box.center + Vec3{box.half.x + box.half.y, box.half.x + box.half.y, box.half.z};
      if (ws.aabb_max.x + margin < bmin.x || ws.aabb_min.x - margin > bmax.x ||
          ws.aabb_max.y + margin < bmin.y || ws.aabb_min.y - margin > bmax.y ||
          ws.aabb_max.z + margin < bmin.z || ws.aabb_min.z - margin > bmax.z)
        continue;
      if (ws.type == ShapeType::Sphere) collide_sphere_obb(ws, box, b, margin, out);
      else if (ws.type == ShapeType::Capsule) collide_capsule_obb(ws, box, b, margin, out);
      // dynamic boxes against terrain boxes are not supported by the models
    }
  }

  // Inter-agent pairs via a uniform hash grid on AABBs.
  if (scene.inter_agent_collisions && scene.agents.size() > 1) {
    double cell = 0.5;
    for (int b = 0; b < n; ++b) {
      const Vec3 ext = shapes[b].aabb_max - shapes[b].aabb_min;
      cell = std::max({cell, ext.x, ext.y, ext.z});
    }
    auto key = [](int ix, int iy, int iz) {
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 42) ^
             (static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy)) << 21) ^
             static_cast<std::uint64_t>(static_cast<std::uint32_t>(iz));
    };
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    for (int b = 0; b < n; ++b) {
      if (scene.inertials[b].is_static) continue;
      const WorldShape& ws = shapes[b];
      const int x0 = static_cast<int>(std::floor((ws.aabb_min.x - margin) / cell));
      const int x1 = static_cast<int>(std::floor((ws.aabb_max.x + margin) / cell));
      const int y0 = static_cast<int>(std::floor((ws.aabb_min.y - margin) / cell));
      const int y1 = static_cast<int>(std::floor((ws.aabb_max.y + margin) / cell));
      const int z0 = static_cast<int>(std::floor((ws.aabb_min.z - margin) / cell));
      const int z1 = static_cast<int>(std::floor((ws.aabb_max.z + margin) / cell));
      for (int ix = x0; ix <= x1; ++ix)
        for (int iy = y0; iy <= y1; ++iy)
          for (int iz = z0; iz <= z1; ++iz) grid[key(ix, iy, iz)].push_back(b);
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [k, cellBodies] : grid) {
      for (std::size_t i = 0; i < cellBodies.size(); ++i)
        for (std::size_t j = i + 1; j < cellBodies.size(); ++j) {
          int a = cellBodies[i], b = cellBodies[j];
          if (a > b) std::swap(a, b);
          if (scene.agent_of(a) == scene.agent_of(b)) continue;  // no self collision
          pairs.emplace_back(a, b);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [a, b] : pairs) {
      if (!aabb_overlap(shapes[a], shapes[b], margin)) continue;
      collide_dynamic_pair(shapes[a], shapes[b], a, b, margin, out);
    }
  }

  return out;
}

double terrain_height(const Scene& scene, double x, double y) {
  double h = 0.0;
  for (const auto& b : scene.static_boxes) {
    const double c = std::cos(b.yaw), s = std::sin(b.yaw);
    const double dx = x - b.center.x, dy = y - b.center.y;
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    if (std::abs(lx) <= b.half_extents.x && std::abs(ly) <= b.half_extents.y)
      h = std::max(h, b.center.z + b.half_extents.z);
  }
  return h;
}

}  // namespace stampede::physics
